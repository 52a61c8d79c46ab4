// Copyright 2026 The mcmppi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MCMPPI_SCENE_H_
#define MCMPPI_SCENE_H_

#include <vector>

#include <Eigen/Dense>

#include "mcmppi/geometry.h"

namespace mcmppi {

// Sphere snapshot at one instant.
struct Sphere {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 0.0;
};

// Sphere obstacle that is either static or moves along a straight line at
// constant speed once `start_time` has passed.
struct Obstacle {
  enum class Motion { kStatic, kLinear };

  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 0.05;
  Motion motion = Motion::kStatic;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitX();  // unit direction
  double speed = 0.0;                               // m/s
  double start_time = 0.0;                          // s

  Eigen::Vector3d PositionAt(double t) const;
  Sphere At(double t) const { return {PositionAt(t), radius}; }
};

std::vector<Sphere> ObstaclesAt(const std::vector<Obstacle>& obstacles, double t);

}  // namespace mcmppi

#endif  // MCMPPI_SCENE_H_
