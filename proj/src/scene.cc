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

#include "mcmppi/scene.h"

#include <algorithm>

namespace mcmppi {

Eigen::Vector3d Obstacle::PositionAt(double t) const {
  if (motion == Motion::kStatic) return center;
  return center + axis * (speed * std::max(0.0, t - start_time));
}

std::vector<Sphere> ObstaclesAt(const std::vector<Obstacle>& obstacles, double t) {
  std::vector<Sphere> out;
  out.reserve(obstacles.size());
  for (const Obstacle& o : obstacles) out.push_back(o.At(t));
  return out;
}

}  // namespace mcmppi
