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

#ifndef MCMPPI_CHAIN_MODEL_H_
#define MCMPPI_CHAIN_MODEL_H_

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mcmppi/geometry.h"

namespace YAML {
class Node;
}

namespace mcmppi {

// Joint-space vector of a dual-arm model: [left joints; right joints].
using Configuration = Eigen::VectorXd;

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct JointSpec {
  // Transform from the previous link frame to the frame the joint rotates
  // about (its local z axis). Planar joints translate along x only.
  Transform fixed;
  double lower = 0.0;
  double upper = 0.0;
};

struct ArmModel {
  std::string name;
  Transform base;
  std::vector<JointSpec> joints;
  Transform tool;
  // Branch of the closed-form planar chart: sign of the elbow joint.
  int elbow_sign = 1;
};

// Sphere attached to a link frame. link 0 is the arm base, link j the frame
// after joint j. Tray spheres (arm == kTray) live in the tray frame.
struct CollisionSphere {
  static constexpr int kLeft = 0;
  static constexpr int kRight = 1;
  static constexpr int kTray = 2;
  int arm = kLeft;
  int link = 0;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 0.0;
};

// Immutable description of a closed-chain dual-arm system. The left arm
// holds the object at its end effector; the right end effector must sit at
// left_ee * grasp.
class ChainModel {
 public:
  ChainModel(std::string id, Group group, ArmModel left, ArmModel right,
             Transform grasp, std::vector<CollisionSphere> spheres,
             Eigen::VectorXd home, Eigen::VectorXd neutral);

  const std::string& id() const { return id_; }
  Group group() const { return group_; }
  bool planar() const { return group_ == Group::kSE2; }
  const ArmModel& left() const { return left_; }
  const ArmModel& right() const { return right_; }
  const ArmModel& arm(int index) const { return index == 0 ? left_ : right_; }
  const Transform& grasp() const { return grasp_; }
  const std::vector<CollisionSphere>& spheres() const { return spheres_; }

  int joint_count() const { return static_cast<int>(lower_.size()); }
  int left_joint_count() const { return static_cast<int>(left_.joints.size()); }
  // Closed-chain block: 3 (SE2) or 6 (SE3) entries.
  int closure_dim() const { return planar() ? 3 : 6; }
  // Tray roll/pitch block: spatial models only.
  int flatness_dim() const { return planar() ? 0 : 2; }
  int constraint_dim() const { return closure_dim() + flatness_dim(); }
  int manifold_dim() const { return joint_count() - constraint_dim(); }
  // Task-space dimension of a frame velocity (3 planar, 6 spatial).
  int task_dim() const { return planar() ? 3 : 6; }

  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  const Eigen::VectorXd& home() const { return home_; }
  const Eigen::VectorXd& neutral() const { return neutral_; }

  bool WithinBounds(const Configuration& q, double slack = 0.0) const;
  Configuration Clamp(const Configuration& q) const;

 private:
  std::string id_;
  Group group_;
  ArmModel left_;
  ArmModel right_;
  Transform grasp_;
  std::vector<CollisionSphere> spheres_;
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
  Eigen::VectorXd home_;
  Eigen::VectorXd neutral_;
};

// Reads a model file (YAML, schema in models/README.md).
ChainModel LoadChainModel(const std::string& path);
ChainModel ParseChainModel(const YAML::Node& root);

// Parses a pose entry: {xy, angle} for SE2 or {xyz, rpy} for SE3, where rpy
// is applied as Rz(yaw) * Ry(pitch) * Rx(roll).
Transform ParsePose(const YAML::Node& node, Group group);

}  // namespace mcmppi

#endif  // MCMPPI_CHAIN_MODEL_H_
