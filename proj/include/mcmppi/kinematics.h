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

// Forward kinematics, the closed-chain equality constraint h(q) and its
// Jacobian, task Jacobians, and Newton projection onto {q : h(q) = 0}.

#ifndef MCMPPI_KINEMATICS_H_
#define MCMPPI_KINEMATICS_H_

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "mcmppi/chain_model.h"
#include "mcmppi/geometry.h"

namespace mcmppi {

struct DualArmPoses {
  Transform left_ee;
  Transform right_ee;
  // Origin at the end-effector midpoint; orientation is the geodesic midpoint
  // of the left frame and the right frame mapped back through the grasp.
  Transform tray;
};

// Link frames of both arms: frames[0] is the base, frames[j] the frame after
// joint j, and the last entry is the end effector (after the tool).
struct ChainFrames {
  std::vector<Transform> left;
  std::vector<Transform> right;
};

ChainFrames ComputeFrames(const ChainModel& model, const Configuration& q);
DualArmPoses ForwardKinematics(const ChainModel& model, const Configuration& q);
Transform TrayFrame(const ChainModel& model, const Transform& left_ee,
                    const Transform& right_ee);

// Constraint value h(q) = [h_cc; h_flat]. h_cc is the log of the closure
// error (left_ee * grasp)^-1 * right_ee stacked as [linear; angular]; h_flat
// is the tray's ZYX (roll, pitch) and is empty for planar models.
struct ConstraintResidual {
  Eigen::VectorXd values;
  int closure_dim = 0;
  int flatness_dim = 0;

  Eigen::VectorXd closure() const { return values.head(closure_dim); }
  Eigen::VectorXd flatness() const { return values.tail(flatness_dim); }
  // Mixed-unit Euclidean norm over all entries.
  double norm() const { return values.norm(); }
};

ConstraintResidual Constraint(const ChainModel& model, const Configuration& q);

// Central-difference step used by ConstraintJacobian.
inline constexpr double kJacobianStep = 1e-6;

// l x n Jacobian of h by central differences.
Eigen::MatrixXd ConstraintJacobian(const ChainModel& model,
                                   const Configuration& q);

// Roll and pitch of a rotation under R = Rz(yaw) Ry(pitch) Rx(roll).
Eigen::Vector2d RollPitchZyx(const Eigen::Matrix3d& rotation);

enum class TaskFrame { kTrayCenter, kLeftEe };

// Geometric Jacobian of a frame, rows [linear; angular] in the world frame:
// 3 x n for planar models (vx, vy, wz), 6 x n for spatial models.
Eigen::MatrixXd TaskJacobian(const ChainModel& model, const Configuration& q,
                             TaskFrame frame);

// Pose error of `current` relative to `target` in the world frame, stacked
// [position; orientation]. The orientation part is the world-frame rotation
// vector log(R_current * R_target^T) (the wrapped angle difference in 2-D).
Eigen::VectorXd PoseError(const Transform& current, const Transform& target);

// Robot sphere centers in the world frame (z = 0 for planar models), in the
// order of model.spheres().
std::vector<Eigen::Vector3d> SphereCenters(const ChainModel& model,
                                           const Configuration& q);
std::vector<Eigen::Vector3d> SphereCenters(const ChainModel& model,
                                           const ChainFrames& frames);

class ProjectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Projection {
  Configuration q;
  int iterations = 0;
  double residual = 0.0;
};

// Gauss-Newton q <- q - J^T (J J^T + 1e-8 I)^-1 h(q) until ||h|| <= tol.
// The result is clamped to the joint bounds when that keeps ||h|| <= tol;
// otherwise (or without convergence) ProjectionError is thrown.
Projection ProjectToManifold(const ChainModel& model, const Configuration& q0,
                             double tol, int max_iter);

}  // namespace mcmppi

#endif  // MCMPPI_KINEMATICS_H_
