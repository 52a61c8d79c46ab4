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

#include "mcmppi/kinematics.h"

#include <cmath>
#include <limits>
#include <sstream>

namespace mcmppi {
namespace {

constexpr double kProjectionDamping = 1e-8;

Transform JointRotation(Group group, double angle) {
  if (group == Group::kSE2) return Transform::Planar(angle, Eigen::Vector2d::Zero());
  return ExpMap(Twist::Spatial(Eigen::Vector3d(0.0, 0.0, angle),
                               Eigen::Vector3d::Zero()));
}

std::vector<Transform> ArmFrames(const ArmModel& arm, Group group,
                                 const double* q) {
  std::vector<Transform> frames;
  frames.reserve(arm.joints.size() + 2);
  Transform t = arm.base;
  frames.push_back(t);
  for (std::size_t i = 0; i < arm.joints.size(); ++i) {
    t = t * arm.joints[i].fixed * JointRotation(group, q[i]);
    frames.push_back(t);
  }
  frames.push_back(t * arm.tool);
  return frames;
}

// Geometric Jacobian of the end effector of one arm over its own joints.
Eigen::MatrixXd ArmJacobian(const std::vector<Transform>& frames, bool planar) {
  const int joints = static_cast<int>(frames.size()) - 2;
  const Eigen::Vector3d p_ee = frames.back().translation();
  Eigen::MatrixXd jac(planar ? 3 : 6, joints);
  for (int i = 0; i < joints; ++i) {
    const Transform& f = frames[i + 1];
    const Eigen::Vector3d r = p_ee - f.translation();
    if (planar) {
      jac.col(i) << -r.y(), r.x(), 1.0;
    } else {
      const Eigen::Vector3d z = f.rotation().col(2);
      jac.col(i) << z.cross(r), z;
    }
  }
  return jac;
}

}  // namespace

ChainFrames ComputeFrames(const ChainModel& model, const Configuration& q) {
  if (q.size() != model.joint_count()) {
    throw ModelError("configuration length does not match the model");
  }
  ChainFrames frames;
  frames.left = ArmFrames(model.left(), model.group(), q.data());
  frames.right = ArmFrames(model.right(), model.group(),
                           q.data() + model.left_joint_count());
  return frames;
}

Transform TrayFrame(const ChainModel& model, const Transform& left_ee,
                    const Transform& right_ee) {
  const Eigen::Vector3d mid =
      0.5 * (left_ee.translation() + right_ee.translation());
  if (model.planar()) {
    const double right_as_left = right_ee.angle() - model.grasp().angle();
    const double angle =
        left_ee.angle() + 0.5 * WrapAngle(right_as_left - left_ee.angle());
    return Transform::Planar(angle, mid.head<2>());
  }
  const Eigen::Matrix3d right_as_left =
      right_ee.rotation() * model.grasp().rotation().transpose();
  const Eigen::Vector3d half =
      0.5 * LogSo3(left_ee.rotation().transpose() * right_as_left);
  const Transform rot = ExpMap(Twist::Spatial(half, Eigen::Vector3d::Zero()));
  return Transform::Spatial(left_ee.rotation() * rot.rotation(), mid);
}

DualArmPoses ForwardKinematics(const ChainModel& model, const Configuration& q) {
  const ChainFrames frames = ComputeFrames(model, q);
  DualArmPoses poses{frames.left.back(), frames.right.back(), Transform()};
  poses.tray = TrayFrame(model, poses.left_ee, poses.right_ee);
  return poses;
}

Eigen::Vector2d RollPitchZyx(const Eigen::Matrix3d& r) {
  const double pitch = std::atan2(-r(2, 0), std::hypot(r(2, 1), r(2, 2)));
  const double roll = std::atan2(r(2, 1), r(2, 2));
  return Eigen::Vector2d(roll, pitch);
}

ConstraintResidual Constraint(const ChainModel& model, const Configuration& q) {
  const DualArmPoses poses = ForwardKinematics(model, q);
  const Transform error =
      (poses.left_ee * model.grasp()).Inverse() * poses.right_ee;
  ConstraintResidual h;
  h.closure_dim = model.closure_dim();
  h.flatness_dim = model.flatness_dim();
  h.values.resize(model.constraint_dim());
  h.values.head(h.closure_dim) = LogMap(error).Vector();
  if (h.flatness_dim > 0) {
    h.values.tail<2>() = RollPitchZyx(poses.tray.rotation());
  }
  return h;
}

Eigen::MatrixXd ConstraintJacobian(const ChainModel& model,
                                   const Configuration& q) {
  const int n = model.joint_count();
  Eigen::MatrixXd jac(model.constraint_dim(), n);
  Configuration probe = q;
  for (int j = 0; j < n; ++j) {
    probe(j) = q(j) + kJacobianStep;
    const Eigen::VectorXd plus = Constraint(model, probe).values;
    probe(j) = q(j) - kJacobianStep;
    const Eigen::VectorXd minus = Constraint(model, probe).values;
    probe(j) = q(j);
    jac.col(j) = (plus - minus) / (2.0 * kJacobianStep);
  }
  return jac;
}

Eigen::MatrixXd TaskJacobian(const ChainModel& model, const Configuration& q,
                             TaskFrame frame) {
  const ChainFrames frames = ComputeFrames(model, q);
  const int n = model.joint_count();
  const int nl = model.left_joint_count();
  const bool planar = model.planar();
  const Eigen::MatrixXd left = ArmJacobian(frames.left, planar);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(model.task_dim(), n);
  if (frame == TaskFrame::kLeftEe) {
    jac.leftCols(nl) = left;
    return jac;
  }
  const Eigen::MatrixXd right = ArmJacobian(frames.right, planar);
  const int lin = planar ? 2 : 3;
  jac.topLeftCorner(lin, nl) = 0.5 * left.topRows(lin);
  jac.topRightCorner(lin, n - nl) = 0.5 * right.topRows(lin);
  if (planar) {
    // The tray heading is the mean of both end-effector headings.
    jac.bottomLeftCorner(1, nl) = 0.5 * left.bottomRows(1);
    jac.bottomRightCorner(1, n - nl) = 0.5 * right.bottomRows(1);
    return jac;
  }
  // Spatial geodesic midpoint: world angular velocity by central differences.
  Configuration probe = q;
  for (int j = 0; j < n; ++j) {
    probe(j) = q(j) + kJacobianStep;
    const Eigen::Matrix3d plus = ForwardKinematics(model, probe).tray.rotation();
    probe(j) = q(j) - kJacobianStep;
    const Eigen::Matrix3d minus = ForwardKinematics(model, probe).tray.rotation();
    probe(j) = q(j);
    jac.block<3, 1>(3, j) =
        LogSo3(plus * minus.transpose()) / (2.0 * kJacobianStep);
  }
  return jac;
}

Eigen::VectorXd PoseError(const Transform& current, const Transform& target) {
  if (current.group() != target.group()) {
    throw GeometryError("pose error between different groups");
  }
  if (current.group() == Group::kSE2) {
    Eigen::VectorXd e(3);
    e << current.planar_translation() - target.planar_translation(),
        WrapAngle(current.angle() - target.angle());
    return e;
  }
  Eigen::VectorXd e(6);
  e << current.translation() - target.translation(),
      LogSo3(current.rotation() * target.rotation().transpose());
  return e;
}

std::vector<Eigen::Vector3d> SphereCenters(const ChainModel& model,
                                           const Configuration& q) {
  return SphereCenters(model, ComputeFrames(model, q));
}

std::vector<Eigen::Vector3d> SphereCenters(const ChainModel& model,
                                           const ChainFrames& frames) {
  const Transform tray = TrayFrame(model, frames.left.back(), frames.right.back());
  std::vector<Eigen::Vector3d> centers;
  centers.reserve(model.spheres().size());
  for (const CollisionSphere& s : model.spheres()) {
    const Transform* frame;
    if (s.arm == CollisionSphere::kTray) {
      frame = &tray;
    } else {
      const auto& arm = s.arm == CollisionSphere::kLeft ? frames.left : frames.right;
      frame = &arm.at(s.link);
    }
    centers.push_back(frame->translation() + frame->rotation() * s.center);
  }
  return centers;
}

Projection ProjectToManifold(const ChainModel& model, const Configuration& q0,
                             double tol, int max_iter) {
  Projection out;
  out.q = q0;
  const int l = model.constraint_dim();
  try {
    double residual = Constraint(model, out.q).norm();
    while (residual > tol) {
      if (out.iterations >= max_iter || !std::isfinite(residual)) {
        std::ostringstream msg;
        msg << "projection did not converge after " << out.iterations
            << " iterations (||h|| = " << residual << ")";
        throw ProjectionError(msg.str());
      }
      const Eigen::VectorXd h = Constraint(model, out.q).values;
      const Eigen::MatrixXd jac = ConstraintJacobian(model, out.q);
      const Eigen::MatrixXd gram =
          jac * jac.transpose() +
          kProjectionDamping * Eigen::MatrixXd::Identity(l, l);
      out.q -= jac.transpose() * gram.ldlt().solve(h);
      ++out.iterations;
      residual = Constraint(model, out.q).norm();
    }
    out.residual = residual;
  } catch (const GeometryError& e) {
    throw ProjectionError(std::string("projection hit a singular pose: ") +
                          e.what());
  }
  if (!model.WithinBounds(out.q)) {
    const Configuration clamped = model.Clamp(out.q);
    double residual;
    try {
      residual = Constraint(model, clamped).norm();
    } catch (const GeometryError&) {
      residual = std::numeric_limits<double>::infinity();
    }
    if (!(residual <= tol)) {
      throw ProjectionError("projection left the joint bounds");
    }
    out.q = clamped;
    out.residual = residual;
  }
  return out;
}

}  // namespace mcmppi
