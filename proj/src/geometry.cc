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

#include "mcmppi/geometry.h"

#include <cmath>
#include <numbers>
#include <sstream>

namespace mcmppi {
namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Matrix3d PlanarRotation(double angle) {
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
  const double c = std::cos(angle), s = std::sin(angle);
  r(0, 0) = c;
  r(0, 1) = -s;
  r(1, 0) = s;
  r(1, 1) = c;
  return r;
}

void CheckRotation(const Eigen::Matrix3d& r) {
  const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity())
                           .cwiseAbs()
                           .maxCoeff();
  const double det = r.determinant();
  if (ortho > 1e-9 || std::abs(det - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "rotation is not in SO(3): orthogonality error " << ortho
        << ", det " << det;
    throw GeometryError(msg.str());
  }
}

// Coefficients of the SO(3)/SE(3) Rodrigues forms:
//   a = sin(t)/t, b = (1 - cos(t))/t^2, c = (t - sin(t))/t^3.
struct RodriguesCoefficients {
  double a, b, c;
};

RodriguesCoefficients Coefficients(double theta) {
  if (theta < kSmallAngle) {
    const double t2 = theta * theta;
    return {1.0 - t2 / 6.0, 0.5 - t2 / 24.0, 1.0 / 6.0 - t2 / 120.0};
  }
  const double s = std::sin(theta);
  const double half = std::sin(0.5 * theta);
  const double t2 = theta * theta;
  return {s / theta, 2.0 * half * half / t2, (theta - s) / (t2 * theta)};
}

}  // namespace

std::string GroupName(Group group) {
  return group == Group::kSE2 ? "SE2" : "SE3";
}

double WrapAngle(double angle) {
  double wrapped = std::remainder(angle, 2.0 * kPi);
  if (wrapped <= -kPi) wrapped += 2.0 * kPi;
  return wrapped;
}

Eigen::Matrix3d RotX(double angle) {
  return Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitX()).toRotationMatrix();
}
Eigen::Matrix3d RotY(double angle) {
  return Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitY()).toRotationMatrix();
}
Eigen::Matrix3d RotZ(double angle) {
  return Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitZ()).toRotationMatrix();
}

// ------------------------------ Transform ----------------------------------

Transform::Transform()
    : Transform(Group::kSE3, 0.0, Eigen::Matrix3d::Identity(),
                Eigen::Vector3d::Zero()) {}

Transform::Transform(Group group, double angle,
                     const Eigen::Matrix3d& rotation,
                     const Eigen::Vector3d& translation)
    : group_(group),
      angle_(angle),
      rotation_(rotation),
      translation_(translation) {}

Transform Transform::Identity(Group group) {
  return Transform(group, 0.0, Eigen::Matrix3d::Identity(),
                   Eigen::Vector3d::Zero());
}

Transform Transform::Planar(double angle, const Eigen::Vector2d& translation) {
  const double wrapped = WrapAngle(angle);
  return Transform(Group::kSE2, wrapped, PlanarRotation(wrapped),
                   Eigen::Vector3d(translation.x(), translation.y(), 0.0));
}

Transform Transform::Spatial(const Eigen::Matrix3d& rotation,
                             const Eigen::Vector3d& translation) {
  CheckRotation(rotation);
  return Transform(Group::kSE3, 0.0, rotation, translation);
}

Transform Transform::FromMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() == 3 && m.cols() == 3) {
    const Eigen::Matrix2d r = m.topLeftCorner<2, 2>();
    if ((r.transpose() * r - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() >
            1e-9 ||
        std::abs(r.determinant() - 1.0) > 1e-9) {
      throw GeometryError("planar rotation block is not in SO(2)");
    }
    return Planar(std::atan2(r(1, 0), r(0, 0)),
                  Eigen::Vector2d(m(0, 2), m(1, 2)));
  }
  if (m.rows() == 4 && m.cols() == 4) {
    return Spatial(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>());
  }
  throw GeometryError("homogeneous matrix must be 3x3 or 4x4");
}

double Transform::angle() const {
  if (group_ != Group::kSE2) {
    throw GeometryError("angle() is only defined for SE2 transforms");
  }
  return angle_;
}

Transform Transform::Inverse() const {
  if (group_ == Group::kSE2) {
    const Eigen::Vector2d t =
        -rotation_.topLeftCorner<2, 2>().transpose() * translation_.head<2>();
    return Planar(-angle_, t);
  }
  const Eigen::Matrix3d rt = rotation_.transpose();
  return Transform(Group::kSE3, 0.0, rt, -rt * translation_);
}

Eigen::MatrixXd Transform::Matrix() const {
  if (group_ == Group::kSE2) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m.topLeftCorner<2, 2>() = rotation_.topLeftCorner<2, 2>();
    m.topRightCorner<2, 1>() = translation_.head<2>();
    return m;
  }
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

Transform Compose(const Transform& a, const Transform& b) {
  if (a.group() != b.group()) {
    throw GeometryError("cannot compose " + GroupName(a.group()) + " with " +
                        GroupName(b.group()));
  }
  if (a.group() == Group::kSE2) {
    const Eigen::Vector2d t = a.planar_translation() +
                              a.rotation().topLeftCorner<2, 2>() *
                                  b.planar_translation();
    return Transform::Planar(a.angle() + b.angle(), t);
  }
  return Transform(Group::kSE3, 0.0, a.rotation() * b.rotation(),
                   a.translation() + a.rotation() * b.translation());
}

Transform operator*(const Transform& a, const Transform& b) {
  return Compose(a, b);
}

// -------------------------------- Twist ------------------------------------

Twist Twist::Zero(Group group) {
  if (group == Group::kSE2) return Planar(0.0, Eigen::Vector2d::Zero());
  return Spatial(Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero());
}

Twist Twist::Planar(double angular, const Eigen::Vector2d& linear) {
  Twist t;
  t.group = Group::kSE2;
  t.angular = Eigen::VectorXd::Constant(1, angular);
  t.linear = linear;
  return t;
}

Twist Twist::Spatial(const Eigen::Vector3d& angular,
                     const Eigen::Vector3d& linear) {
  Twist t;
  t.group = Group::kSE3;
  t.angular = angular;
  t.linear = linear;
  return t;
}

Twist Twist::FromVector(Group group, const Eigen::VectorXd& stacked) {
  if (group == Group::kSE2) {
    if (stacked.size() != 3) throw GeometryError("SE2 twist needs 3 entries");
    return Planar(stacked(2), stacked.head<2>());
  }
  if (stacked.size() != 6) throw GeometryError("SE3 twist needs 6 entries");
  return Spatial(stacked.tail<3>(), stacked.head<3>());
}

Eigen::VectorXd Twist::Vector() const {
  Eigen::VectorXd v(linear.size() + angular.size());
  v << linear, angular;
  return v;
}

// ------------------------------- SO(3) -------------------------------------

Eigen::Matrix3d Hat(const Eigen::Vector3d& w) {
  Eigen::Matrix3d m;
  m << 0.0, -w.z(), w.y(),  //
      w.z(), 0.0, -w.x(),   //
      -w.y(), w.x(), 0.0;
  return m;
}

Eigen::Vector3d Vee(const Eigen::Matrix3d& m) {
  return Eigen::Vector3d(m(2, 1), m(0, 2), m(1, 0));
}

Eigen::Matrix3d ExpSo3(const Eigen::Vector3d& w) {
  const RodriguesCoefficients k = Coefficients(w.norm());
  const Eigen::Matrix3d omega = Hat(w);
  return Eigen::Matrix3d::Identity() + k.a * omega + k.b * omega * omega;
}

double RotationAngle(const Eigen::Matrix3d& r) {
  const double sin_part = 0.5 * Vee(r - r.transpose()).norm();
  const double cos_part = 0.5 * (r.trace() - 1.0);
  return std::atan2(sin_part, cos_part);
}

Eigen::Vector3d LogSo3(const Eigen::Matrix3d& r) {
  const double theta = RotationAngle(r);
  if (kPi - theta < kLogSingularityBand) {
    throw GeometryError("log map is singular for rotations near pi");
  }
  const Eigen::Vector3d axis_sin = 0.5 * Vee(r - r.transpose());
  if (theta < kSmallAngle) {
    return (1.0 + theta * theta / 6.0) * axis_sin;
  }
  return theta / std::sin(theta) * axis_sin;
}

// -------------------------------- exp/log ----------------------------------

Transform ExpMap(const Twist& twist) {
  if (twist.group == Group::kSE2) {
    const double theta = twist.angular(0);
    const Eigen::Vector2d v = twist.linear.head<2>();
    double a, b;  // sin(t)/t, (1 - cos(t))/t
    if (std::abs(theta) < kSmallAngle) {
      a = 1.0 - theta * theta / 6.0;
      b = 0.5 * theta - theta * theta * theta / 24.0;
    } else {
      const double half = std::sin(0.5 * theta);
      a = std::sin(theta) / theta;
      b = 2.0 * half * half / theta;
    }
    const Eigen::Vector2d t(a * v.x() - b * v.y(), b * v.x() + a * v.y());
    return Transform::Planar(theta, t);
  }
  const Eigen::Vector3d w = twist.angular.head<3>();
  const Eigen::Vector3d v = twist.linear.head<3>();
  const RodriguesCoefficients k = Coefficients(w.norm());
  const Eigen::Matrix3d omega = Hat(w);
  const Eigen::Matrix3d omega2 = omega * omega;
  const Eigen::Matrix3d rot =
      Eigen::Matrix3d::Identity() + k.a * omega + k.b * omega2;
  const Eigen::Matrix3d jac =
      Eigen::Matrix3d::Identity() + k.b * omega + k.c * omega2;
  return Transform(Group::kSE3, 0.0, rot, jac * v);
}

Twist LogMap(const Transform& transform) {
  if (transform.group() == Group::kSE2) {
    const double theta = transform.angle();
    if (kPi - std::abs(theta) < kLogSingularityBand) {
      throw GeometryError("log map is singular for rotations near pi");
    }
    double a, b;
    if (std::abs(theta) < kSmallAngle) {
      a = 1.0 - theta * theta / 6.0;
      b = 0.5 * theta - theta * theta * theta / 24.0;
    } else {
      const double half = std::sin(0.5 * theta);
      a = std::sin(theta) / theta;
      b = 2.0 * half * half / theta;
    }
    // Inverse of [[a, -b], [b, a]].
    const double det = a * a + b * b;
    const Eigen::Vector2d t = transform.planar_translation();
    const Eigen::Vector2d v((a * t.x() + b * t.y()) / det,
                            (-b * t.x() + a * t.y()) / det);
    return Twist::Planar(theta, v);
  }
  const Eigen::Vector3d w = LogSo3(transform.rotation());
  const double theta = w.norm();
  double d;  // (1 - (t/2) cot(t/2)) / t^2
  if (theta < kSmallAngle) {
    d = 1.0 / 12.0 + theta * theta / 720.0;
  } else {
    const double half = 0.5 * theta;
    d = (1.0 - half * std::cos(half) / std::sin(half)) / (theta * theta);
  }
  const Eigen::Matrix3d omega = Hat(w);
  const Eigen::Matrix3d jac_inv =
      Eigen::Matrix3d::Identity() - 0.5 * omega + d * omega * omega;
  return Twist::Spatial(w, jac_inv * transform.translation());
}

}  // namespace mcmppi
