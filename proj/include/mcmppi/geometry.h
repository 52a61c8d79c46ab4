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

#ifndef MCMPPI_GEOMETRY_H_
#define MCMPPI_GEOMETRY_H_

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mcmppi {

enum class Group { kSE2, kSE3 };

std::string GroupName(Group group);

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Below this rotation angle (rad) exp/log switch to Taylor forms.
inline constexpr double kSmallAngle = 1e-7;
// log() refuses rotations whose angle is within this distance of pi.
inline constexpr double kLogSingularityBand = 1e-6;

struct Twist;

// Rigid transform in SE(2) or SE(3).
//
// SE(2) elements store a scalar heading wrapped to (-pi, pi]; their
// rotation() is the 3x3 embedding with a unit z row so the same accessors
// work for both groups. Translations of SE(2) elements have z = 0.
class Transform {
 public:
  Transform();  // SE(3) identity

  static Transform Identity(Group group);
  static Transform Planar(double angle, const Eigen::Vector2d& translation);
  // `rotation` must be orthonormal with det +1 (checked to 1e-9).
  static Transform Spatial(const Eigen::Matrix3d& rotation,
                           const Eigen::Vector3d& translation);
  // Homogeneous 3x3 (SE2) or 4x4 (SE3) matrix.
  static Transform FromMatrix(const Eigen::MatrixXd& homogeneous);

  Group group() const { return group_; }
  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }
  // Heading of an SE(2) element. Throws for SE(3).
  double angle() const;
  Eigen::Vector2d planar_translation() const { return translation_.head<2>(); }

  Transform Inverse() const;
  Eigen::MatrixXd Matrix() const;

 private:
  Transform(Group group, double angle, const Eigen::Matrix3d& rotation,
            const Eigen::Vector3d& translation);

  friend Transform Compose(const Transform& a, const Transform& b);
  friend Transform ExpMap(const Twist& twist);

  Group group_;
  double angle_;
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
};

// Lie algebra element. For SE(2) angular has one entry and linear two;
// for SE(3) both have three.
struct Twist {
  Group group = Group::kSE3;
  Eigen::VectorXd angular;
  Eigen::VectorXd linear;

  static Twist Zero(Group group);
  static Twist Planar(double angular, const Eigen::Vector2d& linear);
  static Twist Spatial(const Eigen::Vector3d& angular,
                       const Eigen::Vector3d& linear);
  // Stacked [linear; angular]: 3 entries for SE(2), 6 for SE(3).
  static Twist FromVector(Group group, const Eigen::VectorXd& stacked);
  Eigen::VectorXd Vector() const;
};

// Group product a * b. Throws GeometryError on group mismatch.
Transform Compose(const Transform& a, const Transform& b);
Transform operator*(const Transform& a, const Transform& b);

Transform ExpMap(const Twist& twist);
// Throws GeometryError when the rotation angle is within 1e-6 of pi.
Twist LogMap(const Transform& transform);

// SO(3) helpers shared by the kinematics code.
Eigen::Matrix3d Hat(const Eigen::Vector3d& w);
Eigen::Vector3d Vee(const Eigen::Matrix3d& skew);
Eigen::Matrix3d ExpSo3(const Eigen::Vector3d& w);
// Angle-axis vector of `rotation`; throws near pi like LogMap.
Eigen::Vector3d LogSo3(const Eigen::Matrix3d& rotation);
double RotationAngle(const Eigen::Matrix3d& rotation);

// Wraps an angle to (-pi, pi].
double WrapAngle(double angle);

Eigen::Matrix3d RotX(double angle);
Eigen::Matrix3d RotY(double angle);
Eigen::Matrix3d RotZ(double angle);

}  // namespace mcmppi

#endif  // MCMPPI_GEOMETRY_H_
