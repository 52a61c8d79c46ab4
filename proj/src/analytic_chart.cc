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

#include "mcmppi/analytic_chart.h"

#include <algorithm>
#include <cmath>

#include "mcmppi/kinematics.h"

namespace mcmppi {
namespace {

// Representative of angle + 2 pi k inside [lower, upper], or the one closest
// to the interval when none fits.
double IntoInterval(double angle, double lower, double upper) {
  const double center = 0.5 * (lower + upper);
  const double a = center + WrapAngle(angle - center);
  if (a >= lower && a <= upper) return a;
  const double alt = a < lower ? a + 2.0 * M_PI : a - 2.0 * M_PI;
  if (alt >= lower && alt <= upper) return alt;
  const double gap = a < lower ? lower - a : a - upper;
  const double alt_gap = alt < lower ? lower - alt : alt - upper;
  return gap <= alt_gap ? a : alt;
}

}  // namespace

Eigen::MatrixXd ManifoldDecoder::DecodeBatch(const Eigen::MatrixXd& z) const {
  Eigen::MatrixXd out(output_dim(), z.cols());
  for (int t = 0; t < z.cols(); ++t) out.col(t) = Decode(z.col(t));
  return out;
}

AnalyticChart::AnalyticChart(const ChainModel& model) : model_(model) {
  if (!model_.planar()) throw ChartError("analytic chart needs a planar model");
  for (int a = 0; a < 2; ++a) {
    const ArmModel& arm = model_.arm(a);
    if (arm.joints.size() != 3) {
      throw ChartError("analytic chart needs three joints per arm");
    }
    ArmIk& ik = arms_[a];
    ik.base_inverse = arm.base.Inverse();
    ik.tool_inverse = arm.tool.Inverse();
    for (int j = 0; j < 3; ++j) {
      ik.offset[j] = arm.joints[j].fixed.angle();
      ik.lower[j] = arm.joints[j].lower;
      ik.upper[j] = arm.joints[j].upper;
    }
    ik.first_link = arm.joints[0].fixed.planar_translation().x();
    ik.l1 = arm.joints[1].fixed.planar_translation().x();
    ik.l2 = arm.joints[2].fixed.planar_translation().x();
    ik.elbow_sign = arm.elbow_sign;
    for (int j = 0; j < 3; ++j) {
      if (arm.joints[j].fixed.planar_translation().y() != 0.0) {
        throw ChartError("analytic chart needs links along the joint x axis");
      }
    }
    if (!(ik.l1 > 0.0 && ik.l2 > 0.0)) {
      throw ChartError("analytic chart needs positive link lengths");
    }
  }
  left_in_tray_ =
      Transform::Planar(0.0, -0.5 * model_.grasp().planar_translation());
}

bool AnalyticChart::SolveArm(const ArmIk& arm, const Transform& ee, double* q) {
  const Transform wrist = arm.base_inverse * ee * arm.tool_inverse;
  const Eigen::Vector2d d =
      wrist.planar_translation() - Eigen::Vector2d(arm.first_link, 0.0);
  double c2 = (d.squaredNorm() - arm.l1 * arm.l1 - arm.l2 * arm.l2) /
              (2.0 * arm.l1 * arm.l2);
  const bool reachable = c2 >= -1.0 && c2 <= 1.0;
  c2 = std::clamp(c2, -1.0, 1.0);
  const double s2 = arm.elbow_sign * std::sqrt(1.0 - c2 * c2);
  const double phi2 = std::atan2(s2, c2);
  const double phi1 = std::atan2(d.y(), d.x()) -
                      std::atan2(arm.l2 * s2, arm.l1 + arm.l2 * c2);
  const double phi3 = wrist.angle() - phi1 - phi2;
  const double phi[3] = {phi1, phi2, phi3};
  for (int j = 0; j < 3; ++j) {
    q[j] = IntoInterval(phi[j] - arm.offset[j], arm.lower[j], arm.upper[j]);
  }
  return reachable;
}

bool AnalyticChart::DecodeImpl(const LatentState& z, Configuration* q) const {
  const Transform tray = Transform::Planar(z(2), Eigen::Vector2d(z(0), z(1)));
  const Transform left = tray * left_in_tray_;
  const Transform right = left * model_.grasp();
  q->resize(6);
  const bool ok_left = SolveArm(arms_[0], left, q->data());
  const bool ok_right = SolveArm(arms_[1], right, q->data() + 3);
  return ok_left && ok_right;
}

Configuration AnalyticChart::DecodeExact(const LatentState& z) const {
  if (z.size() != 3) throw ChartError("analytic chart expects z = (x, y, theta)");
  Configuration q;
  if (!DecodeImpl(z, &q)) throw ChartError("tray pose is out of reach");
  return q;
}

Configuration AnalyticChart::Decode(const LatentState& z) const {
  Configuration q;
  DecodeImpl(z, &q);
  return q;
}

bool AnalyticChart::Reachable(const LatentState& z) const {
  Configuration q;
  return DecodeImpl(z, &q);
}

LatentState AnalyticChart::Encode(const Configuration& q) const {
  const Transform tray = ForwardKinematics(model_, q).tray;
  return Eigen::Vector3d(tray.planar_translation().x(),
                         tray.planar_translation().y(), tray.angle());
}

}  // namespace mcmppi
