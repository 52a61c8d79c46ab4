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

#ifndef MCMPPI_TESTS_TEST_UTIL_H_
#define MCMPPI_TESTS_TEST_UTIL_H_

#include <cmath>
#include <string>

#include <Eigen/Dense>

namespace mcmppi::testing {

inline std::string SourcePath(const std::string& relative) {
  return std::string(MCMPPI_SOURCE_DIR) + "/" + relative;
}

inline std::string PlanarModelPath() {
  return SourcePath("models/planar_dual3r.yaml");
}

inline std::string SpatialModelPath() {
  return SourcePath("models/spatial_dual7.yaml");
}

// End-effector poses (x, y, heading) of the planar model by plain
// trigonometry, independent of the library's transform classes.
struct PlanarEe {
  double x, y, a;
};

inline PlanarEe PlanarArmOracle(const double* q, double base_x,
                                double base_a) {
  const double l[3] = {0.3, 0.3, 0.15};
  double x = base_x, y = 0.0, a = base_a;
  for (int i = 0; i < 3; ++i) {
    a += q[i];
    x += l[i] * std::cos(a);
    y += l[i] * std::sin(a);
  }
  return {x, y, a};
}

inline PlanarEe PlanarLeftOracle(const Eigen::VectorXd& q) {
  return PlanarArmOracle(q.data(), -0.3, 0.0);
}

inline PlanarEe PlanarRightOracle(const Eigen::VectorXd& q) {
  return PlanarArmOracle(q.data() + 3, 0.3, M_PI);
}

// ||h(q)|| of the planar model: norm of the SE(2) log of
// (left * grasp)^-1 * right with grasp {0.4 along x, rotated by pi}.
inline double PlanarResidualOracle(const Eigen::VectorXd& q) {
  const PlanarEe left = PlanarLeftOracle(q);
  const PlanarEe right = PlanarRightOracle(q);
  const double want_x = left.x + 0.4 * std::cos(left.a);
  const double want_y = left.y + 0.4 * std::sin(left.a);
  const double da = std::remainder(right.a - left.a - M_PI, 2.0 * M_PI);
  const double c = std::cos(left.a + M_PI), s = std::sin(left.a + M_PI);
  const double ex = c * (right.x - want_x) + s * (right.y - want_y);
  const double ey = -s * (right.x - want_x) + c * (right.y - want_y);
  double vx = ex, vy = ey;
  if (std::abs(da) > 1e-12) {
    const double half = 0.5 * da;
    const double k = half / std::tan(half);
    vx = k * ex + half * ey;
    vy = -half * ex + k * ey;
  }
  return std::sqrt(vx * vx + vy * vy + da * da);
}

}  // namespace mcmppi::testing

#endif  // MCMPPI_TESTS_TEST_UTIL_H_
