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

// Exact chart of the planar dual 3R manifold: z = tray pose (x, y, theta),
// decoded by closed-form inverse kinematics of each arm.

#ifndef MCMPPI_ANALYTIC_CHART_H_
#define MCMPPI_ANALYTIC_CHART_H_

#include <stdexcept>

#include "mcmppi/chain_model.h"
#include "mcmppi/decoder.h"

namespace mcmppi {

class ChartError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AnalyticChart : public ManifoldDecoder {
 public:
  // Requires a planar model with three joints per arm.
  explicit AnalyticChart(const ChainModel& model);

  std::string name() const override { return "analytic"; }
  int latent_dim() const override { return 3; }
  int output_dim() const override { return 6; }

  // Throws ChartError when either wrist is out of reach.
  Configuration DecodeExact(const LatentState& z) const;
  // Like DecodeExact, but an unreachable wrist is replaced by the stretched
  // (or folded) arm pointing at it.
  Configuration Decode(const LatentState& z) const override;
  // Tray pose of q by forward kinematics.
  LatentState Encode(const Configuration& q) const override;

  bool Reachable(const LatentState& z) const;

 private:
  struct ArmIk {
    Transform base_inverse;
    Transform tool_inverse;
    double first_link;
    double l1;
    double l2;
    double offset[3];
    double lower[3];
    double upper[3];
    int elbow_sign;
  };

  // Joint angles of one arm for an end-effector pose; returns false if the
  // wrist is out of reach (the output is then saturated).
  static bool SolveArm(const ArmIk& arm, const Transform& ee, double* q);
  bool DecodeImpl(const LatentState& z, Configuration* q) const;

  ChainModel model_;
  ArmIk arms_[2];
  Transform left_in_tray_;
};

}  // namespace mcmppi

#endif  // MCMPPI_ANALYTIC_CHART_H_
