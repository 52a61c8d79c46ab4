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

// Sampling-based MPC over a manifold parameterization: rollouts integrate
// latent velocities, decode every state and score the decoded joints. The
// same machinery with the identity decoder gives joint-space MPPI with an
// equality-constraint penalty.

#ifndef MCMPPI_MPPI_H_
#define MCMPPI_MPPI_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mcmppi/chain_model.h"
#include "mcmppi/decoder.h"
#include "mcmppi/geometry.h"
#include "mcmppi/scene.h"

namespace mcmppi {

enum class SamplingMode { kSingleInstance, kPerStep };
enum class SpaceMode { kLatent, kJointPenalty };
enum class ObstaclePrediction { kFrozen, kExtrapolated };

struct PlannerConfig {
  int samples = 200;   // K
  int horizon = 30;    // T
  double dt = 0.01;    // s
  double lambda = 1.0;
  Eigen::VectorXd sigma;  // diagonal of the noise covariance
  Eigen::MatrixXd r;      // control weight R
  SamplingMode sampling = SamplingMode::kSingleInstance;
  SpaceMode space = SpaceMode::kLatent;
  ObstaclePrediction prediction = ObstaclePrediction::kFrozen;
  double terminal_weight = 10.0;  // multiplier on the tracking term at T
  int threads = 0;                // 0: let the scheduler decide

  // Throws std::invalid_argument on a violated invariant.
  void Validate(int control_dim) const;
};

struct CostWeights {
  double track = 10.0;
  double coll = 100.0;
  double limit = 100.0;
  double neutral = 0.01;
  double constraint = 0.0;     // w_h, joint-penalty mode only
  double margin = 0.02;        // m
  double velocity_limit = 1.0;  // on ||u||, control units
  bool self_collision = true;
  Configuration neutral_posture;
};

// Per-step (or summed) cost terms; `constraint` is the w_h ||h||^2 penalty of
// joint-space planning and stays zero in latent mode.
struct CostBreakdown {
  double track = 0.0;
  double coll = 0.0;
  double reg = 0.0;
  double limit = 0.0;
  double neutral = 0.0;
  double constraint = 0.0;

  double total() const { return track + coll + reg + limit + neutral + constraint; }
  CostBreakdown& operator+=(const CostBreakdown& o);
};

// Planning inputs that change over an episode.
struct PlanningContext {
  Transform goal;
  std::vector<Obstacle> obstacles;
  double time = 0.0;  // scenario time of the current state
};

using ControlSequence = Eigen::MatrixXd;  // T x m, row t is u_t

// Squared tray pose error: position (m^2) plus orientation (rad^2).
double TrackingError(const ChainModel& model, const Configuration& q,
                     const Transform& goal);

CostBreakdown StageCost(const CostWeights& weights, const ChainModel& model,
                        const Eigen::MatrixXd& r, const Configuration& q,
                        const Eigen::VectorXd& u, const Transform& goal,
                        const std::vector<Sphere>& obstacles, SpaceMode space);

// Perturbation of sample k (T x m): one draw repeated over the horizon in
// single-instance mode, T independent draws otherwise. The stream depends
// only on (seed, iteration, k).
Eigen::MatrixXd SamplePerturbation(const PlannerConfig& cfg, int control_dim,
                                   std::uint64_t seed, std::uint64_t iteration,
                                   int k);

struct RolloutResult {
  Eigen::MatrixXd z;  // m x T, z_1..z_T
  Eigen::MatrixXd q;  // n x T, decoded
  CostBreakdown cost;
  double total = 0.0;
};

// z_{t+1} = z_t + (u_t + du_t) dt, decoded and scored for t = 1..T, plus the
// terminal tracking term at T.
RolloutResult Rollout(const PlannerConfig& cfg, const CostWeights& weights,
                      const ChainModel& model, const ManifoldDecoder& decoder,
                      const LatentState& z_c, const ControlSequence& u,
                      const Eigen::MatrixXd& perturbation,
                      const PlanningContext& context);

// Min-shifted softmax of -cost / lambda.
Eigen::VectorXd ImportanceWeights(const Eigen::VectorXd& costs, double lambda);

struct PlanDiagnostics {
  std::uint64_t iteration = 0;
  double min_cost = 0.0;
  double mean_cost = 0.0;
  double ess = 0.0;
  double wall_ms = 0.0;
  LatentState z_star;
  double h_norm = 0.0;
};

struct PlanResult {
  Configuration q_hat;
  LatentState z_star;
  ControlSequence u_star;     // weighted average before the shift
  ControlSequence u_shifted;  // [u*_1, ..., u*_{T-1}, 0]
  PlanDiagnostics diagnostics;
};

// One planning cycle. `iteration` keys the noise streams together with the
// seed; results do not depend on the number of worker threads.
PlanResult PlanStep(const PlannerConfig& cfg, const CostWeights& weights,
                    const ChainModel& model, const ManifoldDecoder& decoder,
                    const LatentState& z_c, const ControlSequence& u_nominal,
                    const PlanningContext& context, std::uint64_t seed,
                    std::uint64_t iteration);

// Joint-space planning: the state is q itself and the w_h penalty applies.
PlanResult VanillaPlanStep(const PlannerConfig& cfg, const CostWeights& weights,
                           const ChainModel& model, const Configuration& q_c,
                           const ControlSequence& u_nominal,
                           const PlanningContext& context, std::uint64_t seed,
                           std::uint64_t iteration);

// Identity map R^n -> R^n used for joint-space planning.
class IdentityDecoder : public ManifoldDecoder {
 public:
  explicit IdentityDecoder(int dim) : dim_(dim) {}
  std::string name() const override { return "identity"; }
  int latent_dim() const override { return dim_; }
  int output_dim() const override { return dim_; }
  Configuration Decode(const LatentState& z) const override { return z; }
  LatentState Encode(const Configuration& q) const override { return q; }

 private:
  int dim_;
};

// JSON line; wall-clock is included only when `with_timing` is set.
std::string DiagnosticsJson(const PlanDiagnostics& d, bool with_timing);

}  // namespace mcmppi

#endif  // MCMPPI_MPPI_H_
