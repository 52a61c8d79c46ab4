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

// Closed-loop kinematic simulation of planner and executor at their own
// rates in simulated time, plus the experiment suites built on it.

#ifndef MCMPPI_HARNESS_H_
#define MCMPPI_HARNESS_H_

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mcmppi/chain_model.h"
#include "mcmppi/decoder.h"
#include "mcmppi/scenario.h"

namespace mcmppi {

enum class EpisodeMode { kMcMppi, kLatentOnly, kVanillaPenalty };
enum class DecoderChoice { kAnalytic, kLearned };

std::string ModeName(EpisodeMode mode);
std::string DecoderName(DecoderChoice choice);
// Parse "mc_mppi" | "latent_only" | "vanilla_penalty" and
// "analytic" | "learned"; throw std::invalid_argument otherwise.
EpisodeMode ParseMode(const std::string& name);
DecoderChoice ParseDecoder(const std::string& name);

class HarnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EpisodeRecord {
  double t = 0.0;
  Configuration q;        // applied configuration after this tick
  LatentState z_star;     // latest planner state
  Configuration q_hat;    // latest planner reference
  Configuration q_star;   // commanded configuration (equals q without lag)
  double h_norm = 0.0;    // ||h(q)||
  double position_error = 0.0;
  double orientation_error = 0.0;
  double clearance = 0.0;  // min sphere gap to any obstacle, +inf without
  bool planned = false;    // a planning cycle ran on this tick
  bool fallback = false;
  // Wall-clock, excluded from the deterministic log.
  double planner_ms = 0.0;
  double executor_ms = 0.0;
};

struct EpisodeOutcome {
  bool success = false;
  double time = 0.0;   // of the final record
  std::string reason;  // "success" | "constraint_break" | "collision" | "timeout"
};

struct EpisodeLog {
  std::string scenario;
  EpisodeMode mode = EpisodeMode::kMcMppi;
  std::string decoder;
  std::uint64_t seed = 0;
  std::vector<EpisodeRecord> records;
  EpisodeOutcome outcome;
  int fallback_count = 0;

  double TimeAveragedH() const;
  double MaxH() const;
  // Time of success, or the scenario's max time for a failed episode.
  double ConvergenceTime(double max_time) const;
  // Mean norm of the third difference of q_hat over planning cycles,
  // divided by dt^3.
  double MeanJerk(double plan_dt) const;
};

// Joint configuration with the given tray pose, by damped Gauss-Newton on
// [h(q); tray error] from `seed`. Throws HarnessError if it does not reach
// 1e-12 inside the joint bounds.
Configuration SolveTrayPose(const ChainModel& model, const Transform& tray,
                            const Configuration& seed);

// The decoder must match the model; analytic decoders only exist for the
// planar model. A null decoder is allowed for vanilla_penalty.
EpisodeLog RunEpisode(const ScenarioSpec& spec, const ChainModel& model,
                      EpisodeMode mode, const ManifoldDecoder* decoder);

struct CellSummary {
  EpisodeMode mode = EpisodeMode::kMcMppi;
  int trials = 0;
  int successes = 0;
  std::vector<double> time_avg_h;
  std::vector<double> max_h;
  std::vector<double> convergence_time;
  std::vector<std::string> reasons;
  std::vector<double> mean_jerk;
  // Wall-clock percentiles, reported separately from the deterministic part.
  double planner_p50_ms = 0.0;
  double planner_p99_ms = 0.0;
  double executor_p50_ms = 0.0;
  double executor_p99_ms = 0.0;

  double success_rate() const { return trials ? double(successes) / trials : 0.0; }
};

struct ExperimentReport {
  std::string scenario;
  std::uint64_t seed_base = 0;
  std::vector<CellSummary> cells;
};

// Aggregate from retained logs; RunExperiment uses exactly this.
ExperimentReport SummarizeLogs(const std::string& scenario, std::uint64_t seed_base,
                               const std::vector<EpisodeMode>& modes,
                               const std::vector<std::vector<EpisodeLog>>& logs,
                               double max_time, double plan_dt);

// Runs trial t of every mode on SampleTrial(spec, seed_base, t). When
// `logs` is given it receives logs[mode][trial].
ExperimentReport RunExperiment(const ScenarioSpec& spec, const ChainModel& model,
                               const std::vector<EpisodeMode>& modes,
                               const ManifoldDecoder* decoder, int trials,
                               std::uint64_t seed_base,
                               std::vector<std::vector<EpisodeLog>>* logs = nullptr);

struct SamplingComparison {
  std::vector<double> single_instance_time;
  std::vector<double> per_step_time;
  std::vector<double> single_instance_h;
  std::vector<double> per_step_h;
  std::vector<double> single_instance_jerk;
  std::vector<double> per_step_jerk;
  std::vector<bool> single_instance_success;
  std::vector<bool> per_step_success;

  double MedianTimeRatio() const;  // per_step / single_instance
  int SingleInstanceSmoother() const;  // seeds with lower jerk
};

// Paired seeds: trial t of both sampling modes uses seed_base + t.
SamplingComparison CompareSamplingModes(const ScenarioSpec& spec,
                                        const ChainModel& model,
                                        const ManifoldDecoder& decoder, int seeds,
                                        std::uint64_t seed_base);

// JSON lines: a header line, one line per record and an outcome line. The
// wall-clock fields are written only with `with_timing`.
std::string EpisodeLogJson(const EpisodeLog& log, bool with_timing);
// Inverse of EpisodeLogJson; wall-clock fields default to zero when absent.
// Throws HarnessError on malformed input.
EpisodeLog ParseEpisodeLogJson(const std::string& text);
std::string ExperimentReportJson(const ExperimentReport& report);
std::string ExperimentTimingJson(const ExperimentReport& report);
std::string SamplingComparisonJson(const SamplingComparison& c);

// CSV series written to out_dir: tracking.csv (t, position_error,
// orientation_error), constraint.csv (t, h_norm) and timing.csv (t,
// planner_ms, executor_ms). Throws HarnessError if a file cannot be written.
std::vector<std::string> EmitPlots(const EpisodeLog& log, const std::string& out_dir);

// Loads the decoder for a choice: the analytic chart, or VAE parameters
// from `params_path`.
std::unique_ptr<ManifoldDecoder> MakeDecoder(DecoderChoice choice,
                                             const ChainModel& model,
                                             const std::string& params_path);

double Percentile(std::vector<double> values, double p);

}  // namespace mcmppi

#endif  // MCMPPI_HARNESS_H_
