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

#include "mcmppi/harness.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "mcmppi/analytic_chart.h"
#include "mcmppi/executor.h"
#include "mcmppi/file_format.h"
#include "mcmppi/kinematics.h"
#include "mcmppi/mppi.h"
#include "mcmppi/vae.h"

namespace mcmppi {
namespace {

using Clock = std::chrono::steady_clock;
using Json = nlohmann::ordered_json;

constexpr double kStartTolerance = 1e-12;
constexpr int kStartIterations = 100;

double Millis(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

Json Finite(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

Json VectorJson(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(Finite(v(i)));
  return a;
}

double Mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double StdDev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

double Median(std::vector<double> v) { return Percentile(std::move(v), 50.0); }

// Planner settings for one planning space.
PlannerConfig PlannerFor(const ScenarioSpec& spec, const NoiseSettings& noise,
                         int dim, SpaceMode space) {
  PlannerConfig cfg = spec.planner;
  cfg.space = space;
  cfg.sigma = noise.sigma.size() == 1
                  ? Eigen::VectorXd::Constant(dim, noise.sigma(0))
                  : noise.sigma;
  cfg.r = noise.r * Eigen::MatrixXd::Identity(dim, dim);
  cfg.Validate(dim);
  return cfg;
}

struct Errors {
  double position;
  double orientation;
};

Errors TrayErrors(const ChainModel& model, const Configuration& q,
                  const Transform& goal) {
  const Eigen::VectorXd e = PoseError(ForwardKinematics(model, q).tray, goal);
  const int lin = model.planar() ? 2 : 3;
  return {e.head(lin).norm(), e.tail(e.size() - lin).norm()};
}

double Clearance(const ChainModel& model, const Configuration& q,
                 const std::vector<Sphere>& obstacles) {
  double best = std::numeric_limits<double>::infinity();
  if (obstacles.empty()) return best;
  const std::vector<Eigen::Vector3d> centers = SphereCenters(model, q);
  for (std::size_t i = 0; i < centers.size(); ++i) {
    for (const Sphere& o : obstacles) {
      best = std::min(best, (centers[i] - o.center).norm() -
                                model.spheres()[i].radius - o.radius);
    }
  }
  return best;
}

// Fills the deterministic measurements of a record and classifies it.
// Returns the failure or success reason, or an empty string to continue.
std::string Measure(const ScenarioSpec& spec, const ChainModel& model,
                    EpisodeRecord* rec) {
  double h;
  try {
    h = Constraint(model, rec->q).norm();
  } catch (const GeometryError&) {
    h = std::numeric_limits<double>::infinity();
  }
  rec->h_norm = h;
  const Errors e = TrayErrors(model, rec->q, spec.goal);
  rec->position_error = e.position;
  rec->orientation_error = e.orientation;
  rec->clearance = Clearance(model, rec->q, ObstaclesAt(spec.obstacles, rec->t));
  if (rec->clearance < 0.0) return "collision";
  if (!(rec->h_norm <= spec.break_limit)) return "constraint_break";
  if (e.position < spec.success_position &&
      e.orientation < spec.success_orientation) {
    return "success";
  }
  return "";
}

}  // namespace

std::string ModeName(EpisodeMode mode) {
  switch (mode) {
    case EpisodeMode::kMcMppi:
      return "mc_mppi";
    case EpisodeMode::kLatentOnly:
      return "latent_only";
    case EpisodeMode::kVanillaPenalty:
      return "vanilla_penalty";
  }
  return "";
}

std::string DecoderName(DecoderChoice choice) {
  return choice == DecoderChoice::kAnalytic ? "analytic" : "learned";
}

EpisodeMode ParseMode(const std::string& name) {
  if (name == "mc_mppi") return EpisodeMode::kMcMppi;
  if (name == "latent_only") return EpisodeMode::kLatentOnly;
  if (name == "vanilla_penalty") return EpisodeMode::kVanillaPenalty;
  throw std::invalid_argument("unknown mode '" + name + "'");
}

DecoderChoice ParseDecoder(const std::string& name) {
  if (name == "analytic") return DecoderChoice::kAnalytic;
  if (name == "learned") return DecoderChoice::kLearned;
  throw std::invalid_argument("unknown decoder '" + name + "'");
}

double Percentile(std::vector<double> values, double p) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double rank = std::clamp(p, 0.0, 100.0) / 100.0 * (values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (rank - lo) * (values[hi] - values[lo]);
}

double EpisodeLog::TimeAveragedH() const {
  if (records.empty()) return 0.0;
  double s = 0.0;
  for (const EpisodeRecord& r : records) s += r.h_norm;
  return s / records.size();
}

double EpisodeLog::MaxH() const {
  double m = 0.0;
  for (const EpisodeRecord& r : records) m = std::max(m, r.h_norm);
  return m;
}

double EpisodeLog::ConvergenceTime(double max_time) const {
  return outcome.success ? outcome.time : max_time;
}

double EpisodeLog::MeanJerk(double plan_dt) const {
  std::vector<const Configuration*> refs;
  for (const EpisodeRecord& r : records) {
    if (r.planned) refs.push_back(&r.q_hat);
  }
  if (refs.size() < 4) return 0.0;
  double s = 0.0;
  for (std::size_t i = 3; i < refs.size(); ++i) {
    s += (*refs[i] - 3.0 * *refs[i - 1] + 3.0 * *refs[i - 2] - *refs[i - 3]).norm();
  }
  return s / (refs.size() - 3) / (plan_dt * plan_dt * plan_dt);
}

Configuration SolveTrayPose(const ChainModel& model, const Transform& tray,
                            const Configuration& seed) {
  const int n = model.joint_count();
  const int l = model.constraint_dim();
  const int k = model.task_dim();
  Configuration q = seed;
  for (int it = 0; it <= kStartIterations; ++it) {
    Eigen::VectorXd r(l + k);
    r << Constraint(model, q).values,
        PoseError(ForwardKinematics(model, q).tray, tray);
    if (r.norm() <= kStartTolerance) {
      if (!model.WithinBounds(q)) {
        throw HarnessError("start pose is only reachable outside the joint bounds");
      }
      return q;
    }
    if (it == kStartIterations) break;
    Eigen::MatrixXd jac(l + k, n);
    jac << ConstraintJacobian(model, q),
        TaskJacobian(model, q, TaskFrame::kTrayCenter);
    const Eigen::MatrixXd gram =
        jac * jac.transpose() + 1e-10 * Eigen::MatrixXd::Identity(l + k, l + k);
    q -= jac.transpose() * gram.ldlt().solve(r);
  }
  throw HarnessError("no joint configuration found for the start pose");
}

EpisodeLog RunEpisode(const ScenarioSpec& spec, const ChainModel& model,
                      EpisodeMode mode, const ManifoldDecoder* decoder) {
  spec.Validate();
  if (spec.start.group() != model.group() || spec.goal.group() != model.group()) {
    throw HarnessError("scenario poses do not match the model group");
  }
  const bool vanilla = mode == EpisodeMode::kVanillaPenalty;
  if (!vanilla) {
    if (decoder == nullptr) throw HarnessError(ModeName(mode) + " needs a decoder");
    if (decoder->output_dim() != model.joint_count()) {
      throw HarnessError("decoder output does not match the model");
    }
  }
  const int n = model.joint_count();
  const int ratio =
      static_cast<int>(std::lround(spec.planner.dt / spec.executor.dt));
  const long ticks = std::lround(spec.max_time / spec.executor.dt);

  PlannerConfig planner;
  if (vanilla) {
    planner = PlannerFor(spec, spec.joint_noise, n, SpaceMode::kJointPenalty);
  } else {
    const NoiseSettings& noise =
        decoder->name() == "analytic" ? spec.analytic_noise : spec.learned_noise;
    planner = PlannerFor(spec, noise, decoder->latent_dim(), SpaceMode::kLatent);
  }
  CostWeights weights = spec.costs;
  weights.velocity_limit = vanilla ? spec.joint_noise.velocity_limit
                           : decoder->name() == "analytic"
                               ? spec.analytic_noise.velocity_limit
                               : spec.learned_noise.velocity_limit;
  if (weights.neutral_posture.size() == 0) weights.neutral_posture = model.neutral();

  EpisodeLog log;
  log.scenario = spec.name;
  log.mode = mode;
  log.decoder = vanilla ? "identity" : decoder->name();
  log.seed = spec.seed;

  Configuration q = SolveTrayPose(model, spec.start, model.home());
  LatentState z = vanilla ? q : decoder->Encode(q);
  Configuration q_hat = q;
  Configuration command = q;
  const double lag_gain =
      spec.tracking_lag > 0.0 ? std::min(1.0, spec.executor.dt / spec.tracking_lag) : 1.0;
  ControlSequence u =
      ControlSequence::Zero(planner.horizon, vanilla ? n : decoder->latent_dim());
  ExecutorState exec_state{q, 0};
  PlanningContext context{spec.goal, spec.obstacles, 0.0};

  EpisodeRecord rec;
  rec.t = 0.0;
  rec.q = q;
  rec.z_star = z;
  rec.q_hat = q_hat;
  rec.q_star = q;
  std::string reason = Measure(spec, model, &rec);
  log.records.push_back(rec);

  std::uint64_t iteration = 0;
  for (long i = 0; reason.empty() && i < ticks; ++i) {
    const double t = i * spec.executor.dt;
    EpisodeRecord next;
    next.t = (i + 1) * spec.executor.dt;
    if (i % ratio == 0) {
      context.time = t;
      const auto t0 = Clock::now();
      PlanResult plan =
          vanilla ? VanillaPlanStep(planner, weights, model, q, u, context,
                                    spec.seed, iteration)
                  : PlanStep(planner, weights, model, *decoder, z, u, context,
                             spec.seed, iteration);
      next.planner_ms = Millis(t0, Clock::now());
      ++iteration;
      z = plan.z_star;
      q_hat = plan.q_hat;
      u = plan.u_shifted;
      next.planned = true;
      if (mode != EpisodeMode::kMcMppi) command = q_hat;
    }
    if (mode == EpisodeMode::kMcMppi) {
      const Transform task_goal = ForwardKinematics(model, q_hat).tray;
      const auto t0 = Clock::now();
      const ExecutionResult out =
          ExecuteStep(spec.executor, model, &exec_state, q, q_hat, task_goal);
      next.executor_ms = Millis(t0, Clock::now());
      next.fallback = out.report.fallback;
      command = out.q_star;
    }
    q = lag_gain < 1.0 ? Configuration(q + lag_gain * (command - q)) : command;
    next.q = q;
    next.z_star = z;
    next.q_hat = q_hat;
    next.q_star = command;
    reason = Measure(spec, model, &next);
    log.records.push_back(std::move(next));
  }
  log.fallback_count = exec_state.fallback_count;
  log.outcome.time = log.records.back().t;
  log.outcome.reason = reason.empty() ? "timeout" : reason;
  log.outcome.success = reason == "success";
  return log;
}

ExperimentReport SummarizeLogs(const std::string& scenario, std::uint64_t seed_base,
                               const std::vector<EpisodeMode>& modes,
                               const std::vector<std::vector<EpisodeLog>>& logs,
                               double max_time, double plan_dt) {
  ExperimentReport report;
  report.scenario = scenario;
  report.seed_base = seed_base;
  for (std::size_t m = 0; m < modes.size(); ++m) {
    CellSummary cell;
    cell.mode = modes[m];
    std::vector<double> planner_ms, executor_ms;
    for (const EpisodeLog& log : logs.at(m)) {
      ++cell.trials;
      if (log.outcome.success) ++cell.successes;
      cell.time_avg_h.push_back(log.TimeAveragedH());
      cell.max_h.push_back(log.MaxH());
      cell.convergence_time.push_back(log.ConvergenceTime(max_time));
      cell.reasons.push_back(log.outcome.reason);
      cell.mean_jerk.push_back(log.MeanJerk(plan_dt));
      for (const EpisodeRecord& r : log.records) {
        if (r.planned) planner_ms.push_back(r.planner_ms);
        if (cell.mode == EpisodeMode::kMcMppi && r.t > 0.0) {
          executor_ms.push_back(r.executor_ms);
        }
      }
    }
    cell.planner_p50_ms = Percentile(planner_ms, 50.0);
    cell.planner_p99_ms = Percentile(planner_ms, 99.0);
    cell.executor_p50_ms = Percentile(executor_ms, 50.0);
    cell.executor_p99_ms = Percentile(executor_ms, 99.0);
    report.cells.push_back(std::move(cell));
  }
  return report;
}

ExperimentReport RunExperiment(const ScenarioSpec& spec, const ChainModel& model,
                               const std::vector<EpisodeMode>& modes,
                               const ManifoldDecoder* decoder, int trials,
                               std::uint64_t seed_base,
                               std::vector<std::vector<EpisodeLog>>* logs) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  std::vector<std::vector<EpisodeLog>> all(modes.size());
  for (int t = 0; t < trials; ++t) {
    const ScenarioSpec trial = SampleTrial(spec, seed_base, t);
    for (std::size_t m = 0; m < modes.size(); ++m) {
      all[m].push_back(RunEpisode(trial, model, modes[m], decoder));
    }
  }
  ExperimentReport report = SummarizeLogs(spec.name, seed_base, modes, all,
                                          spec.max_time, spec.planner.dt);
  if (logs != nullptr) *logs = std::move(all);
  return report;
}

double SamplingComparison::MedianTimeRatio() const {
  const double single = Median(single_instance_time);
  return single > 0.0 ? Median(per_step_time) / single
                      : std::numeric_limits<double>::infinity();
}

int SamplingComparison::SingleInstanceSmoother() const {
  int count = 0;
  for (std::size_t i = 0; i < single_instance_jerk.size(); ++i) {
    if (single_instance_jerk[i] < per_step_jerk[i]) ++count;
  }
  return count;
}

SamplingComparison CompareSamplingModes(const ScenarioSpec& spec,
                                        const ChainModel& model,
                                        const ManifoldDecoder& decoder, int seeds,
                                        std::uint64_t seed_base) {
  if (seeds < 1) throw std::invalid_argument("seeds must be >= 1");
  SamplingComparison c;
  for (int t = 0; t < seeds; ++t) {
    ScenarioSpec trial = SampleTrial(spec, seed_base, t);
    for (SamplingMode sampling :
         {SamplingMode::kSingleInstance, SamplingMode::kPerStep}) {
      trial.planner.sampling = sampling;
      const EpisodeLog log = RunEpisode(trial, model, EpisodeMode::kMcMppi, &decoder);
      const bool single = sampling == SamplingMode::kSingleInstance;
      (single ? c.single_instance_time : c.per_step_time)
          .push_back(log.ConvergenceTime(trial.max_time));
      (single ? c.single_instance_h : c.per_step_h).push_back(log.TimeAveragedH());
      (single ? c.single_instance_jerk : c.per_step_jerk)
          .push_back(log.MeanJerk(trial.planner.dt));
      (single ? c.single_instance_success : c.per_step_success)
          .push_back(log.outcome.success);
    }
  }
  return c;
}

std::string EpisodeLogJson(const EpisodeLog& log, bool with_timing) {
  std::ostringstream out;
  Json header;
  header["scenario"] = log.scenario;
  header["mode"] = ModeName(log.mode);
  header["decoder"] = log.decoder;
  header["seed"] = log.seed;
  header["records"] = log.records.size();
  out << header.dump() << '\n';
  for (const EpisodeRecord& r : log.records) {
    Json j;
    j["t"] = r.t;
    j["q"] = VectorJson(r.q);
    j["z_star"] = VectorJson(r.z_star);
    j["q_hat"] = VectorJson(r.q_hat);
    j["q_star"] = VectorJson(r.q_star);
    j["h_norm"] = Finite(r.h_norm);
    j["position_error"] = r.position_error;
    j["orientation_error"] = r.orientation_error;
    j["clearance"] = Finite(r.clearance);
    j["planned"] = r.planned;
    j["fallback"] = r.fallback;
    if (with_timing) {
      j["planner_ms"] = r.planner_ms;
      j["executor_ms"] = r.executor_ms;
    }
    out << j.dump() << '\n';
  }
  Json outcome;
  outcome["outcome"] = log.outcome.reason;
  outcome["success"] = log.outcome.success;
  outcome["t"] = log.outcome.time;
  outcome["fallbacks"] = log.fallback_count;
  out << outcome.dump() << '\n';
  return out.str();
}

EpisodeLog ParseEpisodeLogJson(const std::string& text) {
  auto vec = [](const Json& a) {
    Eigen::VectorXd v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      v(i) = a[i].is_null() ? std::numeric_limits<double>::quiet_NaN()
                            : a[i].get<double>();
    }
    return v;
  };
  auto number = [](const Json& v) {
    return v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
  };
  std::istringstream in(text);
  std::string line;
  EpisodeLog log;
  bool header = false;
  bool outcome = false;
  try {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const Json j = Json::parse(line);
      if (!header) {
        log.scenario = j.at("scenario").get<std::string>();
        log.mode = ParseMode(j.at("mode").get<std::string>());
        log.decoder = j.at("decoder").get<std::string>();
        log.seed = j.at("seed").get<std::uint64_t>();
        header = true;
      } else if (j.contains("outcome")) {
        log.outcome.reason = j.at("outcome").get<std::string>();
        log.outcome.success = j.at("success").get<bool>();
        log.outcome.time = j.at("t").get<double>();
        log.fallback_count = j.at("fallbacks").get<int>();
        outcome = true;
      } else {
        EpisodeRecord r;
        r.t = j.at("t").get<double>();
        r.q = vec(j.at("q"));
        r.z_star = vec(j.at("z_star"));
        r.q_hat = vec(j.at("q_hat"));
        r.q_star = vec(j.at("q_star"));
        r.h_norm = number(j.at("h_norm"));
        r.position_error = j.at("position_error").get<double>();
        r.orientation_error = j.at("orientation_error").get<double>();
        r.clearance = number(j.at("clearance"));
        r.planned = j.at("planned").get<bool>();
        r.fallback = j.at("fallback").get<bool>();
        if (j.contains("planner_ms")) r.planner_ms = j["planner_ms"].get<double>();
        if (j.contains("executor_ms")) r.executor_ms = j["executor_ms"].get<double>();
        log.records.push_back(std::move(r));
      }
    }
  } catch (const std::exception& e) {
    throw HarnessError(std::string("malformed episode log: ") + e.what());
  }
  if (!header || !outcome) throw HarnessError("episode log is incomplete");
  return log;
}

std::string ExperimentReportJson(const ExperimentReport& report) {
  Json j;
  j["scenario"] = report.scenario;
  j["seed_base"] = report.seed_base;
  Json cells = Json::array();
  for (const CellSummary& c : report.cells) {
    Json cell;
    cell["mode"] = ModeName(c.mode);
    cell["trials"] = c.trials;
    cell["successes"] = c.successes;
    cell["success_rate"] = c.success_rate();
    cell["time_avg_h_mean"] = Finite(Mean(c.time_avg_h));
    cell["time_avg_h_std"] = Finite(StdDev(c.time_avg_h));
    cell["convergence_time_mean"] = Mean(c.convergence_time);
    cell["convergence_time_std"] = StdDev(c.convergence_time);
    Json trials = Json::array();
    for (int i = 0; i < c.trials; ++i) {
      trials.push_back({{"time_avg_h", Finite(c.time_avg_h[i])},
                        {"max_h", Finite(c.max_h[i])},
                        {"convergence_time", c.convergence_time[i]},
                        {"outcome", c.reasons[i]},
                        {"mean_jerk", Finite(c.mean_jerk[i])}});
    }
    cell["trials_detail"] = std::move(trials);
    cells.push_back(std::move(cell));
  }
  j["cells"] = std::move(cells);
  return j.dump(2) + "\n";
}

std::string ExperimentTimingJson(const ExperimentReport& report) {
  Json j;
  j["scenario"] = report.scenario;
  Json cells = Json::array();
  for (const CellSummary& c : report.cells) {
    cells.push_back({{"mode", ModeName(c.mode)},
                     {"planner_p50_ms", c.planner_p50_ms},
                     {"planner_p99_ms", c.planner_p99_ms},
                     {"executor_p50_ms", c.executor_p50_ms},
                     {"executor_p99_ms", c.executor_p99_ms}});
  }
  j["cells"] = std::move(cells);
  return j.dump(2) + "\n";
}

std::string SamplingComparisonJson(const SamplingComparison& c) {
  auto array = [](const auto& v) {
    Json a = Json::array();
    for (auto x : v) {
      if constexpr (std::is_same_v<std::decay_t<decltype(x)>, bool>) {
        a.push_back(static_cast<bool>(x));
      } else {
        a.push_back(Finite(x));
      }
    }
    return a;
  };
  Json j;
  j["median_time_ratio"] = Finite(c.MedianTimeRatio());
  j["single_instance_smoother"] = c.SingleInstanceSmoother();
  j["single_instance"] = {{"convergence_time", array(c.single_instance_time)},
                          {"time_avg_h", array(c.single_instance_h)},
                          {"mean_jerk", array(c.single_instance_jerk)},
                          {"success", array(c.single_instance_success)}};
  j["per_step"] = {{"convergence_time", array(c.per_step_time)},
                   {"time_avg_h", array(c.per_step_h)},
                   {"mean_jerk", array(c.per_step_jerk)},
                   {"success", array(c.per_step_success)}};
  return j.dump(2) + "\n";
}

std::vector<std::string> EmitPlots(const EpisodeLog& log, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const std::vector<std::pair<std::string, std::string>> files = {
      {"tracking.csv", "t,position_error,orientation_error"},
      {"constraint.csv", "t,h_norm"},
      {"timing.csv", "t,planned,planner_ms,executor_ms"}};
  std::vector<std::string> written;
  for (std::size_t f = 0; f < files.size(); ++f) {
    const std::string path = (fs::path(out_dir) / files[f].first).string();
    std::ofstream out(path);
    if (!out) throw HarnessError("cannot write '" + path + "'");
    out.precision(17);
    out << files[f].second << '\n';
    for (const EpisodeRecord& r : log.records) {
      out << r.t << ',';
      if (f == 0) {
        out << r.position_error << ',' << r.orientation_error;
      } else if (f == 1) {
        out << r.h_norm;
      } else {
        out << (r.planned ? 1 : 0) << ',' << r.planner_ms << ',' << r.executor_ms;
      }
      out << '\n';
    }
    if (!out) throw HarnessError("cannot write '" + path + "'");
    written.push_back(path);
  }
  return written;
}

std::unique_ptr<ManifoldDecoder> MakeDecoder(DecoderChoice choice,
                                             const ChainModel& model,
                                             const std::string& params_path) {
  if (choice == DecoderChoice::kAnalytic) {
    try {
      return std::make_unique<AnalyticChart>(model);
    } catch (const ChartError& e) {
      throw HarnessError(std::string("analytic decoder: ") + e.what());
    }
  }
  VaeParams params;
  try {
    params = LoadParams(params_path);
  } catch (const FileFormatError& e) {
    throw HarnessError(std::string("learned decoder: ") + e.what());
  }
  if (params.input_dim != model.joint_count() ||
      params.latent_dim != model.manifold_dim()) {
    throw HarnessError("learned decoder does not match the model");
  }
  return std::make_unique<LearnedDecoder>(std::move(params));
}

}  // namespace mcmppi
