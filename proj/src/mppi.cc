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

#include "mcmppi/mppi.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <tbb/blocked_range.h>
#include <tbb/info.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include "json.hpp"
#include "mcmppi/kinematics.h"

namespace mcmppi {
namespace {

double Hinge(double x) { return x > 0.0 ? x : 0.0; }

// Squared orientation error; rotations too close to pi for the log are
// charged as pi^2.
double SquaredPoseError(const Transform& current, const Transform& goal) {
  try {
    return PoseError(current, goal).squaredNorm();
  } catch (const GeometryError&) {
    return (current.translation() - goal.translation()).squaredNorm() +
           M_PI * M_PI;
  }
}

double SquaredResidual(const ChainModel& model, const Configuration& q) {
  try {
    return Constraint(model, q).values.squaredNorm();
  } catch (const GeometryError&) {
    return M_PI * M_PI;
  }
}

double SphereClearancePenalty(const Eigen::Vector3d& a, double ra,
                              const Eigen::Vector3d& b, double rb,
                              double margin) {
  const double gap = (a - b).norm() - ra - rb;
  const double v = Hinge(margin - gap);
  return v * v;
}

}  // namespace

void PlannerConfig::Validate(int control_dim) const {
  if (samples < 1) throw std::invalid_argument("planner: samples must be >= 1");
  if (horizon < 1) throw std::invalid_argument("planner: horizon must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("planner: dt must be > 0");
  if (!(lambda > 0.0)) throw std::invalid_argument("planner: lambda must be > 0");
  if (sigma.size() != control_dim || (sigma.array() < 0.0).any() ||
      !sigma.allFinite()) {
    throw std::invalid_argument(
        "planner: sigma needs one nonnegative entry per control dimension");
  }
  if (r.rows() != control_dim || r.cols() != control_dim) {
    throw std::invalid_argument("planner: R must be square in the control dim");
  }
  if (control_dim > 0 &&
      (r - r.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("planner: R must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r, Eigen::EigenvaluesOnly);
  if (control_dim > 0 && eig.eigenvalues().minCoeff() < -1e-12) {
    throw std::invalid_argument("planner: R must be positive semidefinite");
  }
  if (!(terminal_weight >= 0.0)) {
    throw std::invalid_argument("planner: terminal weight must be >= 0");
  }
  if (threads < 0) throw std::invalid_argument("planner: threads must be >= 0");
}

CostBreakdown& CostBreakdown::operator+=(const CostBreakdown& o) {
  track += o.track;
  coll += o.coll;
  reg += o.reg;
  limit += o.limit;
  neutral += o.neutral;
  constraint += o.constraint;
  return *this;
}

double TrackingError(const ChainModel& model, const Configuration& q,
                     const Transform& goal) {
  return SquaredPoseError(ForwardKinematics(model, q).tray, goal);
}

CostBreakdown StageCost(const CostWeights& weights, const ChainModel& model,
                        const Eigen::MatrixXd& r, const Configuration& q,
                        const Eigen::VectorXd& u, const Transform& goal,
                        const std::vector<Sphere>& obstacles, SpaceMode space) {
  CostBreakdown c;
  const ChainFrames frames = ComputeFrames(model, q);
  const Transform tray = TrayFrame(model, frames.left.back(), frames.right.back());
  c.track = weights.track * SquaredPoseError(tray, goal);

  const std::vector<Eigen::Vector3d> centers = SphereCenters(model, frames);
  const std::vector<CollisionSphere>& spheres = model.spheres();
  double coll = 0.0;
  for (std::size_t i = 0; i < spheres.size(); ++i) {
    for (const Sphere& o : obstacles) {
      coll += SphereClearancePenalty(centers[i], spheres[i].radius, o.center,
                                     o.radius, weights.margin);
    }
  }
  if (weights.self_collision) {
    for (std::size_t i = 0; i < spheres.size(); ++i) {
      if (spheres[i].arm != CollisionSphere::kLeft) continue;
      for (std::size_t j = 0; j < spheres.size(); ++j) {
        if (spheres[j].arm != CollisionSphere::kRight) continue;
        coll += SphereClearancePenalty(centers[i], spheres[i].radius, centers[j],
                                       spheres[j].radius, weights.margin);
      }
    }
  }
  c.coll = weights.coll * coll;

  c.reg = 0.5 * u.dot(r * u);

  const Eigen::ArrayXd below = (model.lower() - q).array().max(0.0);
  const Eigen::ArrayXd above = (q - model.upper()).array().max(0.0);
  const double speed = Hinge(u.norm() - weights.velocity_limit);
  c.limit = weights.limit * (below.square().sum() + above.square().sum() +
                             speed * speed);

  const Configuration& q_neutral = weights.neutral_posture.size() == q.size()
                                       ? weights.neutral_posture
                                       : model.neutral();
  c.neutral = weights.neutral * (q - q_neutral).squaredNorm();

  if (space == SpaceMode::kJointPenalty) {
    c.constraint = weights.constraint * SquaredResidual(model, q);
  }
  return c;
}

Eigen::MatrixXd SamplePerturbation(const PlannerConfig& cfg, int control_dim,
                                   std::uint64_t seed, std::uint64_t iteration,
                                   int k) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(iteration),
                    static_cast<std::uint32_t>(iteration >> 32),
                    static_cast<std::uint32_t>(k)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::ArrayXd scale = cfg.sigma.array().sqrt();
  Eigen::MatrixXd out(cfg.horizon, control_dim);
  const int draws = cfg.sampling == SamplingMode::kSingleInstance ? 1 : cfg.horizon;
  for (int t = 0; t < draws; ++t) {
    for (int j = 0; j < control_dim; ++j) out(t, j) = scale(j) * normal(rng);
  }
  for (int t = draws; t < cfg.horizon; ++t) out.row(t) = out.row(0);
  return out;
}

RolloutResult Rollout(const PlannerConfig& cfg, const CostWeights& weights,
                      const ChainModel& model, const ManifoldDecoder& decoder,
                      const LatentState& z_c, const ControlSequence& u,
                      const Eigen::MatrixXd& perturbation,
                      const PlanningContext& context) {
  const int m = static_cast<int>(z_c.size());
  RolloutResult out;
  out.z.resize(m, cfg.horizon);
  out.q.resize(decoder.output_dim(), cfg.horizon);
  std::vector<Sphere> obstacles = ObstaclesAt(context.obstacles, context.time);
  LatentState z = z_c;
  for (int t = 0; t < cfg.horizon; ++t) {
    const Eigen::VectorXd u_t =
        (u.row(t) + perturbation.row(t)).transpose();
    z += u_t * cfg.dt;
    out.z.col(t) = z;
    const Configuration q = decoder.Decode(z);
    out.q.col(t) = q;
    if (cfg.prediction == ObstaclePrediction::kExtrapolated) {
      obstacles = ObstaclesAt(context.obstacles, context.time + (t + 1) * cfg.dt);
    }
    out.cost += StageCost(weights, model, cfg.r, q, u_t, context.goal, obstacles,
                          cfg.space);
  }
  out.cost.track += cfg.terminal_weight * weights.track *
                    TrackingError(model, out.q.col(cfg.horizon - 1), context.goal);
  out.total = out.cost.total();
  return out;
}

Eigen::VectorXd ImportanceWeights(const Eigen::VectorXd& costs, double lambda) {
  const double min_cost = costs.minCoeff();
  Eigen::VectorXd w(costs.size());
  double sum = 0.0;
  for (Eigen::Index k = 0; k < costs.size(); ++k) {
    w(k) = std::exp(-(costs(k) - min_cost) / lambda);
    sum += w(k);
  }
  for (Eigen::Index k = 0; k < costs.size(); ++k) w(k) /= sum;
  return w;
}

PlanResult PlanStep(const PlannerConfig& cfg, const CostWeights& weights,
                    const ChainModel& model, const ManifoldDecoder& decoder,
                    const LatentState& z_c, const ControlSequence& u_nominal,
                    const PlanningContext& context, std::uint64_t seed,
                    std::uint64_t iteration) {
  const auto start = std::chrono::steady_clock::now();
  const int m = decoder.latent_dim();
  cfg.Validate(m);
  if (z_c.size() != m || u_nominal.rows() != cfg.horizon ||
      u_nominal.cols() != m) {
    throw std::invalid_argument("planner: state or control sequence has the wrong shape");
  }
  if (decoder.output_dim() != model.joint_count()) {
    throw std::invalid_argument("planner: decoder does not match the model");
  }

  const int K = cfg.samples;
  std::vector<Eigen::MatrixXd> perturbations(K);
  Eigen::VectorXd costs(K);
  auto body = [&](const tbb::blocked_range<int>& range) {
    for (int k = range.begin(); k != range.end(); ++k) {
      perturbations[k] = SamplePerturbation(cfg, m, seed, iteration, k);
      costs(k) = Rollout(cfg, weights, model, decoder, z_c, u_nominal,
                         perturbations[k], context)
                     .total;
    }
  };
  if (cfg.threads > 0) {
    tbb::task_arena arena(std::min(cfg.threads, tbb::info::default_concurrency()));
    arena.execute([&] { tbb::parallel_for(tbb::blocked_range<int>(0, K), body); });
  } else {
    tbb::parallel_for(tbb::blocked_range<int>(0, K), body);
  }

  const Eigen::VectorXd w = ImportanceWeights(costs, cfg.lambda);
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(cfg.horizon, m);
  for (int k = 0; k < K; ++k) delta += w(k) * perturbations[k];

  PlanResult result;
  result.u_star = u_nominal + delta;
  result.u_shifted = Eigen::MatrixXd::Zero(cfg.horizon, m);
  if (cfg.horizon > 1) {
    result.u_shifted.topRows(cfg.horizon - 1) =
        result.u_star.bottomRows(cfg.horizon - 1);
  }
  result.z_star = z_c + result.u_star.row(0).transpose() * cfg.dt;
  result.q_hat = decoder.Decode(result.z_star);

  PlanDiagnostics& d = result.diagnostics;
  d.iteration = iteration;
  d.min_cost = costs.minCoeff();
  d.mean_cost = costs.mean();
  d.ess = 1.0 / w.squaredNorm();
  d.z_star = result.z_star;
  try {
    d.h_norm = Constraint(model, result.q_hat).norm();
  } catch (const GeometryError&) {
    d.h_norm = std::numeric_limits<double>::infinity();
  }
  d.wall_ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  return result;
}

PlanResult VanillaPlanStep(const PlannerConfig& cfg, const CostWeights& weights,
                           const ChainModel& model, const Configuration& q_c,
                           const ControlSequence& u_nominal,
                           const PlanningContext& context, std::uint64_t seed,
                           std::uint64_t iteration) {
  if (cfg.space != SpaceMode::kJointPenalty) {
    throw std::invalid_argument("planner: joint-space planning needs joint_penalty mode");
  }
  const IdentityDecoder identity(model.joint_count());
  return PlanStep(cfg, weights, model, identity, q_c, u_nominal, context, seed,
                  iteration);
}

std::string DiagnosticsJson(const PlanDiagnostics& d, bool with_timing) {
  nlohmann::ordered_json j;
  j["iteration"] = d.iteration;
  j["min_cost"] = d.min_cost;
  j["mean_cost"] = d.mean_cost;
  j["ess"] = d.ess;
  if (with_timing) j["wall_ms"] = d.wall_ms;
  j["z_star"] = std::vector<double>(d.z_star.data(), d.z_star.data() + d.z_star.size());
  if (std::isfinite(d.h_norm)) {
    j["h_norm"] = d.h_norm;
  } else {
    j["h_norm"] = nullptr;
  }
  return j.dump();
}

}  // namespace mcmppi
