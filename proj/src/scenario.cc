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

#include "mcmppi/scenario.h"

#include <cmath>
#include <filesystem>
#include <random>

#include <yaml-cpp/yaml.h>

namespace mcmppi {
namespace {

constexpr int kScenarioVersion = 1;

template <typename T>
void Read(const YAML::Node& node, const char* key, T* out) {
  if (node && node[key]) *out = node[key].as<T>();
}

Eigen::VectorXd ReadVector(const YAML::Node& node) {
  if (node.IsScalar()) return Eigen::VectorXd::Constant(1, node.as<double>());
  Eigen::VectorXd v(node.size());
  for (std::size_t i = 0; i < node.size(); ++i) v(i) = node[i].as<double>();
  return v;
}

Eigen::Vector3d ReadPoint(const YAML::Node& node) {
  const Eigen::VectorXd v = ReadVector(node);
  if (v.size() != 2 && v.size() != 3) {
    throw ScenarioError("scenario: points need 2 or 3 coordinates");
  }
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  p.head(v.size()) = v;
  return p;
}

Range ReadRange(const YAML::Node& node) {
  if (node.IsScalar()) {
    const double v = node.as<double>();
    return {v, v};
  }
  if (node.size() != 2) throw ScenarioError("scenario: a range is [lo, hi]");
  Range r{node[0].as<double>(), node[1].as<double>()};
  if (r.lo > r.hi) throw ScenarioError("scenario: range lower end above upper end");
  return r;
}

PoseRange ReadPoseRange(const YAML::Node& node) {
  PoseRange r;
  r.x = ReadRange(node["x"]);
  r.y = ReadRange(node["y"]);
  r.angle = node["angle"] ? ReadRange(node["angle"]) : Range{0.0, 0.0};
  return r;
}

NoiseSettings ReadNoise(const YAML::Node& node, NoiseSettings fallback) {
  if (!node) return fallback;
  if (node["sigma"]) fallback.sigma = ReadVector(node["sigma"]);
  Read(node, "r", &fallback.r);
  Read(node, "velocity_limit", &fallback.velocity_limit);
  return fallback;
}

Obstacle ReadObstacle(const YAML::Node& node) {
  Obstacle o;
  o.center = ReadPoint(node["center"]);
  Read(node, "radius", &o.radius);
  const std::string motion = node["motion"].as<std::string>("static");
  if (motion == "linear") {
    o.motion = Obstacle::Motion::kLinear;
    o.axis = ReadPoint(node["axis"]).normalized();
    Read(node, "speed", &o.speed);
    Read(node, "start_time", &o.start_time);
  } else if (motion != "static") {
    throw ScenarioError("scenario: obstacle motion must be static or linear");
  }
  return o;
}

double Draw(std::mt19937_64& rng, const Range& r) {
  if (r.lo == r.hi) return r.lo;
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

Transform DrawPose(std::mt19937_64& rng, const PoseRange& range,
                   const Transform& like) {
  const double x = Draw(rng, range.x);
  const double y = Draw(rng, range.y);
  const double angle = Draw(rng, range.angle);
  if (like.group() == Group::kSE2) {
    return Transform::Planar(angle, Eigen::Vector2d(x, y));
  }
  return Transform::Spatial(RotZ(angle),
                            Eigen::Vector3d(x, y, like.translation().z()));
}

}  // namespace

void ScenarioSpec::Validate() const {
  if (!(success_position > 0.0) || !(success_orientation > 0.0)) {
    throw ScenarioError("scenario: success thresholds must be > 0");
  }
  if (!(break_limit > 0.0)) throw ScenarioError("scenario: break_limit must be > 0");
  if (!(max_time > 0.0)) throw ScenarioError("scenario: max_time must be > 0");
  if (!(tracking_lag >= 0.0)) {
    throw ScenarioError("scenario: tracking_lag must be >= 0");
  }
  for (const Obstacle& o : obstacles) {
    if (!(o.radius > 0.0)) throw ScenarioError("scenario: obstacle radius must be > 0");
    if (!(o.speed >= 0.0)) throw ScenarioError("scenario: obstacle speed must be >= 0");
  }
  if (start.group() != goal.group()) {
    throw ScenarioError("scenario: start and goal must use the same group");
  }
  const double ratio = planner.dt / executor.dt;
  if (!(ratio >= 1.0) || std::abs(ratio - std::round(ratio)) > 1e-9) {
    throw ScenarioError(
        "scenario: planner dt must be a whole multiple of the executor dt");
  }
  try {
    executor.Validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  }
  if (randomization) {
    for (const auto& o : randomization->obstacles) {
      if (!(o.radius > 0.0)) throw ScenarioError("scenario: obstacle radius must be > 0");
      if (o.speeds.empty() || o.crossings.empty()) {
        throw ScenarioError("scenario: randomized obstacles need speeds and crossings");
      }
    }
  }
}

ScenarioSpec ParseScenario(const YAML::Node& root, const std::string& base_dir) {
  if (!root["version"] || root["version"].as<int>() != kScenarioVersion) {
    throw ScenarioError("scenario: unsupported or missing schema version");
  }
  ScenarioSpec spec;
  spec.name = root["name"].as<std::string>("unnamed");
  if (!root["model"]) throw ScenarioError("scenario: missing 'model'");
  std::filesystem::path model = root["model"].as<std::string>();
  if (model.is_relative()) model = std::filesystem::path(base_dir) / model;
  spec.model_path = model.lexically_normal().string();

  const std::string group_name = root["group"].as<std::string>("SE2");
  Group group;
  if (group_name == "SE2") {
    group = Group::kSE2;
  } else if (group_name == "SE3") {
    group = Group::kSE3;
  } else {
    throw ScenarioError("scenario: group must be SE2 or SE3");
  }
  if (!root["start"] || !root["goal"]) {
    throw ScenarioError("scenario: 'start' and 'goal' poses are required");
  }
  spec.start = ParsePose(root["start"], group);
  spec.goal = ParsePose(root["goal"], group);
  if (root["obstacles"]) {
    for (const auto& o : root["obstacles"]) spec.obstacles.push_back(ReadObstacle(o));
  }

  const YAML::Node planner = root["planner"];
  PlannerConfig& p = spec.planner;
  Read(planner, "samples", &p.samples);
  Read(planner, "horizon", &p.horizon);
  Read(planner, "dt", &p.dt);
  Read(planner, "lambda", &p.lambda);
  Read(planner, "terminal_weight", &p.terminal_weight);
  Read(planner, "threads", &p.threads);
  if (planner && planner["sampling"]) {
    const std::string s = planner["sampling"].as<std::string>();
    if (s == "single_instance") {
      p.sampling = SamplingMode::kSingleInstance;
    } else if (s == "per_step") {
      p.sampling = SamplingMode::kPerStep;
    } else {
      throw ScenarioError("scenario: sampling must be single_instance or per_step");
    }
  }
  if (planner && planner["prediction"]) {
    const std::string s = planner["prediction"].as<std::string>();
    if (s == "frozen") {
      p.prediction = ObstaclePrediction::kFrozen;
    } else if (s == "extrapolated") {
      p.prediction = ObstaclePrediction::kExtrapolated;
    } else {
      throw ScenarioError("scenario: prediction must be frozen or extrapolated");
    }
  }
  NoiseSettings noise_default;
  noise_default.sigma = Eigen::VectorXd::Constant(1, 0.01);
  const YAML::Node noise = planner ? planner["noise"] : YAML::Node();
  spec.analytic_noise = ReadNoise(noise ? noise["analytic"] : YAML::Node(), noise_default);
  spec.learned_noise = ReadNoise(noise ? noise["learned"] : YAML::Node(), noise_default);
  spec.joint_noise = ReadNoise(noise ? noise["joint"] : YAML::Node(), noise_default);

  const YAML::Node costs = root["costs"];
  CostWeights& w = spec.costs;
  Read(costs, "track", &w.track);
  Read(costs, "coll", &w.coll);
  Read(costs, "limit", &w.limit);
  Read(costs, "neutral", &w.neutral);
  Read(costs, "constraint", &w.constraint);
  Read(costs, "margin", &w.margin);
  Read(costs, "self_collision", &w.self_collision);
  if (w.track < 0 || w.coll < 0 || w.limit < 0 || w.neutral < 0 ||
      w.constraint < 0 || w.margin < 0) {
    throw ScenarioError("scenario: cost weights must be >= 0");
  }

  const YAML::Node exec = root["executor"];
  ExecutorConfig& e = spec.executor;
  Read(exec, "alpha", &e.alpha);
  Read(exec, "w_task", &e.w_task);
  Read(exec, "kp_task", &e.kp_task);
  Read(exec, "dt", &e.dt);
  Read(exec, "epsilon", &e.epsilon);
  if (exec && exec["task_frame"]) {
    const std::string f = exec["task_frame"].as<std::string>();
    if (f == "tray") {
      e.task_frame = TaskFrame::kTrayCenter;
    } else if (f == "left_ee") {
      e.task_frame = TaskFrame::kLeftEe;
    } else {
      throw ScenarioError("scenario: task_frame must be tray or left_ee");
    }
  }

  const YAML::Node success = root["success"];
  Read(success, "position", &spec.success_position);
  Read(success, "orientation", &spec.success_orientation);
  Read(root, "break_limit", &spec.break_limit);
  Read(root, "max_time", &spec.max_time);
  Read(root, "tracking_lag", &spec.tracking_lag);
  Read(root, "seed", &spec.seed);

  if (const YAML::Node rnd = root["randomize"]) {
    Randomization r;
    if (rnd["start"]) r.start = ReadPoseRange(rnd["start"]);
    if (rnd["goal"]) r.goal = ReadPoseRange(rnd["goal"]);
    if (rnd["obstacles"]) {
      for (const auto& o : rnd["obstacles"]) {
        ObstacleRandomization orand;
        Read(o, "radius", &orand.radius);
        if (o["speeds"]) orand.speeds = o["speeds"].as<std::vector<double>>();
        if (o["start_time"]) orand.start_time = ReadRange(o["start_time"]);
        for (const auto& c : o["crossings"]) {
          Crossing crossing;
          const YAML::Node center = c["center"];
          if (!center || (center.size() != 2 && center.size() != 3)) {
            throw ScenarioError("scenario: crossing centers need 2 or 3 entries");
          }
          for (std::size_t i = 0; i < center.size(); ++i) {
            crossing.center[i] = ReadRange(center[i]);
          }
          crossing.axis = ReadPoint(c["axis"]).normalized();
          orand.crossings.push_back(crossing);
        }
        r.obstacles.push_back(orand);
      }
    }
    spec.randomization = r;
  }
  spec.Validate();
  return spec;
}

ScenarioSpec LoadScenario(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::Exception& e) {
    throw ScenarioError("scenario: cannot read '" + path + "': " + e.what());
  }
  try {
    return ParseScenario(root, std::filesystem::path(path).parent_path().string());
  } catch (const YAML::Exception& e) {
    throw ScenarioError("scenario: malformed '" + path + "': " + e.what());
  }
}

ScenarioSpec SampleTrial(const ScenarioSpec& spec, std::uint64_t seed_base,
                         int trial) {
  ScenarioSpec out = spec;
  out.seed = seed_base + static_cast<std::uint64_t>(trial);
  if (!spec.randomization) return out;
  std::seed_seq seq{static_cast<std::uint32_t>(seed_base),
                    static_cast<std::uint32_t>(seed_base >> 32),
                    static_cast<std::uint32_t>(trial)};
  std::mt19937_64 rng(seq);
  const Randomization& r = *spec.randomization;
  if (r.start) out.start = DrawPose(rng, *r.start, spec.start);
  if (r.goal) out.goal = DrawPose(rng, *r.goal, spec.goal);
  for (const ObstacleRandomization& o : r.obstacles) {
    Obstacle obstacle;
    obstacle.radius = o.radius;
    obstacle.motion = Obstacle::Motion::kLinear;
    const std::size_t c = std::uniform_int_distribution<std::size_t>(
        0, o.crossings.size() - 1)(rng);
    const std::size_t s = std::uniform_int_distribution<std::size_t>(
        0, o.speeds.size() - 1)(rng);
    const Crossing& crossing = o.crossings[c];
    for (int i = 0; i < 3; ++i) obstacle.center(i) = Draw(rng, crossing.center[i]);
    obstacle.axis = crossing.axis;
    obstacle.speed = o.speeds[s];
    obstacle.start_time = Draw(rng, o.start_time);
    out.obstacles.push_back(obstacle);
  }
  out.randomization.reset();
  return out;
}

Eigen::Vector3d PlanarPose(const Transform& t) {
  return Eigen::Vector3d(t.translation().x(), t.translation().y(), t.angle());
}

}  // namespace mcmppi
