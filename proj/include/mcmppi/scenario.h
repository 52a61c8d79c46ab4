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

// Scenario files: task, obstacles, controller settings and randomization
// ranges for one experiment (YAML, schema in scenarios/README.md).

#ifndef MCMPPI_SCENARIO_H_
#define MCMPPI_SCENARIO_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mcmppi/chain_model.h"
#include "mcmppi/executor.h"
#include "mcmppi/geometry.h"
#include "mcmppi/mppi.h"
#include "mcmppi/scene.h"

namespace YAML {
class Node;
}

namespace mcmppi {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Latent (or joint) space settings that depend on the planning space.
struct NoiseSettings {
  Eigen::VectorXd sigma;  // variance per control dimension
  double r = 0.1;         // R = r * I
  double velocity_limit = 1.0;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct PoseRange {
  Range x, y, angle;
};

// One way an obstacle may cross the workspace: each center coordinate is
// drawn from its range, then it moves along `axis`.
struct Crossing {
  Range center[3];
  Eigen::Vector3d axis = Eigen::Vector3d::UnitX();
};

struct ObstacleRandomization {
  double radius = 0.05;
  std::vector<double> speeds;
  std::vector<Crossing> crossings;
  Range start_time;
};

struct Randomization {
  std::optional<PoseRange> start;
  std::optional<PoseRange> goal;
  std::vector<ObstacleRandomization> obstacles;
};

struct ScenarioSpec {
  std::string name;
  std::string model_path;  // resolved against the scenario file
  Transform start;
  Transform goal;
  std::vector<Obstacle> obstacles;

  PlannerConfig planner;  // sigma and R are filled per planning space
  NoiseSettings analytic_noise;
  NoiseSettings learned_noise;
  NoiseSettings joint_noise;
  CostWeights costs;
  ExecutorConfig executor;

  double success_position = 0.01;     // m
  double success_orientation = 0.01;  // rad
  double break_limit = 0.05;
  double max_time = 10.0;  // s
  // First-order lag (s) between the commanded and the applied configuration;
  // 0 applies commands directly.
  double tracking_lag = 0.0;
  std::uint64_t seed = 0;

  std::optional<Randomization> randomization;

  // Throws ScenarioError on a violated invariant.
  void Validate() const;
};

ScenarioSpec LoadScenario(const std::string& path);
// `base_dir` resolves a relative model path.
ScenarioSpec ParseScenario(const YAML::Node& root, const std::string& base_dir);

// Concrete trial drawn from the randomization ranges (the template itself when
// it has none). The draw depends only on (seed_base, trial).
ScenarioSpec SampleTrial(const ScenarioSpec& spec, std::uint64_t seed_base,
                         int trial);

// Tray pose of a planar spec as (x, y, heading).
Eigen::Vector3d PlanarPose(const Transform& t);

}  // namespace mcmppi

#endif  // MCMPPI_SCENARIO_H_
