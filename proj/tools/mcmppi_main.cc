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

// Command-line front end: dataset generation, VAE training, single episodes,
// the experiment suites and plot data.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mcmppi/chain_model.h"
#include "mcmppi/dataset.h"
#include "mcmppi/file_format.h"
#include "mcmppi/harness.h"
#include "mcmppi/scenario.h"
#include "mcmppi/vae.h"

namespace fs = std::filesystem;

namespace mcmppi {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Input problems (files, schema, combinations) map to the usage exit code.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string scenario;
  std::string model;
  std::string mode = "mc_mppi";
  std::string decoder = "analytic";
  std::string bench_decoder = "learned";
  std::string params;
  std::string data;
  std::string log;
  std::string suite;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int trials = 0;
  int threads = 0;
  int count = 5000;
  int epochs = 200;
  bool timing = false;
};

std::string DefaultOut() {
  const char* env = std::getenv("MCMPPI_OUT_DIR");
  return env != nullptr && *env != '\0' ? env : "out";
}

void WriteFile(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
}

ScenarioSpec LoadSpec(const Options& o) {
  if (o.scenario.empty()) throw UsageError("--scenario is required");
  if (!fs::is_regular_file(o.scenario)) {
    throw UsageError("scenario file not found: " + o.scenario);
  }
  try {
    ScenarioSpec spec = LoadScenario(o.scenario);
    if (o.seed_set) spec.seed = o.seed;
    if (o.threads > 0) spec.planner.threads = o.threads;
    return spec;
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

ChainModel LoadModel(const std::string& path) {
  try {
    return LoadChainModel(path);
  } catch (const ModelError& e) {
    throw UsageError(e.what());
  }
}

// VAE parameters for a model: --params when given, otherwise trained once
// with the default recipe and cached under the output directory.
std::string EnsureParams(const Options& o, const ChainModel& model) {
  if (!o.params.empty()) return o.params;
  const fs::path path = fs::path(o.out) / ("vae_" + model.id() + ".bin");
  if (fs::exists(path)) return path.string();
  std::cerr << "training VAE for " << model.id() << " -> " << path << "\n";
  const ManifoldDataset data = GenerateDataset(model, o.count, 1);
  TrainOptions options;
  options.epochs = o.epochs;
  options.seed = 3;
  const VaeParams params = TrainVae(model, data, VaeArchitecture(), options);
  fs::create_directories(path.parent_path());
  SaveParams(params, path.string());
  return path.string();
}

std::unique_ptr<ManifoldDecoder> Decoder(const Options& o, DecoderChoice choice,
                                         const ChainModel& model) {
  try {
    const std::string params =
        choice == DecoderChoice::kLearned ? EnsureParams(o, model) : "";
    return MakeDecoder(choice, model, params);
  } catch (const HarnessError& e) {
    throw UsageError(e.what());
  }
}

int GenData(const Options& o) {
  const ChainModel model = LoadModel(o.model);
  const ManifoldDataset data = GenerateDataset(model, o.count, o.seed);
  const fs::path path = fs::path(o.out) / "dataset.bin";
  fs::create_directories(path.parent_path());
  SaveDataset(data, path.string());
  std::cout << path.string() << "\n";
  return kExitOk;
}

int Train(const Options& o) {
  const ChainModel model = LoadModel(o.model);
  ManifoldDataset data;
  try {
    data = o.data.empty() ? GenerateDataset(model, o.count, 1) : LoadDataset(o.data);
  } catch (const FileFormatError& e) {
    throw UsageError(e.what());
  }
  TrainOptions options;
  options.epochs = o.epochs;
  options.seed = o.seed;
  std::vector<EpochStats> history;
  const VaeParams params =
      TrainVae(model, data, VaeArchitecture(), options, &history);
  const fs::path path = fs::path(o.out) / ("vae_" + model.id() + ".bin");
  fs::create_directories(path.parent_path());
  SaveParams(params, path.string());
  std::ostringstream csv;
  csv.precision(17);
  csv << "epoch,loss,recon,kl\n";
  for (const EpochStats& s : history) {
    csv << s.epoch << ',' << s.loss << ',' << s.recon << ',' << s.kl << '\n';
  }
  WriteFile(fs::path(o.out) / "training.csv", csv.str());
  std::cout << path.string() << "\n";
  return kExitOk;
}

int Run(const Options& o) {
  const ScenarioSpec spec = LoadSpec(o);
  const ChainModel model = LoadModel(spec.model_path);
  EpisodeMode mode;
  DecoderChoice choice;
  try {
    mode = ParseMode(o.mode);
    choice = ParseDecoder(o.decoder);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::unique_ptr<ManifoldDecoder> decoder;
  if (mode != EpisodeMode::kVanillaPenalty) decoder = Decoder(o, choice, model);
  EpisodeLog log;
  try {
    log = RunEpisode(spec, model, mode, decoder.get());
  } catch (const HarnessError& e) {
    throw UsageError(e.what());
  }
  const fs::path dir(o.out);
  WriteFile(dir / "episode.jsonl", EpisodeLogJson(log, false));
  WriteFile(dir / "episode_timing.jsonl", EpisodeLogJson(log, true));
  std::cout << log.outcome.reason << " t=" << log.outcome.time
            << " max_h=" << log.MaxH() << " mean_h=" << log.TimeAveragedH()
            << "\n";
  return log.outcome.success ? kExitOk : kExitFailure;
}

std::string SuiteScenario(const std::string& suite) {
  const fs::path dir = fs::path(MCMPPI_SOURCE_DIR) / "scenarios";
  if (suite == "hard-constraint") return (dir / "hard_constraint.yaml").string();
  if (suite == "static-obstacle") return (dir / "static_obstacle.yaml").string();
  return (dir / "dynamic_obstacle.yaml").string();
}

int Bench(Options o) {
  if (o.scenario.empty()) o.scenario = SuiteScenario(o.suite);
  const ScenarioSpec spec = LoadSpec(o);
  const ChainModel model = LoadModel(spec.model_path);
  const std::uint64_t seed_base = o.seed_set ? o.seed : spec.seed;
  DecoderChoice choice;
  try {
    choice = ParseDecoder(o.bench_decoder);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const std::unique_ptr<ManifoldDecoder> decoder = Decoder(o, choice, model);
  const fs::path dir = fs::path(o.out) / o.suite;
  bool ok = true;
  if (o.suite == "static-obstacle") {
    const int seeds = o.trials > 0 ? o.trials : 10;
    const SamplingComparison c =
        CompareSamplingModes(spec, model, *decoder, seeds, seed_base);
    WriteFile(dir / "report.json", SamplingComparisonJson(c));
    std::cout << "median convergence-time ratio per_step/single_instance: "
              << c.MedianTimeRatio() << "\nsingle_instance smoother on "
              << c.SingleInstanceSmoother() << "/" << seeds << " seeds\n";
    ok = c.MedianTimeRatio() > 1.0;
  } else {
    std::vector<EpisodeMode> modes = {EpisodeMode::kMcMppi};
    int trials = o.trials > 0 ? o.trials : 20;
    if (o.suite == "hard-constraint") {
      modes = {EpisodeMode::kMcMppi, EpisodeMode::kLatentOnly,
               EpisodeMode::kVanillaPenalty};
      if (o.trials <= 0) trials = 10;
    }
    const ExperimentReport report =
        RunExperiment(spec, model, modes, decoder.get(), trials, seed_base);
    WriteFile(dir / "report.json", ExperimentReportJson(report));
    WriteFile(dir / "timing.json", ExperimentTimingJson(report));
    for (const CellSummary& c : report.cells) {
      std::cout << ModeName(c.mode) << ": " << c.successes << "/" << c.trials
                << " succeeded\n";
    }
    ok = report.cells.front().successes > 0;
    if (o.suite == "dynamic-obstacle") {
      // The other obstacle-prediction mode, reported on its own.
      ScenarioSpec other = spec;
      const bool frozen = spec.planner.prediction == ObstaclePrediction::kFrozen;
      other.planner.prediction =
          frozen ? ObstaclePrediction::kExtrapolated : ObstaclePrediction::kFrozen;
      const std::string name = frozen ? "extrapolated" : "frozen";
      const ExperimentReport alt =
          RunExperiment(other, model, modes, decoder.get(), trials, seed_base);
      WriteFile(dir / ("report_" + name + ".json"), ExperimentReportJson(alt));
      WriteFile(dir / ("timing_" + name + ".json"), ExperimentTimingJson(alt));
      std::cout << ModeName(alt.cells.front().mode) << " (" << name
                << " prediction): " << alt.cells.front().successes << "/"
                << alt.cells.front().trials << " succeeded\n";
    }
  }
  std::cout << (dir / "report.json").string() << "\n";
  return ok ? kExitOk : kExitFailure;
}

int Plots(const Options& o) {
  if (o.log.empty()) throw UsageError("--log is required");
  std::ifstream in(o.log);
  if (!in) throw UsageError("cannot read '" + o.log + "'");
  std::stringstream text;
  text << in.rdbuf();
  EpisodeLog log;
  try {
    log = ParseEpisodeLogJson(text.str());
  } catch (const HarnessError& e) {
    throw UsageError(e.what());
  }
  for (const std::string& f : EmitPlots(log, o.out)) std::cout << f << "\n";
  return kExitOk;
}

int Main(int argc, char** argv) {
  Options o;
  o.out = DefaultOut();
  CLI::App app{"Manifold-constrained MPPI for closed-chain dual-arm systems"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  auto seed_flag = [&](CLI::App* cmd) {
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t s) { o.seed = s; o.seed_set = true; },
        "random seed");
  };
  auto out_flag = [&](CLI::App* cmd) {
    cmd->add_option("--out", o.out, "output directory (default $MCMPPI_OUT_DIR or ./out)");
  };

  const std::string planar_model =
      (fs::path(MCMPPI_SOURCE_DIR) / "models" / "planar_dual3r.yaml").string();
  o.model = planar_model;

  CLI::App* gen = app.add_subcommand("gen-data", "sample configurations on the manifold");
  gen->add_option("--model", o.model, "model file");
  gen->add_option("--count", o.count, "number of samples")->check(CLI::PositiveNumber);
  seed_flag(gen);
  out_flag(gen);

  CLI::App* train = app.add_subcommand("train", "train the VAE decoder");
  train->add_option("--model", o.model, "model file");
  train->add_option("--data", o.data, "dataset file (generated when omitted)");
  train->add_option("--count", o.count, "samples when generating")->check(CLI::PositiveNumber);
  train->add_option("--epochs", o.epochs, "training epochs")->check(CLI::NonNegativeNumber);
  seed_flag(train);
  out_flag(train);

  CLI::App* run = app.add_subcommand("run", "run one episode from a scenario file");
  run->add_option("--scenario", o.scenario, "scenario file")->required();
  run->add_option("--mode", o.mode, "mc_mppi | latent_only | vanilla_penalty");
  run->add_option("--decoder", o.decoder, "analytic | learned");
  run->add_option("--params", o.params, "VAE parameter file");
  run->add_option("--threads", o.threads, "planner worker threads")->check(CLI::NonNegativeNumber);
  seed_flag(run);
  out_flag(run);

  CLI::App* bench = app.add_subcommand("bench", "run an experiment suite");
  bench->add_option("suite", o.suite, "hard-constraint | static-obstacle | dynamic-obstacle")
      ->required()
      ->check(CLI::IsMember({"hard-constraint", "static-obstacle", "dynamic-obstacle"}));
  bench->add_option("--scenario", o.scenario, "scenario file (suite default otherwise)");
  bench->add_option("--decoder", o.bench_decoder, "analytic | learned (default learned)");
  bench->add_option("--params", o.params, "VAE parameter file");
  bench->add_option("--trials", o.trials, "trials or paired seeds")->check(CLI::PositiveNumber);
  bench->add_option("--threads", o.threads, "planner worker threads")->check(CLI::NonNegativeNumber);
  seed_flag(bench);
  out_flag(bench);

  CLI::App* plots = app.add_subcommand("plots", "write CSV series from an episode log");
  plots->add_option("--log", o.log, "episode JSON-lines file")->required();
  out_flag(plots);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  try {
    if (gen->parsed()) return GenData(o);
    if (train->parsed()) return Train(o);
    if (run->parsed()) return Run(o);
    if (bench->parsed()) return Bench(o);
    return Plots(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace
}  // namespace mcmppi

int main(int argc, char** argv) { return mcmppi::Main(argc, argv); }
