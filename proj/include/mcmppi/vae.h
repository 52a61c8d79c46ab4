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

// Variational autoencoder over joint configurations with a hand-written
// backward pass. Joint angles are scaled to [-1, 1] by the joint bounds
// before encoding and scaled back after decoding.

#ifndef MCMPPI_VAE_H_
#define MCMPPI_VAE_H_

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mcmppi/chain_model.h"
#include "mcmppi/dataset.h"
#include "mcmppi/decoder.h"
#include "mcmppi/file_format.h"

namespace mcmppi {

// y = w x + b, b stored as an out x 1 matrix.
struct DenseLayer {
  Eigen::MatrixXd w;
  Eigen::MatrixXd b;
};

enum class Activation : std::uint32_t { kTanh = 1 };

struct TrainingMetadata {
  int epochs = 0;
  double final_loss = std::numeric_limits<double>::quiet_NaN();
  double final_recon = std::numeric_limits<double>::quiet_NaN();
  double final_kl = std::numeric_limits<double>::quiet_NaN();
  // Largest |decode(encode_mean(q)) - q| entry (rad) over the training set.
  double recon_bound = std::numeric_limits<double>::infinity();
  std::uint64_t dataset_hash = 0;
  std::uint64_t seed = 0;
  std::string model_id;
};

struct VaeParams {
  int input_dim = 0;
  int latent_dim = 0;
  std::vector<int> hidden;  // encoder widths; the decoder mirrors them
  Activation activation = Activation::kTanh;
  double beta = 1e-3;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::vector<DenseLayer> encoder;  // hidden layers only
  DenseLayer mean_head;
  DenseLayer logvar_head;
  std::vector<DenseLayer> decoder;  // hidden layers then the linear output
  TrainingMetadata meta;

  // Every weight and bias block in a fixed order.
  std::vector<Eigen::MatrixXd*> Tensors();
  std::vector<const Eigen::MatrixXd*> Tensors() const;
  int ParameterCount() const;
};

struct VaeArchitecture {
  std::vector<int> hidden = {64, 64};
  double beta = 1e-3;
};

struct TrainOptions {
  int epochs = 200;
  int batch_size = 64;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
};

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;
  double recon = 0.0;
  double kl = 0.0;
};

class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, int epoch)
      : std::runtime_error(what), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

// Glorot-uniform weights, zero biases.
VaeParams InitVae(const ChainModel& model, const VaeArchitecture& arch,
                  std::uint64_t seed);

// Minibatch Adam on reconstruction MSE + beta * KL(q(z|x) || N(0, I)).
// Deterministic given options.seed; zero epochs returns InitVae unchanged
// apart from the metadata.
VaeParams TrainVae(const ChainModel& model, const ManifoldDataset& dataset,
                   const VaeArchitecture& arch, const TrainOptions& options,
                   std::vector<EpochStats>* history = nullptr);

struct LossTerms {
  double loss = 0.0;
  double recon = 0.0;
  double kl = 0.0;
};

// Batch loss for configurations q (n x B) and reparameterization noise
// eps (m x B). Fills `grad` (same layout as params) when non-null.
LossTerms VaeLoss(const VaeParams& params, const Eigen::MatrixXd& q,
                  const Eigen::MatrixXd& eps, VaeParams* grad);

Configuration Decode(const VaeParams& params, const LatentState& z);
Eigen::MatrixXd DecodeBatch(const VaeParams& params, const Eigen::MatrixXd& z);
LatentState EncodeMean(const VaeParams& params, const Configuration& q);

void SaveParams(const VaeParams& params, const std::string& path);
// Throws FileFormatError; never returns partially read parameters.
VaeParams LoadParams(const std::string& path);

class LearnedDecoder : public ManifoldDecoder {
 public:
  explicit LearnedDecoder(VaeParams params);

  std::string name() const override { return "learned"; }
  int latent_dim() const override { return params_.latent_dim; }
  int output_dim() const override { return params_.input_dim; }
  Configuration Decode(const LatentState& z) const override;
  Eigen::MatrixXd DecodeBatch(const Eigen::MatrixXd& z) const override;
  LatentState Encode(const Configuration& q) const override;
  const VaeParams& params() const { return params_; }

 private:
  VaeParams params_;
};

// Mean ||h(decode(z))|| over `count` draws z ~ N(0, I).
double PriorMismatch(const ChainModel& model, const ManifoldDecoder& decoder,
                     int count, std::uint64_t seed);

}  // namespace mcmppi

#endif  // MCMPPI_VAE_H_
