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

#ifndef MCMPPI_DECODER_H_
#define MCMPPI_DECODER_H_

#include <string>

#include <Eigen/Dense>

#include "mcmppi/chain_model.h"

namespace mcmppi {

// z in R^m: coordinates of the constraint manifold under a decoder.
using LatentState = Eigen::VectorXd;

// A map psi: R^m -> R^n whose image approximates {q : h(q) = 0}.
// Implementations are immutable and safe to share across threads.
class ManifoldDecoder {
 public:
  virtual ~ManifoldDecoder() = default;

  virtual std::string name() const = 0;
  virtual int latent_dim() const = 0;
  virtual int output_dim() const = 0;

  // Total map used inside rollouts; never throws.
  virtual Configuration Decode(const LatentState& z) const = 0;
  // Column-wise Decode of an m x T matrix. Every column is bitwise equal to
  // the single-state result.
  virtual Eigen::MatrixXd DecodeBatch(const Eigen::MatrixXd& z) const;
  // Latent coordinates of a configuration (mean path for learned codecs).
  virtual LatentState Encode(const Configuration& q) const = 0;
};

}  // namespace mcmppi

#endif  // MCMPPI_DECODER_H_
