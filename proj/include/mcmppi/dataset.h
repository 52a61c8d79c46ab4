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

#ifndef MCMPPI_DATASET_H_
#define MCMPPI_DATASET_H_

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "mcmppi/chain_model.h"
#include "mcmppi/file_format.h"

namespace mcmppi {

// On-manifold configurations, one per column.
struct ManifoldDataset {
  std::string model_id;
  std::uint64_t seed = 0;
  Eigen::MatrixXd samples;  // n x count

  int size() const { return static_cast<int>(samples.cols()); }
  int dim() const { return static_cast<int>(samples.rows()); }
  // FNV-1a over the raw sample bytes.
  std::uint64_t Hash() const;
};

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDatasetTolerance = 1e-10;

// Uniform seeds inside the joint bounds projected onto the manifold; failed
// projections are discarded and redrawn. Throws DatasetError when fewer than
// 1% of at most 100 * count attempts succeed.
ManifoldDataset GenerateDataset(const ChainModel& model, int count,
                                std::uint64_t seed);

void SaveDataset(const ManifoldDataset& dataset, const std::string& path);
ManifoldDataset LoadDataset(const std::string& path);

}  // namespace mcmppi

#endif  // MCMPPI_DATASET_H_
