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

#include "mcmppi/dataset.h"

#include <random>
#include <vector>

#include "binary_io.h"
#include "mcmppi/kinematics.h"

namespace mcmppi {
namespace {

constexpr char kDatasetMagic[8] = {'M', 'C', 'M', 'P', 'D', 'A', 'T', 'A'};
constexpr std::uint32_t kDatasetVersion = 1;
constexpr int kProjectionIterations = 50;

}  // namespace

std::uint64_t ManifoldDataset::Hash() const {
  return internal::Fnv1a(reinterpret_cast<const char*>(samples.data()),
                         sizeof(double) * samples.size());
}

ManifoldDataset GenerateDataset(const ChainModel& model, int count,
                                std::uint64_t seed) {
  if (count < 1) throw DatasetError("dataset count must be at least 1");
  const int n = model.joint_count();
  ManifoldDataset data;
  data.model_id = model.id();
  data.seed = seed;
  data.samples.resize(n, count);
  std::mt19937_64 rng(seed);
  std::vector<std::uniform_real_distribution<double>> draw;
  for (int i = 0; i < n; ++i) draw.emplace_back(model.lower()(i), model.upper()(i));
  const long long max_attempts = 100LL * count;
  long long attempts = 0;
  int accepted = 0;
  Configuration q0(n);
  while (accepted < count && attempts < max_attempts) {
    ++attempts;
    for (int i = 0; i < n; ++i) q0(i) = draw[i](rng);
    try {
      const Projection p =
          ProjectToManifold(model, q0, kDatasetTolerance, kProjectionIterations);
      data.samples.col(accepted++) = p.q;
    } catch (const ProjectionError&) {
    }
  }
  if (accepted < count || accepted < 0.01 * attempts) {
    throw DatasetError("manifold sampling accepted " + std::to_string(accepted) +
                       " of " + std::to_string(attempts) + " attempts");
  }
  return data;
}

void SaveDataset(const ManifoldDataset& dataset, const std::string& path) {
  internal::BinaryWriter w;
  w.PutString(dataset.model_id);
  w.Put<std::uint64_t>(dataset.seed);
  w.Put<std::uint32_t>(dataset.dim());
  w.Put<std::uint64_t>(dataset.size());
  w.PutMatrix(dataset.samples.transpose());
  internal::WriteContainer(path, kDatasetMagic, kDatasetVersion, w.bytes());
}

ManifoldDataset LoadDataset(const std::string& path) {
  const std::vector<char> payload =
      internal::ReadContainer(path, kDatasetMagic, kDatasetVersion);
  internal::BinaryReader r(payload.data(), payload.size());
  ManifoldDataset data;
  data.model_id = r.GetString();
  data.seed = r.Get<std::uint64_t>();
  const auto dim = r.Get<std::uint32_t>();
  const auto count = r.Get<std::uint64_t>();
  if (dim == 0 || dim > 1024 || count > (1ull << 31)) {
    throw FileFormatError("implausible dataset shape in '" + path + "'");
  }
  data.samples = r.GetMatrix(static_cast<int>(count), static_cast<int>(dim)).transpose();
  if (!r.done()) throw FileFormatError("trailing bytes in '" + path + "'");
  return data;
}

}  // namespace mcmppi
