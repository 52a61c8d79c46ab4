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

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <tuple>

#include <gtest/gtest.h>

#include "mcmppi/analytic_chart.h"
#include "mcmppi/dataset.h"
#include "mcmppi/kinematics.h"
#include "mcmppi/vae.h"
#include "test_util.h"

namespace mcmppi {
namespace {

using ::mcmppi::testing::PlanarModelPath;
using ::mcmppi::testing::PlanarResidualOracle;

// Closure residual of the planar testbed from plain trigonometry: the right
// hand must sit 0.4 m ahead of the left hand along its heading, facing back.

class CodecTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    model_ = new ChainModel(LoadChainModel(PlanarModelPath()));
    train_ = new ManifoldDataset(GenerateDataset(*model_, 5000, 1));
    test_ = new ManifoldDataset(GenerateDataset(*model_, 500, 2));
    TrainOptions options;
    options.seed = 3;
    trained_ = new VaeParams(TrainVae(*model_, *train_, VaeArchitecture(), options));
  }
  static void TearDownTestSuite() {
    delete trained_;
    delete test_;
    delete train_;
    delete model_;
  }

  static double EncodedMismatch(const VaeParams& p, const ManifoldDataset& data) {
    double total = 0.0;
    for (int i = 0; i < data.size(); ++i) {
      total += Constraint(*model_, Decode(p, EncodeMean(p, data.samples.col(i)))).norm();
    }
    return total / data.size();
  }

  static ChainModel* model_;
  static ManifoldDataset* train_;
  static ManifoldDataset* test_;
  static VaeParams* trained_;
};

ChainModel* CodecTest::model_ = nullptr;
ManifoldDataset* CodecTest::train_ = nullptr;
ManifoldDataset* CodecTest::test_ = nullptr;
VaeParams* CodecTest::trained_ = nullptr;

TEST_F(CodecTest, ResidualOracleAgreesWithKinematics) {
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  for (int i = 0; i < 100; ++i) {
    Configuration q = model_->home();
    for (int j = 0; j < 6; ++j) q(j) += u(rng);
    EXPECT_GT(PlanarResidualOracle(q), 0.0);
    const Configuration p = ProjectToManifold(*model_, q, 1e-12, 50).q;
    EXPECT_LT(PlanarResidualOracle(p), 1e-10);
  }
  EXPECT_LT(PlanarResidualOracle(model_->home()), 1e-8);
}

TEST_F(CodecTest, ChartCenteredPoseIsMirrored) {
  const AnalyticChart chart(*model_);
  const Configuration q = chart.DecodeExact(Eigen::Vector3d(0.0, 0.45, 0.0));
  EXPECT_LT((q.tail<3>() + q.head<3>()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(Constraint(*model_, q).norm(), 1e-12);
  EXPECT_LT((q - model_->home()).cwiseAbs().maxCoeff(), 1e-8);
}

TEST_F(CodecTest, ChartInvertsForwardKinematics) {
  const AnalyticChart chart(*model_);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> x(-0.2, 0.2), y(0.2, 0.55), th(-0.5, 0.5);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Vector3d z(x(rng), y(rng), th(rng));
    if (!chart.Reachable(z)) continue;
    ++checked;
    const Configuration q = chart.DecodeExact(z);
    EXPECT_LT((chart.Encode(q) - z).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT(PlanarResidualOracle(q), 1e-10);
  }
  EXPECT_GT(checked, 700);
}

TEST_F(CodecTest, ChartRejectsUnreachablePose) {
  const AnalyticChart chart(*model_);
  // Wrists would sit more than l1 + l2 = 0.6 m from their shoulders.
  EXPECT_THROW(chart.DecodeExact(Eigen::Vector3d(0.0, 1.2, 0.0)), ChartError);
  EXPECT_FALSE(chart.Reachable(Eigen::Vector3d(0.0, 1.2, 0.0)));
  const Configuration q = chart.Decode(Eigen::Vector3d(0.0, 1.2, 0.0));
  EXPECT_TRUE(q.allFinite());
  const ChainModel spatial = LoadChainModel(testing::SpatialModelPath());
  EXPECT_THROW(AnalyticChart{spatial}, ChartError);
}

TEST_F(CodecTest, DatasetIsDeterministic) {
  const ManifoldDataset a = GenerateDataset(*model_, 1, 42);
  const ManifoldDataset b = GenerateDataset(*model_, 1, 42);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.Hash(), b.Hash());
  EXPECT_THROW(GenerateDataset(*model_, 0, 1), DatasetError);
}

TEST_F(CodecTest, DatasetSamplesAreOnManifold) {
  ASSERT_EQ(train_->size(), 5000);
  double worst = 0.0;
  for (int i = 0; i < train_->size(); ++i) {
    worst = std::max(worst, PlanarResidualOracle(train_->samples.col(i)));
    EXPECT_TRUE(model_->WithinBounds(train_->samples.col(i)));
  }
  EXPECT_LE(worst, 1e-8);
}

TEST_F(CodecTest, DatasetCoversReachableGrid) {
  const AnalyticChart chart(*model_);
  // Cells over tray (x, y, theta); a cell counts as reachable when its center
  // decodes inside the joint bounds.
  const int nx = 8, ny = 6, nt = 5;
  const double x0 = -0.4, x1 = 0.4, y0 = 0.0, y1 = 0.6, t0 = -0.8, t1 = 0.8;
  auto cell = [&](const Eigen::Vector3d& z) {
    const int i = static_cast<int>(std::floor((z(0) - x0) / (x1 - x0) * nx));
    const int j = static_cast<int>(std::floor((z(1) - y0) / (y1 - y0) * ny));
    const int k = static_cast<int>(std::floor((z(2) - t0) / (t1 - t0) * nt));
    return std::make_tuple(i, j, k);
  };
  std::set<std::tuple<int, int, int>> reachable;
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      for (int k = 0; k < nt; ++k) {
        const Eigen::Vector3d z(x0 + (i + 0.5) * (x1 - x0) / nx,
                                y0 + (j + 0.5) * (y1 - y0) / ny,
                                t0 + (k + 0.5) * (t1 - t0) / nt);
        if (chart.Reachable(z) && model_->WithinBounds(chart.Decode(z))) {
          reachable.insert({i, j, k});
        }
      }
    }
  }
  std::set<std::tuple<int, int, int>> hit;
  for (int s = 0; s < train_->size(); ++s) {
    const auto c = cell(chart.Encode(train_->samples.col(s)));
    if (reachable.count(c)) hit.insert(c);
  }
  ASSERT_GT(reachable.size(), 50u);
  EXPECT_GE(static_cast<double>(hit.size()) / reachable.size(), 0.8);
}

TEST_F(CodecTest, DatasetFileRoundTrip) {
  const std::string path = ::testing::TempDir() + "/dataset.bin";
  SaveDataset(*test_, path);
  const ManifoldDataset back = LoadDataset(path);
  EXPECT_EQ(back.samples, test_->samples);
  EXPECT_EQ(back.seed, test_->seed);
  EXPECT_EQ(back.model_id, model_->id());
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 3);
  EXPECT_THROW(LoadDataset(path), FileFormatError);
}

TEST_F(CodecTest, GradientMatchesFiniteDifferences) {
  VaeParams p = InitVae(*model_, VaeArchitecture(), 7);
  // Move away from the symmetric initialization so every block matters.
  std::mt19937_64 rng(22);
  std::normal_distribution<double> normal;
  for (Eigen::MatrixXd* t : p.Tensors()) {
    for (int i = 0; i < t->size(); ++i) t->data()[i] += 0.1 * normal(rng);
  }
  p.beta = 0.1;
  const Eigen::MatrixXd q = test_->samples.leftCols(16);
  Eigen::MatrixXd eps(3, 16);
  for (int i = 0; i < eps.size(); ++i) eps.data()[i] = normal(rng);
  VaeParams grad;
  VaeLoss(p, q, eps, &grad);
  std::vector<Eigen::MatrixXd*> params = p.Tensors();
  std::vector<Eigen::MatrixXd*> grads = grad.Tensors();
  ASSERT_EQ(params.size(), grads.size());
  // Ten probes spread over encoder, heads and decoder blocks.
  int probes = 0;
  for (std::size_t t = 0; t < params.size() && probes < 10; t += 1) {
    if (t % 2 == 1 && t + 1 < params.size() && probes >= 5) continue;
    std::uniform_int_distribution<int> pick(0, static_cast<int>(params[t]->size()) - 1);
    const int i = pick(rng);
    double& w = params[t]->data()[i];
    const double saved = w;
    const double h = 1e-5;
    w = saved + h;
    const double plus = VaeLoss(p, q, eps, nullptr).loss;
    w = saved - h;
    const double minus = VaeLoss(p, q, eps, nullptr).loss;
    w = saved;
    const double numeric = (plus - minus) / (2.0 * h);
    const double analytic = grads[t]->data()[i];
    const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-6});
    EXPECT_LT(std::abs(numeric - analytic) / scale, 1e-4) << "block " << t;
    ++probes;
  }
  EXPECT_EQ(probes, 10);
}

TEST_F(CodecTest, ZeroEpochsKeepsInitialization) {
  TrainOptions options;
  options.epochs = 0;
  options.seed = 9;
  const VaeParams trained = TrainVae(*model_, *test_, VaeArchitecture(), options);
  const VaeParams init = InitVae(*model_, VaeArchitecture(), 9);
  const auto a = trained.Tensors();
  const auto b = init.Tensors();
  for (std::size_t t = 0; t < a.size(); ++t) EXPECT_EQ(*a[t], *b[t]);
  EXPECT_EQ(trained.meta.epochs, 0);
}

TEST_F(CodecTest, TrainingReducesMismatch) {
  const VaeParams untrained = InitVae(*model_, VaeArchitecture(), 3);
  const double before = EncodedMismatch(untrained, *test_);
  const double after = EncodedMismatch(*trained_, *test_);
  EXPECT_LT(after, before);
  EXPECT_EQ(trained_->meta.epochs, 200);
  EXPECT_TRUE(std::isfinite(trained_->meta.final_loss));
  EXPECT_EQ(trained_->meta.dataset_hash, train_->Hash());
  const LearnedDecoder decoder(*trained_);
  const double prior = PriorMismatch(*model_, decoder, 500, 4);
  EXPECT_TRUE(std::isfinite(prior));
  std::printf("mismatch: untrained %.4f trained %.4f prior %.4f\n", before, after,
              prior);
}

TEST_F(CodecTest, OffManifoldTrainingIsWorse) {
  ManifoldDataset noise = *train_;
  std::mt19937_64 rng(23);
  for (int i = 0; i < noise.size(); ++i) {
    for (int j = 0; j < 6; ++j) {
      noise.samples(j, i) = std::uniform_real_distribution<double>(
          model_->lower()(j), model_->upper()(j))(rng);
    }
  }
  TrainOptions options;
  options.seed = 3;
  const VaeParams control = TrainVae(*model_, noise, VaeArchitecture(), options);
  const double on = EncodedMismatch(*trained_, *test_);
  const double off = EncodedMismatch(control, *test_);
  std::printf("mismatch: on-manifold %.4f off-manifold %.4f\n", on, off);
  EXPECT_GE(off, 5.0 * on);
}

TEST_F(CodecTest, ReconstructionWithinRecordedBound) {
  const double bound = trained_->meta.recon_bound;
  ASSERT_TRUE(std::isfinite(bound));
  for (int i = 0; i < train_->size(); ++i) {
    const Configuration q = train_->samples.col(i);
    EXPECT_LE((Decode(*trained_, EncodeMean(*trained_, q)) - q).cwiseAbs().maxCoeff(),
              bound);
  }
  int inside = 0;
  for (int i = 0; i < test_->size(); ++i) {
    const Configuration q = test_->samples.col(i);
    inside += (Decode(*trained_, EncodeMean(*trained_, q)) - q).cwiseAbs().maxCoeff() <=
              bound;
  }
  EXPECT_GE(inside, 0.99 * test_->size());
}

TEST_F(CodecTest, DatasetMeanEncodesNearPrior) {
  const Configuration mean = train_->samples.rowwise().mean();
  const LatentState z = EncodeMean(*trained_, mean);
  EXPECT_LT(z.cwiseAbs().maxCoeff(), 3.0);
}

TEST_F(CodecTest, DecodeIsDeterministicAndBatchConsistent) {
  std::mt19937_64 rng(24);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd z(3, 30);
  for (int i = 0; i < z.size(); ++i) z.data()[i] = normal(rng);
  const Eigen::MatrixXd batch = DecodeBatch(*trained_, z);
  for (int t = 0; t < 30; ++t) {
    const Configuration a = Decode(*trained_, z.col(t));
    const Configuration b = Decode(*trained_, z.col(t));
    EXPECT_EQ(0, std::memcmp(a.data(), b.data(), sizeof(double) * 6));
    EXPECT_EQ(0, std::memcmp(a.data(), batch.col(t).data(), sizeof(double) * 6));
  }
  const LatentState e1 = EncodeMean(*trained_, model_->home());
  const LatentState e2 = EncodeMean(*trained_, model_->home());
  EXPECT_EQ(0, std::memcmp(e1.data(), e2.data(), sizeof(double) * 3));
}

TEST_F(CodecTest, ParamsRoundTripBitwise) {
  const std::string path = ::testing::TempDir() + "/params.bin";
  SaveParams(*trained_, path);
  const VaeParams back = LoadParams(path);
  const Eigen::Vector3d z(0.3, -1.2, 0.7);
  const Configuration a = Decode(*trained_, z);
  const Configuration b = Decode(back, z);
  EXPECT_EQ(0, std::memcmp(a.data(), b.data(), sizeof(double) * 6));
  EXPECT_EQ(back.meta.recon_bound, trained_->meta.recon_bound);
  EXPECT_EQ(back.meta.dataset_hash, trained_->meta.dataset_hash);
  EXPECT_EQ(back.hidden, trained_->hidden);
}

TEST_F(CodecTest, ParamsFileFailsClosed) {
  const std::string path = ::testing::TempDir() + "/params_bad.bin";
  SaveParams(*trained_, path);
  const auto size = std::filesystem::file_size(path);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.write("XXXX", 4);
  }
  EXPECT_THROW(LoadParams(path), FileFormatError);
  SaveParams(*trained_, path);
  {
    // Version field follows the eight-byte magic.
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(8);
    const char v[4] = {2, 0, 0, 0};
    f.write(v, 4);
  }
  EXPECT_THROW(LoadParams(path), FileFormatError);
  SaveParams(*trained_, path);
  std::filesystem::resize_file(path, size - 8);
  EXPECT_THROW(LoadParams(path), FileFormatError);
  SaveParams(*trained_, path);
  {
    std::ofstream f(path, std::ios::app | std::ios::binary);
    f.put('\0');
  }
  EXPECT_THROW(LoadParams(path), FileFormatError);
  EXPECT_THROW(LoadParams(path + ".missing"), FileFormatError);
}

TEST_F(CodecTest, FileSizeMatchesDeclaredPayload) {
  const std::string path = ::testing::TempDir() + "/params_size.bin";
  SaveParams(*trained_, path);
  std::ifstream f(path, std::ios::binary);
  char header[20];
  f.read(header, 20);
  std::uint64_t payload;
  std::memcpy(&payload, header + 12, sizeof(payload));
  EXPECT_EQ(std::filesystem::file_size(path), payload + 20);
}

}  // namespace
}  // namespace mcmppi
