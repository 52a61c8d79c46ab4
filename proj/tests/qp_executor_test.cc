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

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mcmppi/analytic_chart.h"
#include "mcmppi/executor.h"
#include "mcmppi/kinematics.h"
#include "mcmppi/qp.h"
#include "oracles.h"
#include "test_util.h"

namespace mcmppi {
namespace {

using ::mcmppi::testing::PlanarModelPath;
using ::mcmppi::testing::PlanarResidualOracle;
using ::mcmppi::testing::ProjectedGradientOracle;
using ::mcmppi::testing::RandomFeasibleQp;

TEST(QpSolverTest, UnconstrainedInteriorMatchesLinearSolve) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    QpProblem p = RandomFeasibleQp(rng);
    p.a_eq.resize(0, p.size());
    p.b_eq.resize(0);
    p.lo.setConstant(-1e6);
    p.hi.setConstant(1e6);
    const QpSolution s = SolveQp(p);
    ASSERT_EQ(s.status, QpStatus::kOptimal);
    const Eigen::VectorXd direct = -p.h.ldlt().solve(p.g);
    EXPECT_LT((s.x - direct).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_TRUE(s.active_set.empty());
  }
}

TEST(QpSolverTest, TwoVariablesOneActiveBound) {
  // min 1/2 |x - (3, 1)|^2 on [0, 2]^2: x1 sits on its upper bound with
  // multiplier 1.
  QpProblem p;
  p.h = Eigen::Matrix2d::Identity();
  p.g = Eigen::Vector2d(-3.0, -1.0);
  p.a_eq.resize(0, 2);
  p.b_eq.resize(0);
  p.lo = Eigen::Vector2d::Zero();
  p.hi = Eigen::Vector2d(2.0, 2.0);
  const QpSolution s = SolveQp(p);
  ASSERT_EQ(s.status, QpStatus::kOptimal);
  EXPECT_NEAR(s.x(0), 2.0, 1e-14);
  EXPECT_NEAR(s.x(1), 1.0, 1e-14);
  EXPECT_NEAR(s.mu(0), 1.0, 1e-14);
  EXPECT_EQ(s.mu(1), 0.0);
  ASSERT_EQ(s.active_set.size(), 1u);
  EXPECT_EQ(s.active_set[0], 1);
}

TEST(QpSolverTest, TwoVariablesEqualityAndActiveBound) {
  // min 1/2 |x - (3, 1)|^2 s.t. x1 + x2 = 2, x1 <= 1.5. Stationarity:
  // x - (3, 1) + nu (1, 1) + mu e1 = 0 with x = (1.5, 0.5) gives nu = 0.5,
  // mu = 1.
  QpProblem p;
  p.h = Eigen::Matrix2d::Identity();
  p.g = Eigen::Vector2d(-3.0, -1.0);
  p.a_eq = Eigen::RowVector2d(1.0, 1.0);
  p.b_eq = Eigen::VectorXd::Constant(1, 2.0);
  p.lo = Eigen::Vector2d(-10.0, -10.0);
  p.hi = Eigen::Vector2d(1.5, 10.0);
  const QpSolution s = SolveQp(p);
  ASSERT_EQ(s.status, QpStatus::kOptimal);
  EXPECT_NEAR(s.x(0), 1.5, 1e-14);
  EXPECT_NEAR(s.x(1), 0.5, 1e-14);
  EXPECT_NEAR(s.nu(0), 0.5, 1e-14);
  EXPECT_NEAR(s.mu(0), 1.0, 1e-14);
}

TEST(QpSolverTest, MatchesProjectedGradientOracle) {
  std::mt19937_64 rng(2026);
  int with_active = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const QpProblem p = RandomFeasibleQp(rng);
    const QpSolution s = SolveQp(p);
    ASSERT_EQ(s.status, QpStatus::kOptimal) << trial;
    const Eigen::VectorXd oracle = ProjectedGradientOracle(p);
    EXPECT_NEAR(p.Objective(s.x), p.Objective(oracle), 1e-6) << trial;
    EXPECT_LT(s.kkt.stationarity, 1e-6);
    EXPECT_LT(s.kkt.equality, 1e-8);
    EXPECT_LE(s.kkt.bounds, 1e-10);
    EXPECT_LT(s.kkt.complementarity, 1e-8);
    if (!s.active_set.empty()) ++with_active;
  }
  EXPECT_GT(with_active, 50);
}

TEST(QpSolverTest, InconsistentEqualityAndBoxIsInfeasible) {
  QpProblem p;
  p.h = Eigen::Matrix2d::Identity();
  p.g = Eigen::Vector2d::Zero();
  p.a_eq = Eigen::RowVector2d(1.0, 1.0);
  p.b_eq = Eigen::VectorXd::Constant(1, 10.0);
  p.lo = Eigen::Vector2d::Zero();
  p.hi = Eigen::Vector2d::Ones();
  EXPECT_EQ(SolveQp(p).status, QpStatus::kInfeasible);
}

TEST(QpSolverTest, CrossedBoundsAreInfeasible) {
  QpProblem p;
  p.h = Eigen::Matrix2d::Identity();
  p.g = Eigen::Vector2d(1.0, -1.0);
  p.a_eq.resize(0, 2);
  p.b_eq.resize(0);
  p.lo = Eigen::Vector2d(0.5, -1.0);
  p.hi = Eigen::Vector2d(0.2, 1.0);
  EXPECT_EQ(SolveQp(p).status, QpStatus::kInfeasible);
}

TEST(QpSolverTest, RedundantEqualities) {
  QpProblem p;
  p.h = Eigen::Matrix3d::Identity();
  p.g = Eigen::Vector3d(1.0, 2.0, 3.0);
  p.a_eq.resize(2, 3);
  p.a_eq << 1.0, 1.0, 1.0, 2.0, 2.0, 2.0;
  p.b_eq = Eigen::Vector2d(1.0, 2.0);
  p.lo = Eigen::Vector3d::Constant(-5.0);
  p.hi = Eigen::Vector3d::Constant(5.0);
  const QpSolution s = SolveQp(p);
  ASSERT_EQ(s.status, QpStatus::kOptimal);
  EXPECT_NEAR(s.x.sum(), 1.0, 1e-12);
  EXPECT_LT(s.kkt.stationarity, 1e-12);
  p.b_eq(1) = 3.0;
  EXPECT_EQ(SolveQp(p).status, QpStatus::kInfeasible);
}

TEST(QpSolverTest, IterationBudgetIsReportedSeparately) {
  QpProblem p;
  p.h = Eigen::Matrix2d::Identity();
  p.g = Eigen::Vector2d(-3.0, -3.0);
  p.a_eq.resize(0, 2);
  p.b_eq.resize(0);
  p.lo = Eigen::Vector2d::Zero();
  p.hi = Eigen::Vector2d::Ones();
  QpOptions options;
  options.max_iter = 1;
  EXPECT_EQ(SolveQp(p, options).status, QpStatus::kMaxIterations);
  options.max_iter = 10;
  EXPECT_EQ(SolveQp(p, options).status, QpStatus::kOptimal);
}

TEST(QpSolverTest, IndefiniteHessianIsRejected) {
  QpProblem p;
  p.h = Eigen::Vector2d(1.0, -1.0).asDiagonal();
  p.g = Eigen::Vector2d::Zero();
  p.a_eq.resize(0, 2);
  p.b_eq.resize(0);
  p.lo = -Eigen::Vector2d::Ones();
  p.hi = Eigen::Vector2d::Ones();
  EXPECT_EQ(SolveQp(p).status, QpStatus::kNotConvex);
}

// Executor.

class ExecutorTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    model_ = new ChainModel(LoadChainModel(PlanarModelPath()));
    chart_ = new AnalyticChart(*model_);
  }
  static void TearDownTestSuite() {
    delete chart_;
    delete model_;
  }
  static ChainModel* model_;
  static AnalyticChart* chart_;
};

ChainModel* ExecutorTest::model_ = nullptr;
AnalyticChart* ExecutorTest::chart_ = nullptr;

TEST_F(ExecutorTest, StationaryFixedPoint) {
  ExecutorConfig cfg;
  cfg.w_task = 0.0;
  const Configuration q = chart_->DecodeExact(Eigen::Vector3d(0.05, 0.42, 0.1));
  const QpProblem p = AssembleQp(cfg, *model_, q, q, ForwardKinematics(*model_, q).tray);
  EXPECT_LT(p.b_eq.norm(), 1e-14);
  EXPECT_EQ(p.g.norm(), 0.0);
  const QpSolution s = SolveQp(p);
  ASSERT_EQ(s.status, QpStatus::kOptimal);
  EXPECT_LT(s.x.norm(), 1e-12);
}

TEST_F(ExecutorTest, EqualityRightHandSide) {
  ExecutorConfig cfg;
  Configuration q = model_->home();
  q(2) += 0.01;
  const Eigen::VectorXd h = Constraint(*model_, q).values;
  const Eigen::MatrixXd j = ConstraintJacobian(*model_, q);
  // Reference in the null space of J_h.
  Eigen::FullPivLU<Eigen::MatrixXd> lu(j);
  const Eigen::VectorXd tangent = lu.kernel().col(0);
  const Configuration q_hat = q + 1e-3 * tangent;
  const QpProblem p = AssembleQp(cfg, *model_, q, q_hat, ForwardKinematics(*model_, q).tray);
  EXPECT_TRUE(p.b_eq.isApprox(-cfg.alpha * h, 0.0));
  EXPECT_TRUE(p.a_eq.isApprox(j, 0.0));
}

TEST_F(ExecutorTest, TwoDofAssemblyMatchesHandDerivation) {
  // Toy 2-link arm with unit links: h = tip x - 1.2, task = tip y.
  const double q1 = 0.4, q2 = 0.9;
  const double s1 = std::sin(q1), c1 = std::cos(q1);
  const double s12 = std::sin(q1 + q2), c12 = std::cos(q1 + q2);
  QpInputs in;
  in.h = Eigen::VectorXd::Constant(1, c1 + c12 - 1.2);
  in.j_h = Eigen::RowVector2d(-s1 - s12, -s12);
  in.j_task = Eigen::RowVector2d(c1 + c12, c12);
  in.e_task = Eigen::VectorXd::Constant(1, s1 + s12 - 1.0);
  in.qd_ref = Eigen::Vector2d(0.3, -0.2);
  in.q_lower = Eigen::Vector2d(-1.0, -2.0);
  in.q_upper = Eigen::Vector2d(1.0, 2.0);
  ExecutorConfig cfg;
  cfg.alpha = 5.0;
  cfg.w_task = 2.0;
  cfg.kp_task = 3.0;
  cfg.dt = 0.01;
  cfg.epsilon = 1e-9;
  const Eigen::Vector2d q(q1, q2);
  const QpProblem p = AssembleQp(cfg, q, in);

  // Expanding |qd - r|^2 + w (j.qd + kp e)^2 gives
  // H = 2 (I + w j^T j) + eps I and g = -2 r + 2 w kp e j^T.
  const double a = c1 + c12, b = c12, e = s1 + s12 - 1.0;
  Eigen::Matrix2d h;
  h << 2.0 + 4.0 * a * a + 1e-9, 4.0 * a * b, 4.0 * a * b, 2.0 + 4.0 * b * b + 1e-9;
  const Eigen::Vector2d g(-0.6 + 12.0 * e * a, 0.4 + 12.0 * e * b);
  EXPECT_LT((p.h - h).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((p.g - g).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR(p.b_eq(0), -5.0 * (c1 + c12 - 1.2), 1e-15);
  EXPECT_NEAR((p.lo - Eigen::Vector2d(-140.0, -290.0)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((p.hi - Eigen::Vector2d(60.0, 110.0)).norm(), 0.0, 1e-12);

  Eigen::Matrix3d kkt = Eigen::Matrix3d::Zero();
  kkt.topLeftCorner<2, 2>() = p.h;
  kkt.topRightCorner<2, 1>() = p.a_eq.transpose();
  kkt.bottomLeftCorner<1, 2>() = p.a_eq;
  Eigen::Matrix3d hand;
  hand << h(0, 0), h(0, 1), -s1 - s12, h(1, 0), h(1, 1), -s12, -s1 - s12, -s12, 0.0;
  EXPECT_LT((kkt - hand).cwiseAbs().maxCoeff(), 1e-14);

  // Interior solution equals the KKT solve.
  const QpSolution s = SolveQp(p);
  ASSERT_EQ(s.status, QpStatus::kOptimal);
  const Eigen::Vector3d sol = hand.lu().solve(Eigen::Vector3d(-g(0), -g(1), p.b_eq(0)));
  EXPECT_LT((s.x - sol.head<2>()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST_F(ExecutorTest, ConstraintDecaysAtAlphaRate) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double dt : {0.002, 0.01}) {
    ExecutorConfig cfg;
    cfg.dt = dt;
    cfg.w_task = 0.0;
    const double expected = 1.0 - cfg.alpha * dt;
    for (double eps = 1e-5; eps <= 1e-2 * 1.0001; eps *= std::sqrt(10.0)) {
      const Configuration on = chart_->DecodeExact(Eigen::Vector3d(0.02, 0.43, 0.05));
      Eigen::VectorXd dir(6);
      for (int j = 0; j < 6; ++j) dir(j) = normal(rng);
      const Eigen::MatrixXd jh = ConstraintJacobian(*model_, on);
      // Leave the manifold along the row space of J_h.
      dir = jh.transpose() * (jh * jh.transpose()).ldlt().solve(jh * dir);
      Configuration q_c = on + dir;
      q_c = on + dir * (eps / Constraint(*model_, q_c).norm());
      ExecutorState state;
      const ExecutionResult r = ExecuteStep(cfg, *model_, &state, q_c, q_c,
                                            ForwardKinematics(*model_, q_c).tray);
      ASSERT_FALSE(r.report.fallback);
      const double ratio = PlanarResidualOracle(r.q_star) / PlanarResidualOracle(q_c);
      EXPECT_NEAR(ratio, expected, 0.05) << eps;
      EXPECT_NEAR(r.report.h_predicted / r.report.h_before, expected, 1e-6);
    }
  }
}

TEST_F(ExecutorTest, InfeasibleProblemFallsBack) {
  ExecutorConfig cfg;
  ExecutorState state;
  const Configuration q = model_->home();
  state.q_prev = chart_->DecodeExact(Eigen::Vector3d(0.0, 0.45, 0.0));
  const ExecutionResult r = ExecuteStep(
      cfg, *model_, &state, q, q, ForwardKinematics(*model_, q).tray,
      [](QpProblem* p) { std::swap(p->lo, p->hi); });
  EXPECT_TRUE(r.report.fallback);
  EXPECT_EQ(r.report.status, QpStatus::kInfeasible);
  EXPECT_EQ(state.fallback_count, 1);
  EXPECT_EQ(r.q_star, state.q_prev);
  EXPECT_TRUE(model_->WithinBounds(r.q_star));
}

TEST_F(ExecutorTest, ExactReferenceKeepsManifold) {
  ExecutorConfig cfg;
  const Eigen::Vector3d z(0.03, 0.44, -0.05);
  const Configuration q_c = chart_->DecodeExact(z);
  const Configuration q_hat = chart_->DecodeExact(z + Eigen::Vector3d(2e-5, -1e-5, 2e-5));
  ExecutorState state;
  const ExecutionResult r = ExecuteStep(cfg, *model_, &state, q_c, q_hat,
                                        ForwardKinematics(*model_, q_hat).tray);
  ASSERT_FALSE(r.report.fallback);
  EXPECT_LT(PlanarResidualOracle(r.q_star), 1e-8);
}

TEST_F(ExecutorTest, OutputStaysWithinBounds) {
  ExecutorConfig cfg;
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal(0.0, 0.5);
  for (int trial = 0; trial < 100; ++trial) {
    const Configuration q_c = chart_->DecodeExact(Eigen::Vector3d(0.0, 0.45, 0.0));
    Configuration q_hat = q_c;
    for (int j = 0; j < 6; ++j) q_hat(j) += normal(rng);
    ExecutorState state;
    const ExecutionResult r = ExecuteStep(cfg, *model_, &state, q_c, q_hat,
                                          ForwardKinematics(*model_, q_c).tray);
    EXPECT_TRUE(model_->WithinBounds(r.q_star));
    EXPECT_TRUE(model_->WithinBounds(state.q_prev));
  }
}

TEST(ExecutorConfigTest, Validation) {
  ExecutorConfig cfg;
  EXPECT_NO_THROW(cfg.Validate());
  cfg.alpha = 600.0;
  EXPECT_THROW(cfg.Validate(), std::invalid_argument);
  cfg.alpha = 0.0;
  EXPECT_THROW(cfg.Validate(), std::invalid_argument);
  cfg = ExecutorConfig();
  cfg.w_task = -1.0;
  EXPECT_THROW(cfg.Validate(), std::invalid_argument);
}

}  // namespace
}  // namespace mcmppi
