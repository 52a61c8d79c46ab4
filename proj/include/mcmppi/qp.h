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

// Dense strictly convex QP with equality rows and box bounds:
//
//   minimize   1/2 x^T H x + g^T x
//   subject to A_eq x = b_eq,  lo <= x <= hi.
//
// Solved with the Goldfarb-Idnani dual active-set method: start at the
// unconstrained minimizer, add the equalities, then repeatedly add the most
// violated bound and drop bounds whose multipliers would turn negative.
// Every iterate solves the KKT system of its working set exactly.

#ifndef MCMPPI_QP_H_
#define MCMPPI_QP_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mcmppi {

struct QpProblem {
  Eigen::MatrixXd h;     // n x n, symmetric positive definite
  Eigen::VectorXd g;     // n
  Eigen::MatrixXd a_eq;  // l x n
  Eigen::VectorXd b_eq;  // l
  Eigen::VectorXd lo;    // n
  Eigen::VectorXd hi;    // n

  int size() const { return static_cast<int>(g.size()); }
  double Objective(const Eigen::VectorXd& x) const {
    return 0.5 * x.dot(h * x) + g.dot(x);
  }
};

enum class QpStatus {
  kOptimal,
  kInfeasible,     // equalities and bounds have no common point
  kMaxIterations,  // iteration budget exhausted
  kNotConvex,      // H is not positive definite
};

std::string QpStatusName(QpStatus status);

struct KktResiduals {
  double stationarity = 0.0;     // ||H x + g + A_eq^T nu + mu||_inf
  double equality = 0.0;         // ||A_eq x - b_eq||_inf
  double bounds = 0.0;           // worst bound violation
  // max |mu_i| times the distance to the bound its sign selects.
  double complementarity = 0.0;
};

struct QpSolution {
  QpStatus status = QpStatus::kOptimal;
  Eigen::VectorXd x;
  Eigen::VectorXd nu;  // equality multipliers
  // Bound multipliers: mu_i <= 0 on an active lower bound, >= 0 on an active
  // upper bound, zero otherwise.
  Eigen::VectorXd mu;
  // Active bounds: +(i + 1) for an upper bound on x_i, -(i + 1) for a lower.
  std::vector<int> active_set;
  int iterations = 0;
  KktResiduals kkt;
};

struct QpOptions {
  double tol = 1e-12;  // bound violation accepted as satisfied
  int max_iter = 200;
};

QpSolution SolveQp(const QpProblem& problem, const QpOptions& options = {});

KktResiduals ComputeKkt(const QpProblem& problem, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& nu, const Eigen::VectorXd& mu);

}  // namespace mcmppi

#endif  // MCMPPI_QP_H_
