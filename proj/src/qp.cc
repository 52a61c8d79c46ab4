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

#include "mcmppi/qp.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mcmppi {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Working-set entry: equality rows are encoded as -(row + 1), bounds as
// 0..n-1 (lower) and n..2n-1 (upper).
struct Working {
  std::vector<int> ids;
  std::vector<double> u;
};

class GoldfarbIdnani {
 public:
  GoldfarbIdnani(const QpProblem& p, const QpOptions& options)
      : p_(p), n_(p.size()), options_(options) {}

  QpSolution Solve() {
    QpSolution out;
    out.x = Eigen::VectorXd::Zero(n_);
    llt_.compute(p_.h);
    if (llt_.info() != Eigen::Success) {
      out.status = QpStatus::kNotConvex;
      return out;
    }
    x_ = -llt_.solve(p_.g);

    for (int j = 0; j < p_.a_eq.rows(); ++j) {
      const Eigen::VectorXd normal = p_.a_eq.row(j).transpose();
      Step(normal);
      const double s = normal.dot(x_) - p_.b_eq(j);
      const double zn = z_.dot(normal);
      if (!(zn > kDependent * d_norm2_)) {
        if (std::abs(s) <= 1e-9 * (1.0 + std::abs(p_.b_eq(j)))) continue;
        return Finish(QpStatus::kInfeasible, &out);
      }
      const double t = -s / zn;
      x_ += t * z_;
      for (std::size_t a = 0; a < work_.u.size(); ++a) work_.u[a] -= t * r_(a);
      work_.ids.push_back(-(j + 1));
      work_.u.push_back(t);
    }

    while (true) {
      int p = -1;
      double worst = -options_.tol;
      for (int c = 0; c < 2 * n_; ++c) {
        if (Active(c)) continue;
        const double v = Slack(c) / (1.0 + std::abs(Bound(c)));
        if (v < worst) {
          worst = v;
          p = c;
        }
      }
      if (p < 0) return Finish(QpStatus::kOptimal, &out);

      const Eigen::VectorXd normal = Normal(p);
      double u_plus = 0.0;
      while (true) {
        if (++iterations_ > options_.max_iter) {
          return Finish(QpStatus::kMaxIterations, &out);
        }
        Step(normal);
        double t1 = kInf;
        int drop = -1;
        for (std::size_t a = 0; a < work_.ids.size(); ++a) {
          if (work_.ids[a] < 0 || !(r_(a) > 0.0)) continue;
          const double ratio = work_.u[a] / r_(a);
          if (ratio < t1) {
            t1 = ratio;
            drop = static_cast<int>(a);
          }
        }
        const double zn = z_.dot(normal);
        const double t2 = zn > kDependent * d_norm2_ ? -Slack(p) / zn : kInf;
        if (t1 == kInf && t2 == kInf) return Finish(QpStatus::kInfeasible, &out);
        const double t = std::min(t1, t2);
        if (t2 < kInf) x_ += t * z_;
        for (std::size_t a = 0; a < work_.u.size(); ++a) work_.u[a] -= t * r_(a);
        u_plus += t;
        if (t2 <= t1) {
          work_.ids.push_back(p);
          work_.u.push_back(u_plus);
          break;
        }
        work_.ids.erase(work_.ids.begin() + drop);
        work_.u.erase(work_.u.begin() + drop);
      }
    }
  }

 private:
  static constexpr double kDependent = 1e-12;

  bool Active(int c) const {
    return std::find(work_.ids.begin(), work_.ids.end(), c) != work_.ids.end();
  }
  double Bound(int c) const { return c < n_ ? p_.lo(c) : p_.hi(c - n_); }
  double Slack(int c) const {
    return c < n_ ? x_(c) - p_.lo(c) : p_.hi(c - n_) - x_(c - n_);
  }
  Eigen::VectorXd Normal(int c) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n_);
    if (c < n_) {
      v(c) = 1.0;
    } else {
      v(c - n_) = -1.0;
    }
    return v;
  }
  Eigen::VectorXd NormalOf(int id) const {
    return id < 0 ? Eigen::VectorXd(p_.a_eq.row(-id - 1).transpose()) : Normal(id);
  }

  // Primal direction z_ and dual direction r_ for adding `normal` to the
  // working set: z = H^-1 (I - N (N^T H^-1 N)^-1 N^T H^-1) n+,
  // r = (N^T H^-1 N)^-1 N^T H^-1 n+.
  void Step(const Eigen::VectorXd& normal) {
    const auto l = llt_.matrixL();
    const Eigen::VectorXd d = l.solve(normal);
    d_norm2_ = d.squaredNorm();
    const int q = static_cast<int>(work_.ids.size());
    if (q == 0) {
      r_.resize(0);
      z_ = llt_.matrixU().solve(d);
      return;
    }
    Eigen::MatrixXd n(n_, q);
    for (int a = 0; a < q; ++a) n.col(a) = NormalOf(work_.ids[a]);
    const Eigen::MatrixXd b = l.solve(n);
    r_ = b.householderQr().solve(d);
    z_ = llt_.matrixU().solve(d - b * r_);
  }

  QpSolution Finish(QpStatus status, QpSolution* out) {
    out->status = status;
    out->iterations = iterations_;
    out->x = x_;
    out->nu = Eigen::VectorXd::Zero(p_.a_eq.rows());
    out->mu = Eigen::VectorXd::Zero(n_);
    out->active_set.clear();
    for (std::size_t a = 0; a < work_.ids.size(); ++a) {
      const int id = work_.ids[a];
      if (id < 0) {
        out->nu(-id - 1) = -work_.u[a];
      } else if (id < n_) {
        out->mu(id) = -work_.u[a];
        out->active_set.push_back(-(id + 1));
      } else {
        out->mu(id - n_) = work_.u[a];
        out->active_set.push_back(id - n_ + 1);
      }
    }
    out->kkt = ComputeKkt(p_, out->x, out->nu, out->mu);
    return std::move(*out);
  }

  const QpProblem& p_;
  const int n_;
  const QpOptions options_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd x_;
  Eigen::VectorXd z_;
  Eigen::VectorXd r_;
  double d_norm2_ = 0.0;
  Working work_;
  int iterations_ = 0;
};

}  // namespace

std::string QpStatusName(QpStatus status) {
  switch (status) {
    case QpStatus::kOptimal:
      return "optimal";
    case QpStatus::kInfeasible:
      return "infeasible";
    case QpStatus::kMaxIterations:
      return "max_iterations";
    case QpStatus::kNotConvex:
      return "not_convex";
  }
  return "unknown";
}

KktResiduals ComputeKkt(const QpProblem& p, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& nu, const Eigen::VectorXd& mu) {
  KktResiduals k;
  Eigen::VectorXd grad = p.h * x + p.g + mu;
  if (p.a_eq.rows() > 0) grad += p.a_eq.transpose() * nu;
  k.stationarity = grad.cwiseAbs().maxCoeff();
  if (p.a_eq.rows() > 0) {
    k.equality = (p.a_eq * x - p.b_eq).cwiseAbs().maxCoeff();
  }
  for (int i = 0; i < p.size(); ++i) {
    k.bounds = std::max({k.bounds, p.lo(i) - x(i), x(i) - p.hi(i)});
    const double gap = mu(i) < 0.0 ? x(i) - p.lo(i) : p.hi(i) - x(i);
    if (mu(i) != 0.0) {
      k.complementarity = std::max(k.complementarity, std::abs(mu(i) * gap));
    }
  }
  return k;
}

QpSolution SolveQp(const QpProblem& problem, const QpOptions& options) {
  return GoldfarbIdnani(problem, options).Solve();
}

}  // namespace mcmppi
