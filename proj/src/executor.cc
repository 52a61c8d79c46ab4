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

#include "mcmppi/executor.h"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace mcmppi {

void ExecutorConfig::Validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("executor: alpha must be > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("executor: dt must be > 0");
  if (alpha * dt > 1.0) {
    throw std::invalid_argument("executor: alpha * dt must not exceed 1");
  }
  if (!(w_task >= 0.0)) throw std::invalid_argument("executor: w_task must be >= 0");
  if (!(kp_task >= 0.0)) throw std::invalid_argument("executor: kp_task must be >= 0");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("executor: epsilon must be >= 0");
}

QpProblem AssembleQp(const ExecutorConfig& cfg, const Configuration& q_c,
                     const QpInputs& in) {
  const int n = static_cast<int>(q_c.size());
  const Eigen::VectorXd xd_task = -cfg.kp_task * in.e_task;
  QpProblem p;
  p.h = 2.0 * (Eigen::MatrixXd::Identity(n, n) +
               cfg.w_task * in.j_task.transpose() * in.j_task);
  p.h.diagonal().array() += cfg.epsilon;
  p.g = -2.0 * (in.qd_ref + cfg.w_task * in.j_task.transpose() * xd_task);
  p.a_eq = in.j_h;
  p.b_eq = -cfg.alpha * in.h;
  p.lo = (in.q_lower - q_c) / cfg.dt;
  p.hi = (in.q_upper - q_c) / cfg.dt;
  return p;
}

QpInputs LinearizeStep(const ExecutorConfig& cfg, const ChainModel& model,
                       const Configuration& q_c, const Configuration& q_hat,
                       const Transform& task_goal) {
  QpInputs in;
  in.h = Constraint(model, q_c).values;
  in.j_h = ConstraintJacobian(model, q_c);
  in.j_task = TaskJacobian(model, q_c, cfg.task_frame);
  const DualArmPoses poses = ForwardKinematics(model, q_c);
  const Transform& frame =
      cfg.task_frame == TaskFrame::kTrayCenter ? poses.tray : poses.left_ee;
  in.e_task = PoseError(frame, task_goal);
  in.qd_ref = (q_hat - q_c) / cfg.dt;
  in.q_lower = model.lower();
  in.q_upper = model.upper();
  return in;
}

QpProblem AssembleQp(const ExecutorConfig& cfg, const ChainModel& model,
                     const Configuration& q_c, const Configuration& q_hat,
                     const Transform& task_goal) {
  return AssembleQp(cfg, q_c, LinearizeStep(cfg, model, q_c, q_hat, task_goal));
}

ExecutionResult ExecuteStep(const ExecutorConfig& cfg, const ChainModel& model,
                            ExecutorState* state, const Configuration& q_c,
                            const Configuration& q_hat, const Transform& task_goal,
                            const QpHook& hook) {
  const auto start = std::chrono::steady_clock::now();
  if (state->q_prev.size() != model.joint_count()) {
    state->q_prev = model.Clamp(q_c);
  }
  ExecutionResult out;
  ExecutionReport& report = out.report;
  bool solved = false;
  try {
    const QpInputs in = LinearizeStep(cfg, model, q_c, q_hat, task_goal);
    report.h_before = in.h.norm();
    report.task_error = in.e_task.norm();
    QpProblem problem = AssembleQp(cfg, q_c, in);
    if (hook) hook(&problem);
    const QpSolution sol = SolveQp(problem, cfg.qp);
    report.status = sol.status;
    report.iterations = sol.iterations;
    report.active_set_size = static_cast<int>(sol.active_set.size());
    if (sol.status == QpStatus::kOptimal) {
      report.h_predicted = (in.h + in.j_h * sol.x * cfg.dt).norm();
      // Rounding in q_c + qd dt can leave a bound by an ulp.
      out.q_star = model.Clamp(q_c + sol.x * cfg.dt);
      solved = true;
    }
  } catch (const GeometryError&) {
    report.status = QpStatus::kInfeasible;
  }
  if (!solved) {
    out.q_star = state->q_prev;
    report.fallback = true;
    ++state->fallback_count;
  }
  try {
    report.h_after = Constraint(model, out.q_star).norm();
  } catch (const GeometryError&) {
    report.h_after = std::numeric_limits<double>::infinity();
  }
  state->q_prev = out.q_star;
  report.solve_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
  return out;
}

std::string ExecutionReportJson(const ExecutionReport& r, double t,
                                bool with_timing) {
  auto finite = [](double v) -> nlohmann::ordered_json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  nlohmann::ordered_json j;
  j["t"] = t;
  j["h_before"] = finite(r.h_before);
  j["h_predicted"] = finite(r.h_predicted);
  j["h_after"] = finite(r.h_after);
  j["task_error"] = finite(r.task_error);
  j["iterations"] = r.iterations;
  j["active_set_size"] = r.active_set_size;
  j["fallback"] = r.fallback;
  j["status"] = QpStatusName(r.status);
  if (with_timing) j["solve_ms"] = r.solve_ms;
  return j.dump();
}

}  // namespace mcmppi
