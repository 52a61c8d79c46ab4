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

// Execution stage: one corrective QP per control period that tracks the
// planner reference while driving the linearized closure residual to zero
// at rate alpha, inside the joint position limits.

#ifndef MCMPPI_EXECUTOR_H_
#define MCMPPI_EXECUTOR_H_

#include <functional>
#include <string>

#include <Eigen/Dense>

#include "mcmppi/chain_model.h"
#include "mcmppi/geometry.h"
#include "mcmppi/kinematics.h"
#include "mcmppi/qp.h"

namespace mcmppi {

struct ExecutorConfig {
  double alpha = 5.0;    // 1/s
  double w_task = 1.0;
  double kp_task = 5.0;  // 1/s
  double dt = 0.002;     // s
  TaskFrame task_frame = TaskFrame::kTrayCenter;
  double epsilon = 1e-9;
  QpOptions qp;

  // Throws std::invalid_argument on a violated invariant.
  void Validate() const;
};

struct ExecutorState {
  Configuration q_prev;
  int fallback_count = 0;
};

// Linearization data of one step, exposed for testing.
struct QpInputs {
  Eigen::VectorXd h;        // h(q_c)
  Eigen::MatrixXd j_h;      // l x n
  Eigen::MatrixXd j_task;   // task_dim x n
  Eigen::VectorXd e_task;   // pose error of the task frame to its goal
  Eigen::VectorXd qd_ref;   // (q_hat - q_c) / dt
  Eigen::VectorXd q_lower;  // joint bounds
  Eigen::VectorXd q_upper;
};

// Quadratic objective |qd - qd_ref|^2 + w_task |J_task qd + kp e_task|^2 in
// the QP's 1/2 x^T H x + g^T x form, with J_h qd = -alpha h and the joint
// bounds mapped to velocity bounds over dt.
QpProblem AssembleQp(const ExecutorConfig& cfg, const Configuration& q_c,
                     const QpInputs& inputs);
QpInputs LinearizeStep(const ExecutorConfig& cfg, const ChainModel& model,
                       const Configuration& q_c, const Configuration& q_hat,
                       const Transform& task_goal);
QpProblem AssembleQp(const ExecutorConfig& cfg, const ChainModel& model,
                     const Configuration& q_c, const Configuration& q_hat,
                     const Transform& task_goal);

struct ExecutionReport {
  double h_before = 0.0;     // ||h(q_c)||
  double h_predicted = 0.0;  // ||h(q_c) + J_h qd dt||
  double h_after = 0.0;      // ||h(q*)||
  double task_error = 0.0;   // ||e_task(q_c)||
  int iterations = 0;
  int active_set_size = 0;
  bool fallback = false;
  QpStatus status = QpStatus::kOptimal;
  double solve_ms = 0.0;
};

struct ExecutionResult {
  Configuration q_star;
  ExecutionReport report;
};

// Optional hook that may edit the assembled problem before the solve.
using QpHook = std::function<void(QpProblem*)>;

// Assemble, solve and integrate one step. A failed solve (or a singular
// linearization) returns state->q_prev and counts a fallback. The returned
// configuration is always inside the joint bounds and becomes q_prev.
ExecutionResult ExecuteStep(const ExecutorConfig& cfg, const ChainModel& model,
                            ExecutorState* state, const Configuration& q_c,
                            const Configuration& q_hat, const Transform& task_goal,
                            const QpHook& hook = {});

// JSON line; the solve time is included only when `with_timing` is set.
std::string ExecutionReportJson(const ExecutionReport& report, double t,
                                bool with_timing);

}  // namespace mcmppi

#endif  // MCMPPI_EXECUTOR_H_
