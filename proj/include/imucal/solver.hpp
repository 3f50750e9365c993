#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imucal/problem.hpp"
#include "imucal/state.hpp"

namespace imucal {

struct LmOptions {
  int max_iterations = 100;
  double initial_damping_scale = 1e-4;  // mu0 = scale * max diag(J^T J)
  double damping_factor = 10.0;         // x10 on rejection, /10 on acceptance
  double relative_cost_tolerance = 1e-10;
  double gradient_tolerance = 1e-10;
  double max_damping = 1e32;
};

/// Exact work counters backing the complexity claims; shared by the selection
/// policies and the solver.
struct EvalCounters {
  int64_t segment_jacobian_evals = 0;       // per-segment Fisher/Jacobian evaluations
  int64_t calibrate_calls = 0;
  int64_t calibrate_residual_block_evals = 0;
};

struct SolveReport {
  int iterations = 0;  // accepted steps
  double initial_cost = 0.0;
  double final_cost = 0.0;
  std::string termination;  // cost_tolerance | gradient_tolerance | max_iterations | stationary
  bool converged_to_stationary = false;
  double wall_seconds = 0.0;
  std::vector<double> cost_trace;
};

/// Levenberg-Marquardt minimization of the whitened least-squares cost.
/// psi is eliminated per timestep inside each linear solve, so one iteration
/// is linear in the number of selected timesteps. Deterministic given inputs.
SolveReport calibrate_in_place(const LeastSquaresProblem& problem, CalibrationState& state,
                               const LmOptions& options = {}, EvalCounters* counters = nullptr);

/// Convenience wrapper returning the optimized copy.
std::pair<CalibrationState, SolveReport> calibrate(const LeastSquaresProblem& problem,
                                                   const CalibrationState& state0,
                                                   const LmOptions& options = {},
                                                   EvalCounters* counters = nullptr);

}  // namespace imucal
