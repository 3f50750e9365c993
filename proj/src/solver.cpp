#include "imucal/solver.hpp"

#include <chrono>
#include <cmath>

#include "imucal/errors.hpp"
#include "imucal/normal_equations.hpp"

namespace imucal {

namespace {

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

SolveReport calibrate_in_place(const LeastSquaresProblem& problem, CalibrationState& state,
                               const LmOptions& options, EvalCounters* counters) {
  const double start = now_seconds();
  SolveReport report;

  const auto count_blocks = [&] {
    if (counters) counters->calibrate_residual_block_evals += problem.num_residual_blocks();
  };
  if (counters) counters->calibrate_calls += 1;

  count_blocks();
  double cost = problem.evaluate_cost(state);
  report.initial_cost = cost;
  report.cost_trace.push_back(cost);

  count_blocks();
  NormalEquations ne = NormalEquations::assemble(problem, state);
  double mu = options.initial_damping_scale * std::max(ne.max_diagonal(), 1e-12);
  report.termination = "max_iterations";

  while (report.iterations < options.max_iterations) {
    if (ne.gradient_inf_norm() < options.gradient_tolerance) {
      report.termination = "gradient_tolerance";
      break;
    }

    Eigen::VectorXd delta;
    if (!ne.solve_damped(mu, delta)) {
      mu *= options.damping_factor;
      if (mu > options.max_damping) {
        report.termination = "stationary";
        report.converged_to_stationary = true;
        break;
      }
      continue;
    }

    const CalibrationState trial = problem.retract(state, delta);
    count_blocks();
    double trial_cost;
    try {
      trial_cost = problem.evaluate_cost(trial);
    } catch (const NumericalError&) {
      trial_cost = std::numeric_limits<double>::infinity();
    }

    if (trial_cost < cost) {
      const double relative_drop = (cost - trial_cost) / std::max(cost, 1e-300);
      state = trial;
      cost = trial_cost;
      report.iterations += 1;
      report.cost_trace.push_back(cost);
      mu = std::max(mu / options.damping_factor, 1e-18);
      if (relative_drop < options.relative_cost_tolerance) {
        report.termination = "cost_tolerance";
        break;
      }
      count_blocks();
      ne = NormalEquations::assemble(problem, state);
    } else {
      mu *= options.damping_factor;
      if (mu > options.max_damping) {
        report.termination = "stationary";
        report.converged_to_stationary = true;
        break;
      }
    }
  }

  report.final_cost = cost;
  report.wall_seconds = now_seconds() - start;
  return report;
}

std::pair<CalibrationState, SolveReport> calibrate(const LeastSquaresProblem& problem,
                                                   const CalibrationState& state0,
                                                   const LmOptions& options,
                                                   EvalCounters* counters) {
  CalibrationState state = state0;
  SolveReport report = calibrate_in_place(problem, state, options, counters);
  return {std::move(state), std::move(report)};
}

}  // namespace imucal
