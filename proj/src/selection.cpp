#include "imucal/selection.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "imucal/errors.hpp"
#include "imucal/problem.hpp"

namespace imucal {

namespace {

class PhaseTimer {
 public:
  explicit PhaseTimer(double& sink) : sink_(sink), start_(clock::now()) {}
  ~PhaseTimer() { sink_ += std::chrono::duration<double>(clock::now() - start_).count(); }

 private:
  using clock = std::chrono::steady_clock;
  double& sink_;
  clock::time_point start_;
};

SelectionReport make_report(Policy policy, const SegmentedData& data,
                            const CalibrationState& theta0) {
  SelectionReport report;
  report.policy = policy;
  report.num_segments = data.num_segments();
  report.steps_per_segment = data.steps_per_segment();
  report.dropped_steps = data.dropped_steps();
  report.final_state = theta0;
  if (data.dropped_steps() > 0) {
    report.warnings.push_back("dropped trailing partial segment of " +
                              std::to_string(data.dropped_steps()) + " timesteps");
  }
  return report;
}

}  // namespace

const char* policy_name(Policy policy) {
  switch (policy) {
    case Policy::kBaseline: return "baseline";
    case Policy::kGreedyOriginal: return "greedy-original";
    case Policy::kGreedyInitParam: return "greedy-init";
    case Policy::kMLargest: return "m-largest";
  }
  return "?";
}

Policy policy_from_string(const std::string& name) {
  if (name == "baseline") return Policy::kBaseline;
  if (name == "greedy-original") return Policy::kGreedyOriginal;
  if (name == "greedy-init") return Policy::kGreedyInitParam;
  if (name == "m-largest") return Policy::kMLargest;
  throw ConfigError("unknown policy '" + name + "'");
}

SelectionReport select_greedy_original(const SegmentedData& data, const CalibrationState& theta0,
                                       const NoiseSpec& noise, double lambda,
                                       const LmOptions& lm) {
  if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
  SelectionReport report = make_report(Policy::kGreedyOriginal, data, theta0);

  CalibrationState theta_minus = theta0;
  std::vector<int> info_set;
  double logdet_prior = 0.0;  // meaningful only once info_set is nonempty

  for (int candidate = 0; candidate < data.num_segments(); ++candidate) {
    SegmentDecision decision;
    decision.segment = candidate;

    std::vector<int> joint = info_set;
    joint.push_back(candidate);

    try {
      const LeastSquaresProblem problem(data, joint, noise, true);
      CalibrationState theta_plus = theta_minus;
      {
        PhaseTimer timer(report.calibrate_seconds);
        report.final_solve = calibrate_in_place(problem, theta_plus, lm, &report.counters);
      }

      double logdet_post;
      {
        PhaseTimer timer(report.evaluate_seconds);
        MarginalInfo info(theta0.theta_dim(), EvalPoint::kCurrentEstimate);
        for (int l : joint) {
          info.add(marginalize_segment(
              segment_fisher(data.segment(l), theta_plus, noise, &report.counters)));
        }
        logdet_post = logdet_sigma_regularized(info.h_theta());
      }
      decision.info_scalar = -0.5 * logdet_post;

      bool accept = info_set.empty();
      if (!info_set.empty()) {
        const double u = utility(logdet_prior, logdet_post);
        decision.utility = u;
        accept = u > lambda;
      }
      if (accept) {
        info_set = std::move(joint);
        logdet_prior = logdet_post;
        theta_minus = std::move(theta_plus);
        decision.accepted = true;
      }
    } catch (const std::exception& e) {
      decision.error = e.what();
    }
    report.decisions.push_back(std::move(decision));
  }

  report.selected = info_set;
  report.final_state = std::move(theta_minus);
  return report;
}

SelectionReport select_greedy_init_param(const SegmentedData& data,
                                         const CalibrationState& theta0, const NoiseSpec& noise,
                                         double lambda, const LmOptions& lm) {
  if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
  SelectionReport report = make_report(Policy::kGreedyInitParam, data, theta0);

  MarginalInfo cache(theta0.theta_dim(), EvalPoint::kInitialGuess);
  std::vector<int> info_set;
  double logdet_prior = 0.0;

  for (int candidate = 0; candidate < data.num_segments(); ++candidate) {
    SegmentDecision decision;
    decision.segment = candidate;
    try {
      PhaseTimer timer(report.evaluate_seconds);
      // Evaluation-point contract: every Jacobian strictly at theta0.
      const Eigen::MatrixXd contribution = marginalize_segment(
          segment_fisher(data.segment(candidate), theta0, noise, &report.counters));
      const double logdet_post =
          logdet_sigma_regularized(cache.h_theta() + contribution);
      decision.info_scalar = -0.5 * logdet_post;

      bool accept = info_set.empty();
      if (!info_set.empty()) {
        const double u = utility(logdet_prior, logdet_post);
        decision.utility = u;
        accept = u > lambda;
      }
      if (accept) {
        cache.add(contribution);  // the kept J(D_info)^T J(D_info) at theta0
        info_set.push_back(candidate);
        logdet_prior = logdet_post;
        decision.accepted = true;
      }
    } catch (const std::exception& e) {
      decision.error = e.what();
    }
    report.decisions.push_back(std::move(decision));
  }

  report.selected = info_set;
  if (!info_set.empty()) {
    const LeastSquaresProblem problem(data, info_set, noise, true);
    CalibrationState state = theta0;
    {
      PhaseTimer timer(report.calibrate_seconds);
      report.final_solve = calibrate_in_place(problem, state, lm, &report.counters);
    }
    report.final_state = std::move(state);
  }
  return report;
}

SelectionReport select_m_largest(const SegmentedData& data, const CalibrationState& theta0,
                                 const NoiseSpec& noise, int m, const LmOptions& lm) {
  if (m < 1 || m > data.num_segments()) throw ConfigError("M out of range");
  SelectionReport report = make_report(Policy::kMLargest, data, theta0);

  std::vector<double> scalars;
  {
    PhaseTimer timer(report.evaluate_seconds);
    scalars.resize(data.num_segments());
    for (int l = 0; l < data.num_segments(); ++l) {
      scalars[l] = information_scalar(
          marginalize_segment(segment_fisher(data.segment(l), theta0, noise, &report.counters)));
    }
  }

  std::vector<int> order(data.num_segments());
  for (int l = 0; l < data.num_segments(); ++l) order[l] = l;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (scalars[a] != scalars[b]) return scalars[a] > scalars[b];
    return a < b;  // ties to the lower segment index
  });

  std::vector<int> selected;
  for (int i = 0; i < m && i < static_cast<int>(order.size()); ++i) {
    if (std::isinf(scalars[order[i]]) && scalars[order[i]] < 0) continue;  // unobservable
    selected.push_back(order[i]);
  }
  std::sort(selected.begin(), selected.end());
  if (static_cast<int>(selected.size()) < m) {
    report.warnings.push_back("only " + std::to_string(selected.size()) +
                              " observable segments available for M=" + std::to_string(m));
  }

  for (int l = 0; l < data.num_segments(); ++l) {
    SegmentDecision decision;
    decision.segment = l;
    if (std::isfinite(scalars[l])) decision.info_scalar = scalars[l];
    decision.accepted = std::binary_search(selected.begin(), selected.end(), l);
    report.decisions.push_back(decision);
  }

  report.selected = selected;
  if (!selected.empty()) {
    const LeastSquaresProblem problem(data, selected, noise, true);
    CalibrationState state = theta0;
    {
      PhaseTimer timer(report.calibrate_seconds);
      report.final_solve = calibrate_in_place(problem, state, lm, &report.counters);
    }
    report.final_state = std::move(state);
  }
  return report;
}

SelectionReport select_baseline(const SegmentedData& data, const CalibrationState& theta0,
                                const NoiseSpec& noise, const LmOptions& lm) {
  SelectionReport report = make_report(Policy::kBaseline, data, theta0);
  std::vector<int> selected(data.num_segments());
  for (int l = 0; l < data.num_segments(); ++l) selected[l] = l;
  report.selected = selected;
  for (int l : selected) {
    SegmentDecision decision;
    decision.segment = l;
    decision.accepted = true;
    report.decisions.push_back(decision);
  }

  const LeastSquaresProblem problem(data, selected, noise, true);
  CalibrationState state = theta0;
  {
    PhaseTimer timer(report.calibrate_seconds);
    report.final_solve = calibrate_in_place(problem, state, lm, &report.counters);
  }
  report.final_state = std::move(state);
  return report;
}

SelectionReport run_policy(Policy policy, const SegmentedData& data,
                           const CalibrationState& theta0, const NoiseSpec& noise, double lambda,
                           int m, const LmOptions& lm) {
  switch (policy) {
    case Policy::kBaseline: return select_baseline(data, theta0, noise, lm);
    case Policy::kGreedyOriginal: return select_greedy_original(data, theta0, noise, lambda, lm);
    case Policy::kGreedyInitParam:
      return select_greedy_init_param(data, theta0, noise, lambda, lm);
    case Policy::kMLargest: return select_m_largest(data, theta0, noise, m, lm);
  }
  throw ConfigError("unknown policy");
}

double jaccard_overlap(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> intersection, set_union;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(intersection));
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(set_union));
  return set_union.empty() ? 1.0 : static_cast<double>(intersection.size()) / set_union.size();
}

}  // namespace imucal
