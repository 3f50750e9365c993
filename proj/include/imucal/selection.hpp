#pragma once

#include <optional>
#include <string>
#include <vector>

#include "imucal/information.hpp"
#include "imucal/solver.hpp"
#include "imucal/state.hpp"
#include "imucal/types.hpp"

namespace imucal {

enum class Policy { kBaseline, kGreedyOriginal, kGreedyInitParam, kMLargest };

const char* policy_name(Policy policy);
Policy policy_from_string(const std::string& name);

struct SegmentDecision {
  int segment = 0;  // 0-based
  std::optional<double> info_scalar;  // -0.5 log|Sigma| after this decision (or of the segment)
  std::optional<double> utility;      // undefined for the empty-prior acceptance
  bool accepted = false;
  std::string error;  // non-empty when the candidate was rejected with an estimator failure
};

struct SelectionReport {
  Policy policy = Policy::kBaseline;
  std::vector<int> selected;  // 0-based, sorted ascending
  std::vector<SegmentDecision> decisions;
  EvalCounters counters;
  double evaluate_seconds = 0.0;
  double calibrate_seconds = 0.0;
  CalibrationState final_state;
  SolveReport final_solve;
  std::vector<std::string> warnings;

  int num_segments = 0;
  int steps_per_segment = 0;
  int dropped_steps = 0;

  double selected_ratio() const {
    return num_segments > 0 ? static_cast<double>(selected.size()) / num_segments : 0.0;
  }
};

/// Original greedy policy: per candidate, Calibrate on the selected set plus
/// the candidate starting from the running estimate, re-evaluate the Fisher
/// information of every involved segment at the refreshed estimate, and
/// accept when the utility exceeds lambda (the first segment is accepted
/// unconditionally). The running estimate advances only on acceptance; the
/// final parameters are the running estimate after the loop.
SelectionReport select_greedy_original(const SegmentedData& data, const CalibrationState& theta0,
                                       const NoiseSpec& noise, double lambda,
                                       const LmOptions& lm = {});

/// Init-param greedy policy: every Jacobian is evaluated at theta0, only the
/// candidate segment's Fisher information is computed per iteration (the
/// accumulated part is cached), and a single Calibrate runs after the loop.
SelectionReport select_greedy_init_param(const SegmentedData& data,
                                         const CalibrationState& theta0, const NoiseSpec& noise,
                                         double lambda, const LmOptions& lm = {});

/// Scores every segment by its own information at theta0 and keeps the top M
/// (ties to the lower index; unobservable segments are excluded), then
/// calibrates once over the chosen set.
SelectionReport select_m_largest(const SegmentedData& data, const CalibrationState& theta0,
                                 const NoiseSpec& noise, int m, const LmOptions& lm = {});

/// All segments, one Calibrate.
SelectionReport select_baseline(const SegmentedData& data, const CalibrationState& theta0,
                                const NoiseSpec& noise, const LmOptions& lm = {});

SelectionReport run_policy(Policy policy, const SegmentedData& data,
                           const CalibrationState& theta0, const NoiseSpec& noise, double lambda,
                           int m, const LmOptions& lm = {});

/// |A intersect B| / |A union B| of two selected sets.
double jaccard_overlap(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace imucal
