#pragma once

#include <cstdint>
#include <vector>

#include "imucal/selection.hpp"
#include "imucal/state.hpp"
#include "imucal/types.hpp"

namespace imucal {

/// Spearman rank correlation with average ranks for ties (Pearson on ranks).
/// Throws UndefinedCorrelationError when either series is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct SweepPoint {
  double dp = 0.0;   // m
  double dq = 0.0;   // deg
  double rho = 1.0;
};

/// Correlation of the per-segment information distribution under extrinsic
/// perturbations: every non-base IMU's position is moved by dp along a seeded
/// random direction and its orientation rotated by dq about a seeded random
/// axis; rho is the Spearman correlation of the perturbed per-segment
/// information against the reference distribution. Grid points are the cross
/// product of dp_grid x dq_grid.
std::vector<SweepPoint> sensitivity_sweep(const SegmentedData& data, const RigConfig& rig_ref,
                                          const std::vector<double>& dp_grid,
                                          const std::vector<double>& dq_grid, uint64_t seed);

struct ReprojectionError {
  double accel_mean = 0.0;  // m/s^2
  double accel_std = 0.0;
  double gyro_mean = 0.0;  // rad/s
  double gyro_std = 0.0;
};

/// Residual magnitudes |r_a|, |r_g| of every non-base IMU over the full
/// dataset under the given estimate. Outside selected segments biases are
/// extended by zero-order hold and the base angular acceleration falls back
/// to the numerical derivative of the base gyro.
ReprojectionError reprojection_error(const SegmentedData& data, const CalibrationState& state,
                                     const std::vector<int>& selected);

struct BenchRow {
  int num_segments = 0;  // L
  int64_t segment_jacobian_evals = 0;
  int64_t calibrate_calls = 0;
  double evaluate_ms = 0.0;
  double calibrate_ms = 0.0;
  double total_ms = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  double fitted_exponent = 0.0;  // log-log slope of evals vs L
  double r_squared = 0.0;
};

/// Synthetic multi-axis dataset for complexity runs: one sinusoidal interval
/// per second cycling the rotation axis, so every segment carries real
/// information and lambda = 0 accepts everything.
MeasurementSet make_bench_data(int num_segments, int num_aux_imus, int steps_per_segment,
                               uint64_t seed);

/// Runs a greedy policy over the L grid and fits the evaluation counter to
/// c * L^e by log-log regression.
BenchResult bench_complexity(const std::vector<int>& L_grid, int num_aux_imus,
                             int steps_per_segment, Policy policy, double lambda, uint64_t seed);

/// Least-squares fit of log(y) = e log(x) + c; returns (e, R^2).
std::pair<double, double> log_log_fit(const std::vector<double>& x,
                                      const std::vector<double>& y);

}  // namespace imucal
