#pragma once

#include <string>
#include <vector>

#include "imucal/analysis.hpp"
#include "imucal/selection.hpp"
#include "imucal/types.hpp"

namespace imucal {

/// Per-IMU deviation of an estimate from reference extrinsics.
struct ExtrinsicError {
  int imu = 0;
  double p_cm = 0.0;    // |p_est - p_ref| in cm
  double q_deg = 0.0;   // relative rotation angle
  double q_g_deg = 0.0;
};

struct ExtrinsicErrorSummary {
  std::vector<ExtrinsicError> per_imu;  // non-base IMUs for p/q; all IMUs for q_g
  double mean_p_cm = 0.0, max_p_cm = 0.0;
  double mean_q_deg = 0.0, max_q_deg = 0.0;
  double mean_q_g_deg = 0.0, max_q_g_deg = 0.0;
};

ExtrinsicErrorSummary compare_extrinsics(const std::vector<ImuExtrinsics>& estimate,
                                         const std::vector<ImuExtrinsics>& reference);

/// Full calibration report JSON: selection outcome, counters, timings, the
/// estimate (positions in cm, rotations as XYZ Euler degrees and quaternions)
/// and the resolved configuration echo.
std::string calibration_report_json(const SelectionReport& report, const NoiseSpec& noise,
                                    double lambda, int m, double segment_seconds,
                                    const ExtrinsicErrorSummary* errors,
                                    const ReprojectionError* reprojection);

/// Decision trace CSV: `segment,info_scalar,utility,accepted` (1-based ids).
std::string decisions_csv(const SelectionReport& report);

/// Sensitivity sweep CSV: `dp,dq,rho`.
std::string sweep_csv(const std::vector<SweepPoint>& points);

/// Complexity benchmark CSV: `L,evals,eval_ms,calib_ms`.
std::string bench_csv(const std::vector<BenchRow>& rows);

std::string bench_summary_json(const BenchResult& result, Policy policy, double lambda);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace imucal
