#include "imucal/reports.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "imucal/errors.hpp"

namespace imucal {

namespace {

using nlohmann::json;

json vec3(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

json quat(const UnitQuaternion& q) { return json::array({q.x(), q.y(), q.z(), q.w()}); }

std::string csv_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ExtrinsicErrorSummary compare_extrinsics(const std::vector<ImuExtrinsics>& estimate,
                                         const std::vector<ImuExtrinsics>& reference) {
  if (estimate.size() != reference.size()) throw ConfigError("rig sizes differ");
  ExtrinsicErrorSummary out;
  const int ni = static_cast<int>(estimate.size());
  double sum_p = 0, sum_q = 0, sum_qg = 0;
  for (int n = 0; n < ni; ++n) {
    ExtrinsicError e;
    e.imu = n;
    e.p_cm = (estimate[n].p - reference[n].p).norm() * 100.0;
    e.q_deg = quat_angle_deg(estimate[n].q, reference[n].q);
    e.q_g_deg = quat_angle_deg(estimate[n].q_g, reference[n].q_g);
    out.per_imu.push_back(e);
    if (n > 0) {
      sum_p += e.p_cm;
      sum_q += e.q_deg;
      out.max_p_cm = std::max(out.max_p_cm, e.p_cm);
      out.max_q_deg = std::max(out.max_q_deg, e.q_deg);
    }
    sum_qg += e.q_g_deg;
    out.max_q_g_deg = std::max(out.max_q_g_deg, e.q_g_deg);
  }
  out.mean_p_cm = ni > 1 ? sum_p / (ni - 1) : 0.0;
  out.mean_q_deg = ni > 1 ? sum_q / (ni - 1) : 0.0;
  out.mean_q_g_deg = sum_qg / ni;
  return out;
}

std::string calibration_report_json(const SelectionReport& report, const NoiseSpec& noise,
                                    double lambda, int m, double segment_seconds,
                                    const ExtrinsicErrorSummary* errors,
                                    const ReprojectionError* reprojection) {
  json selected = json::array();
  for (int l : report.selected) selected.push_back(l + 1);  // 1-based externally

  json imus = json::array();
  for (int n = 0; n < report.final_state.num_imus(); ++n) {
    const ImuExtrinsics& e = report.final_state.extrinsics(n);
    imus.push_back(json{{"p_cm", vec3(e.p * 100.0)},
                        {"q_euler_xyz_deg", vec3(quat_to_euler_xyz(e.q))},
                        {"q_xyzw", quat(e.q)},
                        {"q_g_euler_xyz_deg", vec3(quat_to_euler_xyz(e.q_g))},
                        {"q_g_xyzw", quat(e.q_g)}});
  }

  json j{
      {"policy", policy_name(report.policy)},
      {"selection",
       {{"selected", selected},
        {"ratio", report.selected_ratio()},
        {"num_segments", report.num_segments},
        {"steps_per_segment", report.steps_per_segment},
        {"dropped_steps", report.dropped_steps},
        {"counters",
         {{"segment_jacobian_evals", report.counters.segment_jacobian_evals},
          {"calibrate_calls", report.counters.calibrate_calls},
          {"calibrate_residual_block_evals", report.counters.calibrate_residual_block_evals}}},
        {"timing_s",
         {{"evaluate", report.evaluate_seconds},
          {"calibrate", report.calibrate_seconds},
          {"total", report.evaluate_seconds + report.calibrate_seconds}}}}},
      {"calibration",
       {{"iterations", report.final_solve.iterations},
        {"initial_cost", report.final_solve.initial_cost},
        {"final_cost", report.final_solve.final_cost},
        {"termination", report.final_solve.termination},
        {"stationary", report.final_solve.converged_to_stationary},
        {"cost_trace", report.final_solve.cost_trace}}},
      {"estimate", {{"imus", imus}}},
      {"warnings", report.warnings},
      {"config",
       {{"lambda", lambda},
        {"m", m},
        {"segment_seconds", segment_seconds},
        {"noise",
         {{"sigma_a", noise.sigma_a},
          {"sigma_ba", noise.sigma_ba},
          {"sigma_g", noise.sigma_g},
          {"sigma_bg", noise.sigma_bg},
          {"dt", noise.dt},
          {"sigma_alpha", noise.sigma_alpha()}}}}},
  };

  if (errors != nullptr) {
    json per_imu = json::array();
    for (const auto& e : errors->per_imu) {
      per_imu.push_back(
          json{{"imu", e.imu}, {"p_cm", e.p_cm}, {"q_deg", e.q_deg}, {"q_g_deg", e.q_g_deg}});
    }
    j["errors_vs_truth"] = json{{"per_imu", per_imu},
                                {"mean_p_cm", errors->mean_p_cm},
                                {"max_p_cm", errors->max_p_cm},
                                {"mean_q_deg", errors->mean_q_deg},
                                {"max_q_deg", errors->max_q_deg},
                                {"mean_q_g_deg", errors->mean_q_g_deg},
                                {"max_q_g_deg", errors->max_q_g_deg}};
  }
  if (reprojection != nullptr) {
    j["reprojection"] = json{{"accel_mean", reprojection->accel_mean},
                             {"accel_std", reprojection->accel_std},
                             {"gyro_mean", reprojection->gyro_mean},
                             {"gyro_std", reprojection->gyro_std}};
  }
  return j.dump(2);
}

std::string decisions_csv(const SelectionReport& report) {
  std::string out = "segment,info_scalar,utility,accepted\n";
  for (const auto& d : report.decisions) {
    out += std::to_string(d.segment + 1);
    out += ',';
    if (d.info_scalar) out += csv_double(*d.info_scalar);
    out += ',';
    if (d.utility) out += csv_double(*d.utility);
    out += ',';
    out += d.accepted ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::string out = "dp,dq,rho\n";
  for (const auto& p : points) {
    out += csv_double(p.dp) + "," + csv_double(p.dq) + "," + csv_double(p.rho) + "\n";
  }
  return out;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = "L,evals,eval_ms,calib_ms\n";
  for (const auto& r : rows) {
    out += std::to_string(r.num_segments) + "," + std::to_string(r.segment_jacobian_evals) +
           "," + csv_double(r.evaluate_ms) + "," + csv_double(r.calibrate_ms) + "\n";
  }
  return out;
}

std::string bench_summary_json(const BenchResult& result, Policy policy, double lambda) {
  json rows = json::array();
  for (const auto& r : result.rows) {
    rows.push_back(json{{"L", r.num_segments},
                        {"evals", r.segment_jacobian_evals},
                        {"calibrate_calls", r.calibrate_calls},
                        {"eval_ms", r.evaluate_ms},
                        {"calib_ms", r.calibrate_ms},
                        {"total_ms", r.total_ms}});
  }
  json j{{"policy", policy_name(policy)},
         {"lambda", lambda},
         {"rows", rows},
         {"fitted_exponent", result.fitted_exponent},
         {"r_squared", result.r_squared}};
  return j.dump(2);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw ParseError("write failed for " + path);
}

}  // namespace imucal
