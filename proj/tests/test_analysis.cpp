#include <doctest.h>

#include <random>

#include "imucal/analysis.hpp"
#include "imucal/errors.hpp"
#include "imucal/initialization.hpp"
#include "imucal/reports.hpp"
#include "test_helpers.hpp"

using namespace imucal;

TEST_CASE("spearman closed-form cases") {
  CHECK(spearman({1, 2, 3}, {1, 2, 3}) == doctest::Approx(1.0));
  CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
  // 1 - 6 * sum d^2 / (n (n^2 - 1)) with d = (0, 1, 1): 1 - 12/24.
  CHECK(spearman({1, 2, 3}, {1, 3, 2}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(spearman({1, 1, 1}, {1, 2, 3}), UndefinedCorrelationError);
  CHECK_THROWS_AS(spearman({1, 2}, {1, 2}), ConfigError);
}

TEST_CASE("spearman is invariant under strictly monotone transforms") {
  std::mt19937_64 rng(95);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(50), y(50);
  for (size_t i = 0; i < x.size(); ++i) {
    x[i] = normal(rng);
    y[i] = normal(rng);
  }
  const double base = spearman(x, y);
  std::vector<double> fx = x, gy = y;
  for (auto& v : fx) v = std::exp(3.0 * v) + 7.0;
  for (auto& v : gy) v = std::atan(v);
  CHECK(spearman(fx, gy) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("sensitivity sweep: zero perturbation correlates exactly") {
  const RigConfig rig = test::table_rig_with_misalignment(96, 2);
  const MeasurementSet set = test::simulate_rig(rig, test::rich_trajectory(4.0), 96, true);
  const SegmentedData data(set, 50);
  const auto points = sensitivity_sweep(data, rig, {0.0}, {0.0}, 1);
  REQUIRE(points.size() == 1);
  CHECK(points[0].rho == doctest::Approx(1.0));

  const auto grid = sensitivity_sweep(data, rig, {0.0, 0.1}, {0.0, 30.0}, 1);
  REQUIRE(grid.size() == 4);
  for (const auto& p : grid) {
    CHECK(p.rho <= 1.0 + 1e-12);
    CHECK(p.rho >= -1.0 - 1e-12);
  }
}

TEST_CASE("reprojection error: zero at noiseless truth, monotone in q error") {
  const RigConfig rig = test::table_rig_with_misalignment(97);
  const MeasurementSet set = test::simulate_rig(rig, edge_case_trajectory(), 97, false);
  const SegmentedData data(set, 100);
  const CalibrationState truth = test::truth_state(set, data);
  std::vector<int> all(data.num_segments());
  for (int l = 0; l < data.num_segments(); ++l) all[l] = l;

  const ReprojectionError at_truth = reprojection_error(data, truth, all);
  CHECK(at_truth.accel_mean < 1e-9);
  CHECK(at_truth.accel_std < 1e-9);
  CHECK(at_truth.gyro_mean < 1e-10);

  CalibrationState wrong_q = truth;
  wrong_q.extrinsics(1).q = quat_mul(wrong_q.extrinsics(1).q, euler_xyz_to_quat({5, 0, 0}));
  const ReprojectionError with_wrong_q = reprojection_error(data, wrong_q, all);
  CHECK(with_wrong_q.accel_mean > at_truth.accel_mean);

  // Gyro reprojection does not involve p at all.
  CalibrationState wrong_p = truth;
  wrong_p.extrinsics(1).p += Eigen::Vector3d(0.3, -0.2, 0.1);
  const ReprojectionError with_wrong_p = reprojection_error(data, wrong_p, all);
  CHECK(with_wrong_p.gyro_mean == at_truth.gyro_mean);
  CHECK(with_wrong_p.gyro_std == at_truth.gyro_std);
  CHECK(with_wrong_p.accel_mean > at_truth.accel_mean);
}

TEST_CASE("reprojection uses zero-order-hold biases across gaps") {
  const RigConfig rig = test::table_rig_with_misalignment(98, 2);
  const MeasurementSet set = test::simulate_rig(rig, test::rich_trajectory(4.0), 98, true);
  const SegmentedData data(set, 50);
  const CalibrationState truth = test::truth_state(set, data);
  // Works with a sparse selected set and stays finite.
  const ReprojectionError sparse = reprojection_error(data, truth, {1, 5});
  CHECK(std::isfinite(sparse.accel_mean));
  CHECK(sparse.accel_mean > 0.0);
}

TEST_CASE("bench counters match the closed forms") {
  const BenchResult original =
      bench_complexity({3, 5}, 1, 40, Policy::kGreedyOriginal, 0.0, 5);
  REQUIRE(original.rows.size() == 2);
  CHECK(original.rows[0].segment_jacobian_evals == 3 * 4 / 2);
  CHECK(original.rows[1].segment_jacobian_evals == 5 * 6 / 2);
  CHECK(original.rows[0].calibrate_calls == 3);

  const BenchResult first_only =
      bench_complexity({3, 5}, 1, 40, Policy::kGreedyOriginal, 1e18, 5);
  CHECK(first_only.rows[0].segment_jacobian_evals == 2 * 3 - 1);
  CHECK(first_only.rows[1].segment_jacobian_evals == 2 * 5 - 1);

  const BenchResult init = bench_complexity({3, 5}, 1, 40, Policy::kGreedyInitParam, 0.0, 5);
  CHECK(init.rows[0].segment_jacobian_evals == 3);
  CHECK(init.rows[1].segment_jacobian_evals == 5);
  CHECK(init.rows[0].calibrate_calls == 1);
  CHECK(init.rows[1].calibrate_calls == 1);
}

TEST_CASE("log-log fit recovers exact power laws") {
  const auto [slope2, r2] = log_log_fit({8, 16, 32, 64}, {64, 256, 1024, 4096});
  CHECK(slope2 == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r2 == doctest::Approx(1.0));
  const auto [slope1, r1] = log_log_fit({8, 16, 32, 64}, {8, 16, 32, 64});
  CHECK(slope1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r1 == doctest::Approx(1.0));
}

TEST_CASE("report serialization schemas") {
  CHECK(sweep_csv({{0.1, 5.0, 0.93}}) == "dp,dq,rho\n0.10000000000000001,5,0.93000000000000005\n");
  BenchRow row;
  row.num_segments = 8;
  row.segment_jacobian_evals = 36;
  row.evaluate_ms = 1.5;
  row.calibrate_ms = 2.5;
  CHECK(bench_csv({row}) == "L,evals,eval_ms,calib_ms\n8,36,1.5,2.5\n");
}
