#include "imucal/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <future>
#include <numeric>
#include <thread>

#include "imucal/errors.hpp"
#include "imucal/initialization.hpp"
#include "imucal/problem.hpp"
#include "imucal/simulator.hpp"
#include "imucal/trajectory.hpp"

namespace imucal {

namespace {

std::vector<double> average_ranks(const std::vector<double>& values) {
  const size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * (i + j) + 1.0;  // average of 1-based ranks i+1..j+1
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

int max_threads() {
  if (const char* env = std::getenv("IMUCAL_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

template <typename Fn>
void parallel_for(int count, Fn&& fn) {
  const int workers = std::min(max_threads(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::future<void>> futures;
  futures.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    }));
  }
  for (auto& f : futures) f.get();
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ConfigError("series lengths differ");
  if (x.size() < 3) throw ConfigError("need at least 3 samples");
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw UndefinedCorrelationError("rank correlation of a constant series is undefined");
  }
  return sxy / std::sqrt(sxx * syy);
}

std::vector<SweepPoint> sensitivity_sweep(const SegmentedData& data, const RigConfig& rig_ref,
                                          const std::vector<double>& dp_grid,
                                          const std::vector<double>& dq_grid, uint64_t seed) {
  if (dp_grid.empty() || dq_grid.empty()) throw ConfigError("perturbation grids must be nonempty");
  if (rig_ref.num_imus() != data.set().num_imus) {
    throw ConfigError("reference rig IMU count does not match the data");
  }
  const NoiseSpec& noise = rig_ref.noise;

  const auto state_for = [&](const std::vector<ImuExtrinsics>& extr) {
    InitialStateResult init = initial_state(data, &extr);
    return std::move(init.state);
  };

  const std::vector<double> reference =
      per_segment_information(data, state_for(rig_ref.imus), noise);

  // One seeded direction and axis per non-base IMU, shared across the grid so
  // points differ only in magnitude.
  std::vector<Eigen::Vector3d> directions, axes;
  for (int n = 1; n < rig_ref.num_imus(); ++n) {
    NormalStream dir_stream(seed, 0x5357454550ULL + 2 * n);
    NormalStream axis_stream(seed, 0x5357454550ULL + 2 * n + 1);
    directions.push_back(dir_stream.next3().normalized());
    axes.push_back(axis_stream.next3().normalized());
  }

  std::vector<SweepPoint> grid;
  for (double dp : dp_grid) {
    for (double dq : dq_grid) grid.push_back({dp, dq, 1.0});
  }

  std::vector<std::exception_ptr> errors(grid.size());
  parallel_for(static_cast<int>(grid.size()), [&](int i) {
    try {
      SweepPoint& point = grid[i];
      std::vector<ImuExtrinsics> perturbed = rig_ref.imus;
      for (int n = 1; n < rig_ref.num_imus(); ++n) {
        perturbed[n].p += point.dp * directions[n - 1];
        perturbed[n].q = quat_mul(perturbed[n].q,
                                  quat_exp(axes[n - 1] * (point.dq * M_PI / 180.0)));
      }
      const std::vector<double> series =
          per_segment_information(data, state_for(perturbed), noise);
      point.rho = spearman(reference, series);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return grid;
}

ReprojectionError reprojection_error(const SegmentedData& data, const CalibrationState& state,
                                     const std::vector<int>& selected) {
  const MeasurementSet& set = data.set();
  const int ni = set.num_imus;
  const int K = data.steps_per_segment();
  if (selected.empty()) throw ConfigError("reprojection needs a nonempty selected set");

  // Fallback alpha for unselected timesteps: derivative of the base gyro,
  // rotated by the estimated q_g0.
  std::vector<Eigen::Vector3d> gyro0(set.num_steps);
  for (int k = 0; k < set.num_steps; ++k) gyro0[k] = set.at(k, 0).gyro;
  const std::vector<Eigen::Vector3d> alpha_fallback =
      init_angular_acceleration(gyro0, set.dt, state.extrinsics(0).q_g);

  std::vector<char> is_selected(data.num_segments(), 0);
  for (int l : selected) is_selected[l] = 1;

  const RotationCache cache = RotationCache::from(state.extrinsics());
  std::vector<double> accel_norms, gyro_norms;
  accel_norms.reserve(static_cast<size_t>(set.num_steps) * (ni - 1));
  gyro_norms.reserve(accel_norms.capacity());

  // Zero-order-hold bias source: the nearest selected segment at or before
  // this one (the first selected segment backfills the prefix).
  std::vector<int> hold_segment(data.num_segments());
  {
    int hold = selected.front();
    for (int l = 0; l < data.num_segments(); ++l) {
      if (is_selected[l]) hold = l;
      hold_segment[l] = hold;
    }
  }

  for (int step = 0; step < set.num_steps; ++step) {
    const int l = std::min(step / K, data.num_segments() - 1);
    const bool inside = l == step / K && is_selected[l];
    const bool before_first = l < selected.front();
    const SegmentStates& seg = state.segment(inside ? l : hold_segment[l]);
    // ZOH: inside a selected segment use its own states at the local step;
    // in gaps hold the previous selected segment's last states; the prefix
    // before the first selected segment backfills from its first states.
    const int local = inside ? step % K : (before_first ? 0 : K - 1);
    const Eigen::Vector3d alpha = inside ? seg.alpha[step % K] : alpha_fallback[step];
    const Eigen::Vector3d& ba_0 = seg.accel_bias[local * ni];
    const Eigen::Vector3d& bg_0 = seg.gyro_bias[local * ni];
    const ImuMeasurement& base = set.at(step, 0);
    for (int n = 1; n < ni; ++n) {
      const ImuMeasurement& meas = set.at(step, n);
      const Eigen::Vector3d& ba_n = seg.accel_bias[local * ni + n];
      const Eigen::Vector3d& bg_n = seg.gyro_bias[local * ni + n];
      accel_norms.push_back(accel_residual_value(cache, state.extrinsics(n).p, n, meas.accel,
                                                 meas.gyro, base.accel, ba_n, ba_0, bg_n, alpha)
                                .norm());
      gyro_norms.push_back(
          gyro_residual_value(cache, n, meas.gyro, base.gyro, bg_n, bg_0).norm());
    }
  }

  const auto mean_std = [](const std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    return std::make_pair(mean, std::sqrt(var / v.size()));
  };
  ReprojectionError out;
  std::tie(out.accel_mean, out.accel_std) = mean_std(accel_norms);
  std::tie(out.gyro_mean, out.gyro_std) = mean_std(gyro_norms);
  return out;
}

MeasurementSet make_bench_data(int num_segments, int num_aux_imus, int steps_per_segment,
                               uint64_t seed) {
  TrajectoryConfig traj;
  traj.dt = 0.01;
  traj.duration = num_segments * steps_per_segment * traj.dt;
  const int seconds = static_cast<int>(std::ceil(traj.duration));
  for (int s = 0; s < seconds; ++s) {
    // Integer multiples of pi keep the angle zero at the interval boundaries.
    traj.rotation.push_back(
        {static_cast<double>(s), s + 1.0, s % 3, 0.7, M_PI * (1.0 + s % 3)});
  }

  RigConfig rig;
  rig.imus.resize(1 + num_aux_imus);
  for (int n = 1; n <= num_aux_imus; ++n) {
    rig.imus[n].p = Eigen::Vector3d(0.15, -0.10, 0.05) * n;
    rig.imus[n].q = euler_xyz_to_quat(Eigen::Vector3d(10.0, -5.0, 3.0) * n);
    rig.imus[n].q_g = random_gyro_misalignment(seed, n, 1.0);
  }
  return simulate(sinusoidal_euler_trajectory(traj, rig.gravity), rig, seed, true);
}

BenchResult bench_complexity(const std::vector<int>& L_grid, int num_aux_imus,
                             int steps_per_segment, Policy policy, double lambda, uint64_t seed) {
  if (policy != Policy::kGreedyOriginal && policy != Policy::kGreedyInitParam) {
    throw ConfigError("complexity benchmark supports the greedy policies only");
  }
  BenchResult result;
  for (int L : L_grid) {
    const MeasurementSet set = make_bench_data(L, num_aux_imus, steps_per_segment, seed);
    const SegmentedData data(set, steps_per_segment);
    const CalibrationState theta0 = initial_state(data).state;
    const SelectionReport report =
        run_policy(policy, data, theta0, set.ground_truth->rig.noise, lambda, L);
    BenchRow row;
    row.num_segments = L;
    row.segment_jacobian_evals = report.counters.segment_jacobian_evals;
    row.calibrate_calls = report.counters.calibrate_calls;
    row.evaluate_ms = report.evaluate_seconds * 1e3;
    row.calibrate_ms = report.calibrate_seconds * 1e3;
    row.total_ms = row.evaluate_ms + row.calibrate_ms;
    result.rows.push_back(row);
  }
  std::vector<double> ls, evals;
  for (const auto& row : result.rows) {
    ls.push_back(row.num_segments);
    evals.push_back(static_cast<double>(row.segment_jacobian_evals));
  }
  std::tie(result.fitted_exponent, result.r_squared) = log_log_fit(ls, evals);
  return result;
}

std::pair<double, double> log_log_fit(const std::vector<double>& x,
                                      const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("need >= 2 points to fit");
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  for (size_t i = 0; i < n; ++i) {
    const double ly = std::log(y[i]);
    const double fit = slope * std::log(x[i]) + intercept;
    ss_res += (ly - fit) * (ly - fit);
    ss_tot += (ly - sy / n) * (ly - sy / n);
  }
  return {slope, ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0};
}

}  // namespace imucal
