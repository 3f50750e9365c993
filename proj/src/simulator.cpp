#include "imucal/simulator.hpp"

#include <cmath>

#include "imucal/errors.hpp"

namespace imucal {

namespace {

uint64_t splitmix64(uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stream ids for the per-(imu, sensor, signal) generators.
enum Signal : uint64_t { kAccelNoise = 0, kAccelWalk, kGyroNoise, kGyroWalk, kSignalCount };

}  // namespace

NormalStream::NormalStream(uint64_t seed, uint64_t stream_id) {
  uint64_t s = seed;
  // Decorrelate streams by folding the id through the mixer twice.
  state_ = splitmix64(s) ^ (0xD1B54A32D192ED03ULL * (stream_id + 1));
  (void)next_u64();
}

uint64_t NormalStream::next_u64() { return splitmix64(state_); }

double NormalStream::next() {
  // Box-Muller on two 53-bit uniforms; u1 is kept away from zero.
  const double u1 = ((next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = (next_u64() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Eigen::Vector3d NormalStream::next3() {
  const double a = next(), b = next(), c = next();
  return {a, b, c};
}

UnitQuaternion random_gyro_misalignment(uint64_t seed, int imu_index, double stddev_deg) {
  if (stddev_deg < 0.0) throw ConfigError("misalignment stddev must be nonnegative");
  if (stddev_deg == 0.0) return UnitQuaternion();
  NormalStream stream(seed, 0x4D49534AULL + static_cast<uint64_t>(imu_index));
  Eigen::Vector3d axis = stream.next3();
  while (axis.norm() < 1e-12) axis = stream.next3();
  axis.normalize();
  const double angle = stream.next() * stddev_deg * M_PI / 180.0;
  return quat_exp(axis * angle);
}

MeasurementSet simulate(const std::vector<MotionSample>& trajectory, const RigConfig& rig,
                        uint64_t seed, bool noisy) {
  rig.validate();
  const int num_imus = rig.num_imus();
  const int steps = static_cast<int>(trajectory.size());
  const NoiseSpec& ns = rig.noise;
  const double sqrt_dt = std::sqrt(ns.dt);

  MeasurementSet set;
  set.num_imus = num_imus;
  set.num_steps = steps;
  set.dt = ns.dt;
  set.samples.resize(static_cast<size_t>(steps) * num_imus);

  GroundTruth truth;
  truth.motion = trajectory;
  truth.rig = rig;
  truth.accel_bias.assign(num_imus, std::vector<Eigen::Vector3d>(steps, Eigen::Vector3d::Zero()));
  truth.gyro_bias.assign(num_imus, std::vector<Eigen::Vector3d>(steps, Eigen::Vector3d::Zero()));

  for (int n = 0; n < num_imus; ++n) {
    const auto stream_id = [n](Signal s) {
      return static_cast<uint64_t>(n) * kSignalCount + static_cast<uint64_t>(s);
    };
    NormalStream accel_noise(seed, stream_id(kAccelNoise));
    NormalStream accel_walk(seed, stream_id(kAccelWalk));
    NormalStream gyro_noise(seed, stream_id(kGyroNoise));
    NormalStream gyro_walk(seed, stream_id(kGyroWalk));

    const Eigen::Matrix3d imu_from_base = quat_to_rot(rig.imus[n].q).matrix();
    const Eigen::Matrix3d imu_from_gyro = quat_to_rot(rig.imus[n].q_g).matrix();
    const Eigen::Vector3d& p = rig.imus[n].p;

    Eigen::Vector3d b_a = Eigen::Vector3d::Zero();  // biases start at zero
    Eigen::Vector3d b_g = Eigen::Vector3d::Zero();

    for (int k = 0; k < steps; ++k) {
      if (noisy && k > 0) {
        b_a += ns.sigma_ba * sqrt_dt * accel_walk.next3();
        b_g += ns.sigma_bg * sqrt_dt * gyro_walk.next3();
      }
      truth.accel_bias[n][k] = b_a;
      truth.gyro_bias[n][k] = b_g;

      const MotionSample& m = trajectory[k];
      const Eigen::Vector3d omega_imu = imu_from_base * m.omega;
      const Eigen::Vector3d alpha_imu = imu_from_base * m.alpha;

      ImuMeasurement& row = set.at(k, n);
      row.t = m.t;
      row.imu_id = n;
      row.gyro = imu_from_gyro.transpose() * omega_imu + b_g;
      row.accel = imu_from_base * m.f0 - skew(omega_imu) * (skew(omega_imu) * p) -
                  skew(alpha_imu) * p + b_a;
      if (noisy) {
        row.gyro += (ns.sigma_g / sqrt_dt) * gyro_noise.next3();
        row.accel += (ns.sigma_a / sqrt_dt) * accel_noise.next3();
      }
    }
  }

  set.ground_truth = std::move(truth);
  return set;
}

}  // namespace imucal
