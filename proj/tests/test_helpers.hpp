#pragma once

#include <random>

#include "imucal/geometry.hpp"
#include "imucal/initialization.hpp"
#include "imucal/simulator.hpp"
#include "imucal/trajectory.hpp"
#include "imucal/types.hpp"

namespace imucal::test {

inline Eigen::Vector3d random_vec3(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  return {normal(rng), normal(rng), normal(rng)};
}

inline UnitQuaternion random_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Vector4d v(normal(rng), normal(rng), normal(rng), normal(rng));
  while (v.norm() < 1e-6) v = Eigen::Vector4d(normal(rng), normal(rng), normal(rng), normal(rng));
  return UnitQuaternion::from_vector(v);
}

/// Table II rig: IMU1 20 cm along x with a half-turn about x, IMU2/IMU3 the
/// same pattern on y/z. Gyro misalignments default to identity.
inline RigConfig table_rig(int num_imus = 4) {
  RigConfig rig;
  rig.imus.resize(num_imus);
  const double d = 0.20;
  if (num_imus > 1) {
    rig.imus[1].p = Eigen::Vector3d(d, 0, 0);
    rig.imus[1].q = euler_xyz_to_quat({180, 0, 0});
  }
  if (num_imus > 2) {
    rig.imus[2].p = Eigen::Vector3d(0, d, 0);
    rig.imus[2].q = euler_xyz_to_quat({0, 180, 0});
  }
  if (num_imus > 3) {
    rig.imus[3].p = Eigen::Vector3d(0, 0, d);
    rig.imus[3].q = euler_xyz_to_quat({0, 0, 180});
  }
  return rig;
}

inline RigConfig table_rig_with_misalignment(uint64_t seed, int num_imus = 4) {
  RigConfig rig = table_rig(num_imus);
  for (int n = 0; n < num_imus; ++n) {
    rig.imus[n].q_g = random_gyro_misalignment(seed, n, 1.0);
  }
  return rig;
}

/// Rig with lever arms and orientations off every symmetry axis, so that no
/// joint gyro-misalignment rotation stays unobservable under two-axis motion.
inline RigConfig generic_rig(uint64_t seed, int num_imus) {
  RigConfig rig;
  rig.imus.resize(num_imus);
  const Eigen::Vector3d base_p(0.21, -0.13, 0.17);
  const Eigen::Vector3d base_e(35.0, -25.0, 50.0);
  for (int n = 1; n < num_imus; ++n) {
    rig.imus[n].p = quat_to_rot(quat_exp(Eigen::Vector3d(0.3, 0.9, 1.7) * n)).matrix() * base_p;
    rig.imus[n].q = euler_xyz_to_quat(base_e * n);
    rig.imus[n].q_g = random_gyro_misalignment(seed, n, 1.0);
  }
  rig.imus[0].q_g = random_gyro_misalignment(seed, 0, 1.0);
  return rig;
}

/// A short two-axis trajectory that keeps every parameter observable.
inline TrajectoryConfig rich_trajectory(double duration = 4.0, double dt = 0.01) {
  TrajectoryConfig config;
  config.duration = duration;
  config.dt = dt;
  const double half = duration / 2.0;
  config.rotation = {
      {0.0, half, 0, 0.8, M_PI},
      {half, duration, 2, 0.6, 2.0 * M_PI},
  };
  return config;
}

inline MeasurementSet simulate_rig(const RigConfig& rig, const TrajectoryConfig& traj,
                                   uint64_t seed, bool noisy) {
  return simulate(sinusoidal_euler_trajectory(traj, rig.gravity), rig, seed, noisy);
}

/// State whose extrinsics and nuisance values equal the simulation truth.
inline CalibrationState truth_state(const MeasurementSet& set, const SegmentedData& data) {
  const GroundTruth& truth = *set.ground_truth;
  CalibrationState state(truth.rig.imus, data.num_segments(), data.steps_per_segment());
  const int ni = set.num_imus;
  for (int l = 0; l < data.num_segments(); ++l) {
    SegmentStates& seg = state.segment(l);
    const int first = data.segment(l).first_step;
    for (int k = 0; k < data.steps_per_segment(); ++k) {
      seg.alpha[k] = truth.motion[first + k].alpha;
      for (int n = 0; n < ni; ++n) {
        seg.accel_bias[k * ni + n] = truth.accel_bias[n][first + k];
        seg.gyro_bias[k * ni + n] = truth.gyro_bias[n][first + k];
      }
    }
  }
  return state;
}

}  // namespace imucal::test
