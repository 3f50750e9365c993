#pragma once

#include <cstdint>
#include <vector>

#include "imucal/types.hpp"

namespace imucal {

/// Deterministic stream of standard normals; independent streams are derived
/// from (seed, stream id) so adding IMUs never perturbs existing streams.
class NormalStream {
 public:
  NormalStream(uint64_t seed, uint64_t stream_id);
  double next();
  Eigen::Vector3d next3();

 private:
  uint64_t state_;
  uint64_t next_u64();
};

/// Random gyroscope misalignment: axis uniform on the sphere, angle drawn
/// from N(0, stddev_deg^2). One independent stream per IMU index.
UnitQuaternion random_gyro_misalignment(uint64_t seed, int imu_index, double stddev_deg);

/// Generates accelerometer and gyroscope measurements for every IMU of the
/// rig along the given base motion:
///   gyro_n  = C(q_gn)^T C(q_In) omega + b_g + n_g
///   accel_n = C(q_In) f0 - skew(C(q_In) omega)^2 p_In - skew(C(q_In) alpha) p_In + b_a + n_a
/// with noise n ~ sigma/sqrt(dt) N(0,1) and bias random walks with increment
/// sigma_b sqrt(dt) N(0,1) starting at zero. noisy=false zeroes both.
/// Ground truth (motion + bias trajectories) is attached to the output.
MeasurementSet simulate(const std::vector<MotionSample>& trajectory, const RigConfig& rig,
                        uint64_t seed, bool noisy);

}  // namespace imucal
