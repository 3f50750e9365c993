#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "imucal/geometry.hpp"

namespace imucal {

/// Continuous-time white-noise densities and bias instabilities, plus the
/// sampling interval used to discretize them.
struct NoiseSpec {
  double sigma_a = 2e-3;       // m/s^2/sqrt(Hz)
  double sigma_ba = 3e-3;      // m/s^2*sqrt(Hz)
  double sigma_g = 1.6968e-4;  // rad/s/sqrt(Hz)
  double sigma_bg = 1.9393e-5; // rad/s*sqrt(Hz)
  double dt = 0.01;            // s

  /// Stddev of the angular-acceleration pseudo-measurement; when <= 0 the
  /// default sqrt(2)*sigma_g/dt (a gyro first-difference) is used.
  double sigma_alpha_override = -1.0;

  double sigma_alpha() const {
    return sigma_alpha_override > 0.0 ? sigma_alpha_override : std::sqrt(2.0) * sigma_g / dt;
  }
  void validate() const;
};

/// Pose of one IMU relative to the base IMU plus its gyroscope misalignment.
/// p is frame I0's position expressed in frame In; q maps I0 coordinates into
/// In coordinates; q_g maps gyro-frame coordinates into In coordinates.
struct ImuExtrinsics {
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  UnitQuaternion q;
  UnitQuaternion q_g;
};

struct RigConfig {
  std::vector<ImuExtrinsics> imus;  // index 0 = base, must be identity pose
  NoiseSpec noise;
  Eigen::Vector3d gravity = Eigen::Vector3d(0.0, 0.0, -9.81);  // world frame, m/s^2

  int num_imus() const { return static_cast<int>(imus.size()); }
  void validate() const;
};

/// Ground-truth base motion at one timestep. omega/alpha are the base frame's
/// angular velocity/acceleration in I0 coordinates; f0 is the base specific
/// force (linear acceleration minus gravity) in I0 coordinates.
struct MotionSample {
  double t = 0.0;
  Eigen::Vector3d omega = Eigen::Vector3d::Zero();
  Eigen::Vector3d alpha = Eigen::Vector3d::Zero();
  Eigen::Vector3d f0 = Eigen::Vector3d::Zero();
};

struct ImuMeasurement {
  double t = 0.0;
  int imu_id = 0;
  Eigen::Vector3d accel = Eigen::Vector3d::Zero();  // m/s^2, in the IMU frame
  Eigen::Vector3d gyro = Eigen::Vector3d::Zero();   // rad/s, in the gyro frame
};

/// Per-IMU bias trajectories drawn during simulation; kept for testing.
struct GroundTruth {
  std::vector<MotionSample> motion;
  // biases[n][k]: accel/gyro bias of IMU n at timestep k.
  std::vector<std::vector<Eigen::Vector3d>> accel_bias;
  std::vector<std::vector<Eigen::Vector3d>> gyro_bias;
  RigConfig rig;
};

/// Dense time-ordered measurements for all IMUs: every (timestep, imu) pair
/// present exactly once, timestamps strictly increasing per IMU.
struct MeasurementSet {
  int num_imus = 0;
  int num_steps = 0;
  double dt = 0.0;
  std::vector<ImuMeasurement> samples;  // row-major: step-major, imu-minor
  std::optional<GroundTruth> ground_truth;

  const ImuMeasurement& at(int step, int imu) const { return samples[step * num_imus + imu]; }
  ImuMeasurement& at(int step, int imu) { return samples[step * num_imus + imu]; }
  void validate() const;
};

/// One selection unit: K consecutive timesteps of all IMUs.
struct SegmentView {
  const MeasurementSet* data = nullptr;
  int index = 0;       // 0-based segment index
  int first_step = 0;  // global timestep of local k = 0
  int num_steps = 0;   // K

  const ImuMeasurement& at(int k, int imu) const { return data->at(first_step + k, imu); }
};

/// Fixed-K partition of a measurement set; a trailing partial segment is
/// dropped (and reported via dropped_steps).
struct SegmentedData {
  SegmentedData(const MeasurementSet& set, int steps_per_segment);

  const MeasurementSet& set() const { return *set_; }
  int num_segments() const { return static_cast<int>(segments_.size()); }
  int steps_per_segment() const { return steps_per_segment_; }
  int dropped_steps() const { return dropped_steps_; }
  const SegmentView& segment(int l) const { return segments_[l]; }

 private:
  const MeasurementSet* set_;
  int steps_per_segment_;
  int dropped_steps_;
  std::vector<SegmentView> segments_;
};

}  // namespace imucal
