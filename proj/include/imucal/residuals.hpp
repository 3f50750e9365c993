#pragma once

#include <vector>

#include "imucal/state.hpp"
#include "imucal/types.hpp"

namespace imucal {

enum class ResidualKind { kAccel, kGyro, kBiasStepA, kBiasStepG, kBridgeA, kBridgeG };

const char* residual_kind_name(ResidualKind kind);

/// Spec-facing residual description with its covariance; used by tests and
/// reprojection, not by the solver hot path.
struct ResidualBlock {
  ResidualKind kind = ResidualKind::kAccel;
  int imu = 0;
  int step = 0;  // local timestep within the segment (first step for bias pairs)
  Eigen::Vector3d value = Eigen::Vector3d::Zero();
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Identity();

  Eigen::Vector3d whitened() const;
  double squared_mahalanobis() const;
};

/// Cached rotation matrices of a linearization point. R[n] maps base (I0)
/// coordinates into IMU n's frame; G[n] maps IMU n's gyro frame into its
/// accelerometer-aligned frame.
struct RotationCache {
  std::vector<Eigen::Matrix3d> R;
  std::vector<Eigen::Matrix3d> G;

  static RotationCache from(const std::vector<ImuExtrinsics>& extrinsics);
};

// Isotropic residual stddevs derived from the noise spec.
double sigma_accel_residual(const NoiseSpec& ns);  // sqrt(2 s_a^2/dt + 2 (s_g^2/dt)^2 + s_alpha^2)
double sigma_gyro_residual(const NoiseSpec& ns);   // sqrt(2 s_g^2/dt)
double sigma_bias_step(double sigma_b, double dt); // sigma_b sqrt(dt)
double sigma_bias_bridge(double sigma_b, int gap_segments, int steps_per_segment, double dt);

/// Accelerometer residual r_a and its Jacobians for IMU n at one timestep:
/// the measurement of IMU n mapped into the base frame minus the
/// bias-corrected base measurement. All Jacobian blocks are with respect to
/// the local (retraction) rotation parameters.
struct AccelResidualJet {
  Eigen::Vector3d value;
  Eigen::Matrix3d d_p;      // wrt p_n
  Eigen::Matrix3d d_phi;    // wrt q_n local rotation
  Eigen::Matrix3d d_phig;   // wrt q_gn local rotation
  Eigen::Matrix3d d_ba_n;
  Eigen::Matrix3d d_ba_0;
  Eigen::Matrix3d d_bg_n;
  Eigen::Matrix3d d_alpha;
};

Eigen::Vector3d accel_residual_value(const RotationCache& cache, const Eigen::Vector3d& p_n,
                                     int n, const Eigen::Vector3d& accel_n,
                                     const Eigen::Vector3d& gyro_n,
                                     const Eigen::Vector3d& accel_0, const Eigen::Vector3d& ba_n,
                                     const Eigen::Vector3d& ba_0, const Eigen::Vector3d& bg_n,
                                     const Eigen::Vector3d& alpha);

AccelResidualJet accel_residual_jet(const RotationCache& cache, const Eigen::Vector3d& p_n, int n,
                                    const Eigen::Vector3d& accel_n, const Eigen::Vector3d& gyro_n,
                                    const Eigen::Vector3d& accel_0, const Eigen::Vector3d& ba_n,
                                    const Eigen::Vector3d& ba_0, const Eigen::Vector3d& bg_n,
                                    const Eigen::Vector3d& alpha);

/// Gyroscope residual r_g: IMU n's rate mapped into the base frame minus the
/// base IMU's misalignment-corrected rate.
struct GyroResidualJet {
  Eigen::Vector3d value;
  Eigen::Matrix3d d_phi;     // wrt q_n
  Eigen::Matrix3d d_phig_n;  // wrt q_gn
  Eigen::Matrix3d d_phig_0;  // wrt q_g0
  Eigen::Matrix3d d_bg_n;
  Eigen::Matrix3d d_bg_0;
};

Eigen::Vector3d gyro_residual_value(const RotationCache& cache, int n,
                                    const Eigen::Vector3d& gyro_n, const Eigen::Vector3d& gyro_0,
                                    const Eigen::Vector3d& bg_n, const Eigen::Vector3d& bg_0);

GyroResidualJet gyro_residual_jet(const RotationCache& cache, int n,
                                  const Eigen::Vector3d& gyro_n, const Eigen::Vector3d& gyro_0,
                                  const Eigen::Vector3d& bg_n, const Eigen::Vector3d& bg_0);

// --- Spec-facing per-block evaluations ------------------------------------

ResidualBlock residual_accel(const CalibrationState& state, const SegmentView& segment,
                             const NoiseSpec& noise, int n, int k);
ResidualBlock residual_gyro(const CalibrationState& state, const SegmentView& segment,
                            const NoiseSpec& noise, int n, int k);
/// Bias step between timesteps k and k+1 of one segment.
ResidualBlock residual_bias_step(const CalibrationState& state, int segment_index,
                                 const NoiseSpec& noise, int n, int k, bool accel_sensor);
/// Bias bridge between the last timestep of selected segment `from` and the
/// first of selected segment `to` (global segment indices, to > from).
ResidualBlock residual_bias_bridge(const CalibrationState& state, const NoiseSpec& noise,
                                   int from, int to, int n, bool accel_sensor);

/// All intra-segment residuals of one segment in the frozen order: for each
/// timestep k, for each IMU n >= 1: r_a, r_g; then for each k < K-1, for each
/// IMU n: bias steps (accel, gyro). Count: 2NK + 2(N+1)(K-1).
std::vector<ResidualBlock> segment_residuals(const CalibrationState& state,
                                             const SegmentView& segment, const NoiseSpec& noise);

}  // namespace imucal
