#pragma once

#include <vector>

#include "imucal/types.hpp"

namespace imucal {

/// Nuisance states of one segment: per-timestep accelerometer/gyroscope
/// biases for every IMU plus the base angular acceleration. Bias vectors are
/// stored timestep-major: index k * (N+1) + n.
struct SegmentStates {
  std::vector<Eigen::Vector3d> accel_bias;
  std::vector<Eigen::Vector3d> gyro_bias;
  std::vector<Eigen::Vector3d> alpha;

  static SegmentStates zeros(int num_imus, int num_steps);
};

/// Full parameter vector theta = (Theta, psi).
///
/// Theta stacks, for N+1 IMUs: p_1..p_N, then local-rotation parameters of
/// q_1..q_N, then of q_g0..q_gN; dimension 6N + 3(N+1). The base IMU's pose
/// is pinned to identity and never parameterized. psi holds one SegmentStates
/// per data segment; a least-squares problem touches only the segments it
/// selects. Rotations are updated by the retraction q <- q (x) quat_exp(dphi).
class CalibrationState {
 public:
  CalibrationState() = default;
  CalibrationState(std::vector<ImuExtrinsics> extrinsics, int num_segments, int steps_per_segment);

  int num_imus() const { return static_cast<int>(extrinsics_.size()); }
  int num_aux() const { return num_imus() - 1; }  // N = non-base IMUs
  int steps_per_segment() const { return steps_per_segment_; }
  int num_segments() const { return static_cast<int>(segments_.size()); }

  const ImuExtrinsics& extrinsics(int n) const { return extrinsics_[n]; }
  ImuExtrinsics& extrinsics(int n) { return extrinsics_[n]; }
  const std::vector<ImuExtrinsics>& extrinsics() const { return extrinsics_; }

  SegmentStates& segment(int l) { return segments_[l]; }
  const SegmentStates& segment(int l) const { return segments_[l]; }

  // --- Theta layout -------------------------------------------------------
  int theta_dim() const { return 9 * num_aux() + 3; }
  int p_col(int n) const { return 3 * (n - 1); }            // n in 1..N
  int phi_col(int n) const { return 3 * num_aux() + 3 * (n - 1); }
  int phig_col(int n) const { return 6 * num_aux() + 3 * n; }  // n in 0..N

  // --- psi layout (one block per timestep) --------------------------------
  int psi_block_dim() const { return 6 * num_imus() + 3; }
  int ba_offset(int n) const { return 3 * n; }
  int bg_offset(int n) const { return 3 * num_imus() + 3 * n; }
  int alpha_offset() const { return 6 * num_imus(); }

  /// Applies a Theta increment (layout above); rotations via retraction.
  void retract_theta(const Eigen::VectorXd& delta);

  /// Applies a psi increment for one timestep of one segment.
  void retract_psi_block(int segment, int k, const Eigen::VectorXd& delta);

 private:
  std::vector<ImuExtrinsics> extrinsics_;
  std::vector<SegmentStates> segments_;
  int steps_per_segment_ = 0;
};

}  // namespace imucal
