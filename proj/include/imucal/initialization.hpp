#pragma once

#include <string>
#include <vector>

#include "imucal/state.hpp"
#include "imucal/types.hpp"

namespace imucal {

struct RelativeOrientation {
  UnitQuaternion base_from_imu;  // ^{I0}_{In} q
  double degeneracy_score = 0.0; // ratio of the two smallest singular values
};

/// Recovers the fixed rotation between two gyroscopes' body frames from their
/// rate streams: per adjacent timestep pair the delta quaternions from both
/// streams are related by L(dq_0) q = R(dq_n) q; stacking L - R over all
/// pairs gives A q = 0, solved by the smallest singular direction of A (via
/// the 4x4 eigenproblem of A^T A). Throws DegenerateMotionError when the two
/// smallest singular values are within a factor of 2 (score > 0.5), e.g. for
/// zero motion or rotation about a single fixed axis.
RelativeOrientation init_relative_orientation(const std::vector<Eigen::Vector3d>& gyro_0,
                                              const std::vector<Eigen::Vector3d>& gyro_n,
                                              double dt);

/// Base angular acceleration by numerical differentiation of the base gyro:
/// central differences in the interior, one-sided at the ends, rotated into
/// the base frame by the current q_g0 guess.
std::vector<Eigen::Vector3d> init_angular_acceleration(
    const std::vector<Eigen::Vector3d>& gyro_0, double dt,
    const UnitQuaternion& q_g0_guess = UnitQuaternion());

struct InitialStateResult {
  CalibrationState state;
  std::vector<std::string> warnings;  // degenerate-motion fallbacks etc.
};

/// Initial guess before selection/calibration: p = 0, q from the gyro-based
/// relative orientation (identity fallback with a warning when the motion is
/// degenerate), q_g = identity, biases = 0, alpha from numerical
/// differentiation of the base gyro. A supplied rig guess overrides the
/// extrinsics untouched.
InitialStateResult initial_state(const SegmentedData& data,
                                 const std::vector<ImuExtrinsics>* rig_guess = nullptr);

}  // namespace imucal
