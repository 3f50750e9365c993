#include "imucal/state.hpp"

#include <cassert>

#include "imucal/errors.hpp"

namespace imucal {

SegmentStates SegmentStates::zeros(int num_imus, int num_steps) {
  SegmentStates s;
  s.accel_bias.assign(static_cast<size_t>(num_steps) * num_imus, Eigen::Vector3d::Zero());
  s.gyro_bias.assign(static_cast<size_t>(num_steps) * num_imus, Eigen::Vector3d::Zero());
  s.alpha.assign(num_steps, Eigen::Vector3d::Zero());
  return s;
}

CalibrationState::CalibrationState(std::vector<ImuExtrinsics> extrinsics, int num_segments,
                                   int steps_per_segment)
    : extrinsics_(std::move(extrinsics)), steps_per_segment_(steps_per_segment) {
  if (extrinsics_.size() < 2) throw ConfigError("state needs at least 2 IMUs");
  segments_.assign(num_segments, SegmentStates::zeros(num_imus(), steps_per_segment));
}

void CalibrationState::retract_theta(const Eigen::VectorXd& delta) {
  assert(delta.size() == theta_dim());
  for (int n = 1; n < num_imus(); ++n) {
    extrinsics_[n].p += delta.segment<3>(p_col(n));
    extrinsics_[n].q = quat_mul(extrinsics_[n].q, quat_exp(delta.segment<3>(phi_col(n))));
  }
  for (int n = 0; n < num_imus(); ++n) {
    extrinsics_[n].q_g = quat_mul(extrinsics_[n].q_g, quat_exp(delta.segment<3>(phig_col(n))));
  }
}

void CalibrationState::retract_psi_block(int segment, int k, const Eigen::VectorXd& delta) {
  assert(delta.size() == psi_block_dim());
  SegmentStates& s = segments_[segment];
  for (int n = 0; n < num_imus(); ++n) {
    s.accel_bias[k * num_imus() + n] += delta.segment<3>(ba_offset(n));
    s.gyro_bias[k * num_imus() + n] += delta.segment<3>(bg_offset(n));
  }
  s.alpha[k] += delta.segment<3>(alpha_offset());
}

}  // namespace imucal
