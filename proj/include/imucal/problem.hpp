#pragma once

#include <array>
#include <vector>

#include <Eigen/SparseCore>

#include "imucal/residuals.hpp"
#include "imucal/state.hpp"
#include "imucal/types.hpp"

namespace imucal {

/// One whitened residual block with its Jacobian entries, as produced while
/// walking a problem. Jacobians are already divided by sigma; psi entries
/// refer to problem-local timesteps (position of the segment in the selected
/// set times K, plus the local step).
struct EmittedBlock {
  ResidualKind kind = ResidualKind::kAccel;
  int imu = 0;
  int segment = 0;  // global segment index
  int local_k = 0;
  Eigen::Vector3d value = Eigen::Vector3d::Zero();  // whitened
  double sigma = 1.0;

  struct ThetaEntry {
    int col;
    Eigen::Matrix3d jac;
  };
  struct PsiEntry {
    int step;  // problem-local timestep
    int offset;
    Eigen::Matrix3d jac;
  };
  int num_theta = 0;
  int num_psi = 0;
  std::array<ThetaEntry, 3> theta;
  std::array<PsiEntry, 4> psi;
};

/// The nonlinear least-squares problem over a selected, ascending set of
/// segments: intra-segment residuals per selected segment plus (optionally)
/// bias bridges between selection-adjacent segments. Blocks are emitted in a
/// frozen order: per segment ascending (per timestep: accel, gyro per IMU;
/// then bias steps), then all bridges.
class LeastSquaresProblem {
 public:
  LeastSquaresProblem(const SegmentedData& data, std::vector<int> selected,
                      const NoiseSpec& noise, bool include_bridges = true);

  const SegmentedData& data() const { return *data_; }
  const std::vector<int>& selected() const { return selected_; }
  const NoiseSpec& noise() const { return noise_; }
  bool include_bridges() const { return include_bridges_; }

  int num_imus() const { return data_->set().num_imus; }
  int steps_per_segment() const { return data_->steps_per_segment(); }
  int num_selected() const { return static_cast<int>(selected_.size()); }
  int total_steps() const { return num_selected() * steps_per_segment(); }

  int theta_dim() const;
  int psi_block_dim() const { return 6 * num_imus() + 3; }
  int psi_dim() const { return total_steps() * psi_block_dim(); }

  /// Closed-form residual block count (intra-segment + bridges).
  int num_residual_blocks() const;

  double evaluate_cost(const CalibrationState& state) const;

  /// Whitened residual vector in block order (3 rows per block).
  Eigen::VectorXd residual_vector(const CalibrationState& state) const;

  /// Whitened sparse Jacobian, columns [Theta | psi] in the frozen layout.
  Eigen::SparseMatrix<double> jacobian(const CalibrationState& state) const;

  /// Applies a [Theta | psi] increment to a copy of the state.
  CalibrationState retract(const CalibrationState& state, const Eigen::VectorXd& delta) const;

  /// Walks every residual block at the given state. with_jacobians=false
  /// fills only values (cost path).
  template <typename Visitor>
  void visit_blocks(const CalibrationState& state, bool with_jacobians, Visitor&& visit) const;

  /// Walks the intra-segment blocks of one segment only (Fisher evaluation;
  /// psi steps are numbered 0..K-1).
  template <typename Visitor>
  static void visit_segment_blocks(const CalibrationState& state, const SegmentView& segment,
                                   const NoiseSpec& noise, bool with_jacobians, Visitor&& visit);

 private:
  const SegmentedData* data_;
  std::vector<int> selected_;
  NoiseSpec noise_;
  bool include_bridges_;

  template <typename Visitor>
  void visit_bridges(const CalibrationState& state, bool with_jacobians, Visitor&& visit) const;
};

// --- implementation of the templated walkers -------------------------------

template <typename Visitor>
void LeastSquaresProblem::visit_segment_blocks(const CalibrationState& state,
                                               const SegmentView& segment, const NoiseSpec& noise,
                                               bool with_jacobians, Visitor&& visit) {
  const int ni = state.num_imus();
  const int K = segment.num_steps;
  const RotationCache cache = RotationCache::from(state.extrinsics());
  const SegmentStates& seg = state.segment(segment.index);
  const double sigma_ra = sigma_accel_residual(noise);
  const double sigma_rg = sigma_gyro_residual(noise);

  EmittedBlock block;
  block.segment = segment.index;

  for (int k = 0; k < K; ++k) {
    const Eigen::Vector3d& alpha = seg.alpha[k];
    const ImuMeasurement& base = segment.at(k, 0);
    const Eigen::Vector3d& ba_0 = seg.accel_bias[k * ni];
    const Eigen::Vector3d& bg_0 = seg.gyro_bias[k * ni];
    for (int n = 1; n < ni; ++n) {
      const ImuMeasurement& meas = segment.at(k, n);
      const Eigen::Vector3d& ba_n = seg.accel_bias[k * ni + n];
      const Eigen::Vector3d& bg_n = seg.gyro_bias[k * ni + n];
      const Eigen::Vector3d& p_n = state.extrinsics(n).p;

      block.kind = ResidualKind::kAccel;
      block.imu = n;
      block.local_k = k;
      block.sigma = sigma_ra;
      if (with_jacobians) {
        const AccelResidualJet jet = accel_residual_jet(cache, p_n, n, meas.accel, meas.gyro,
                                                        base.accel, ba_n, ba_0, bg_n, alpha);
        block.value = jet.value / sigma_ra;
        block.num_theta = 3;
        block.theta[0] = {state.p_col(n), jet.d_p / sigma_ra};
        block.theta[1] = {state.phi_col(n), jet.d_phi / sigma_ra};
        block.theta[2] = {state.phig_col(n), jet.d_phig / sigma_ra};
        block.num_psi = 4;
        block.psi[0] = {k, state.ba_offset(n), jet.d_ba_n / sigma_ra};
        block.psi[1] = {k, state.ba_offset(0), jet.d_ba_0 / sigma_ra};
        block.psi[2] = {k, state.bg_offset(n), jet.d_bg_n / sigma_ra};
        block.psi[3] = {k, state.alpha_offset(), jet.d_alpha / sigma_ra};
      } else {
        block.value = accel_residual_value(cache, p_n, n, meas.accel, meas.gyro, base.accel,
                                           ba_n, ba_0, bg_n, alpha) /
                      sigma_ra;
        block.num_theta = 0;
        block.num_psi = 0;
      }
      visit(block);

      block.kind = ResidualKind::kGyro;
      block.sigma = sigma_rg;
      if (with_jacobians) {
        const GyroResidualJet jet = gyro_residual_jet(cache, n, meas.gyro, base.gyro, bg_n, bg_0);
        block.value = jet.value / sigma_rg;
        block.num_theta = 3;
        block.theta[0] = {state.phi_col(n), jet.d_phi / sigma_rg};
        block.theta[1] = {state.phig_col(n), jet.d_phig_n / sigma_rg};
        block.theta[2] = {state.phig_col(0), jet.d_phig_0 / sigma_rg};
        block.num_psi = 2;
        block.psi[0] = {k, state.bg_offset(n), jet.d_bg_n / sigma_rg};
        block.psi[1] = {k, state.bg_offset(0), jet.d_bg_0 / sigma_rg};
      } else {
        block.value = gyro_residual_value(cache, n, meas.gyro, base.gyro, bg_n, bg_0) / sigma_rg;
        block.num_theta = 0;
        block.num_psi = 0;
      }
      visit(block);
    }
  }

  const double sigma_sa = sigma_bias_step(noise.sigma_ba, noise.dt);
  const double sigma_sg = sigma_bias_step(noise.sigma_bg, noise.dt);
  const Eigen::Matrix3d identity = Eigen::Matrix3d::Identity();
  for (int k = 0; k + 1 < K; ++k) {
    for (int n = 0; n < ni; ++n) {
      for (int sensor = 0; sensor < 2; ++sensor) {
        const bool is_accel = sensor == 0;
        const auto& series = is_accel ? seg.accel_bias : seg.gyro_bias;
        const double sigma = is_accel ? sigma_sa : sigma_sg;
        block.kind = is_accel ? ResidualKind::kBiasStepA : ResidualKind::kBiasStepG;
        block.imu = n;
        block.local_k = k;
        block.sigma = sigma;
        block.value = (series[(k + 1) * ni + n] - series[k * ni + n]) / sigma;
        const int offset = is_accel ? state.ba_offset(n) : state.bg_offset(n);
        if (with_jacobians) {
          block.num_theta = 0;
          block.num_psi = 2;
          block.psi[0] = {k, offset, -identity / sigma};
          block.psi[1] = {k + 1, offset, identity / sigma};
        } else {
          block.num_theta = 0;
          block.num_psi = 0;
        }
        visit(block);
      }
    }
  }
}

template <typename Visitor>
void LeastSquaresProblem::visit_bridges(const CalibrationState& state, bool with_jacobians,
                                        Visitor&& visit) const {
  const int ni = num_imus();
  const int K = steps_per_segment();
  const Eigen::Matrix3d identity = Eigen::Matrix3d::Identity();
  EmittedBlock block;
  for (int m = 0; m + 1 < num_selected(); ++m) {
    const int from = selected_[m];
    const int to = selected_[m + 1];
    const int gap = to - from;
    const SegmentStates& tail = state.segment(from);
    const SegmentStates& head = state.segment(to);
    for (int n = 0; n < ni; ++n) {
      for (int sensor = 0; sensor < 2; ++sensor) {
        const bool is_accel = sensor == 0;
        const double sigma = sigma_bias_bridge(is_accel ? noise_.sigma_ba : noise_.sigma_bg, gap,
                                               K, noise_.dt);
        const auto& tail_series = is_accel ? tail.accel_bias : tail.gyro_bias;
        const auto& head_series = is_accel ? head.accel_bias : head.gyro_bias;
        block.kind = is_accel ? ResidualKind::kBridgeA : ResidualKind::kBridgeG;
        block.imu = n;
        block.segment = from;
        block.local_k = K - 1;
        block.sigma = sigma;
        block.value = (head_series[n] - tail_series[(K - 1) * ni + n]) / sigma;
        const int offset = is_accel ? state.ba_offset(n) : state.bg_offset(n);
        if (with_jacobians) {
          const int tail_step = m * K + (K - 1);
          const int head_step = (m + 1) * K;
          block.num_theta = 0;
          block.num_psi = 2;
          block.psi[0] = {tail_step, offset, -identity / sigma};
          block.psi[1] = {head_step, offset, identity / sigma};
        } else {
          block.num_theta = 0;
          block.num_psi = 0;
        }
        visit(block);
      }
    }
  }
}

template <typename Visitor>
void LeastSquaresProblem::visit_blocks(const CalibrationState& state, bool with_jacobians,
                                       Visitor&& visit) const {
  const int K = steps_per_segment();
  for (int m = 0; m < num_selected(); ++m) {
    const int base_step = m * K;
    visit_segment_blocks(state, data_->segment(selected_[m]), noise_, with_jacobians,
                         [&](EmittedBlock& block) {
                           for (int i = 0; i < block.num_psi; ++i) block.psi[i].step += base_step;
                           visit(block);
                         });
  }
  if (include_bridges_) visit_bridges(state, with_jacobians, visit);
}

}  // namespace imucal
