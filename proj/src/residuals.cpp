#include "imucal/residuals.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "imucal/errors.hpp"

namespace imucal {

namespace {

// d(skew(u)^2 p)/du: directional derivative of u x (u x p).
Eigen::Matrix3d centripetal_jacobian(const Eigen::Vector3d& u, const Eigen::Vector3d& p) {
  return -skew(u.cross(p)) - skew(u) * skew(p);
}

}  // namespace

const char* residual_kind_name(ResidualKind kind) {
  switch (kind) {
    case ResidualKind::kAccel: return "accel";
    case ResidualKind::kGyro: return "gyro";
    case ResidualKind::kBiasStepA: return "bias_a";
    case ResidualKind::kBiasStepG: return "bias_g";
    case ResidualKind::kBridgeA: return "bridge_a";
    case ResidualKind::kBridgeG: return "bridge_g";
  }
  return "?";
}

Eigen::Vector3d ResidualBlock::whitened() const {
  const Eigen::LLT<Eigen::Matrix3d> llt(covariance);
  if (llt.info() != Eigen::Success) throw NumericalError("residual covariance not SPD");
  return llt.matrixL().solve(value);
}

double ResidualBlock::squared_mahalanobis() const { return whitened().squaredNorm(); }

RotationCache RotationCache::from(const std::vector<ImuExtrinsics>& extrinsics) {
  RotationCache cache;
  cache.R.reserve(extrinsics.size());
  cache.G.reserve(extrinsics.size());
  for (const auto& e : extrinsics) {
    cache.R.push_back(quat_to_rot(e.q).matrix());
    cache.G.push_back(quat_to_rot(e.q_g).matrix());
  }
  return cache;
}

double sigma_accel_residual(const NoiseSpec& ns) {
  const double var_a = ns.sigma_a * ns.sigma_a / ns.dt;
  const double var_g = ns.sigma_g * ns.sigma_g / ns.dt;
  const double sa = ns.sigma_alpha();
  return std::sqrt(2.0 * var_a + 2.0 * var_g * var_g + sa * sa);
}

double sigma_gyro_residual(const NoiseSpec& ns) {
  return std::sqrt(2.0 * ns.sigma_g * ns.sigma_g / ns.dt);
}

double sigma_bias_step(double sigma_b, double dt) { return sigma_b * std::sqrt(dt); }

double sigma_bias_bridge(double sigma_b, int gap_segments, int steps_per_segment, double dt) {
  return sigma_b * std::sqrt(gap_segments * steps_per_segment * dt);
}

Eigen::Vector3d accel_residual_value(const RotationCache& cache, const Eigen::Vector3d& p_n,
                                     int n, const Eigen::Vector3d& accel_n,
                                     const Eigen::Vector3d& gyro_n,
                                     const Eigen::Vector3d& accel_0, const Eigen::Vector3d& ba_n,
                                     const Eigen::Vector3d& ba_0, const Eigen::Vector3d& bg_n,
                                     const Eigen::Vector3d& alpha) {
  const Eigen::Matrix3d& R = cache.R[n];
  const Eigen::Vector3d u = cache.G[n] * (gyro_n - bg_n);
  const Eigen::Vector3d s = R * alpha;
  const Eigen::Vector3d inner = (accel_n - ba_n) + u.cross(u.cross(p_n)) + s.cross(p_n);
  return R.transpose() * inner - (accel_0 - ba_0);
}

AccelResidualJet accel_residual_jet(const RotationCache& cache, const Eigen::Vector3d& p_n, int n,
                                    const Eigen::Vector3d& accel_n, const Eigen::Vector3d& gyro_n,
                                    const Eigen::Vector3d& accel_0, const Eigen::Vector3d& ba_n,
                                    const Eigen::Vector3d& ba_0, const Eigen::Vector3d& bg_n,
                                    const Eigen::Vector3d& alpha) {
  const Eigen::Matrix3d& R = cache.R[n];
  const Eigen::Matrix3d& G = cache.G[n];
  const Eigen::Matrix3d Rt = R.transpose();
  const Eigen::Vector3d v = gyro_n - bg_n;
  const Eigen::Vector3d u = G * v;
  const Eigen::Vector3d s = R * alpha;
  const Eigen::Vector3d inner = (accel_n - ba_n) + u.cross(u.cross(p_n)) + s.cross(p_n);
  const Eigen::Matrix3d du = centripetal_jacobian(u, p_n);

  AccelResidualJet jet;
  jet.value = Rt * inner - (accel_0 - ba_0);
  jet.d_p = Rt * (skew(u) * skew(u) + skew(s));
  jet.d_phi = skew(Rt * inner) + Rt * skew(p_n) * R * skew(alpha);
  jet.d_phig = -Rt * du * G * skew(v);
  jet.d_ba_n = -Rt;
  jet.d_ba_0 = Eigen::Matrix3d::Identity();
  jet.d_bg_n = -Rt * du * G;
  jet.d_alpha = -Rt * skew(p_n) * R;
  return jet;
}

Eigen::Vector3d gyro_residual_value(const RotationCache& cache, int n,
                                    const Eigen::Vector3d& gyro_n, const Eigen::Vector3d& gyro_0,
                                    const Eigen::Vector3d& bg_n, const Eigen::Vector3d& bg_0) {
  return cache.R[n].transpose() * (cache.G[n] * (gyro_n - bg_n)) -
         cache.G[0] * (gyro_0 - bg_0);
}

GyroResidualJet gyro_residual_jet(const RotationCache& cache, int n,
                                  const Eigen::Vector3d& gyro_n, const Eigen::Vector3d& gyro_0,
                                  const Eigen::Vector3d& bg_n, const Eigen::Vector3d& bg_0) {
  const Eigen::Matrix3d Rt = cache.R[n].transpose();
  const Eigen::Matrix3d& G = cache.G[n];
  const Eigen::Vector3d v_n = gyro_n - bg_n;
  const Eigen::Vector3d v_0 = gyro_0 - bg_0;

  GyroResidualJet jet;
  jet.value = Rt * (G * v_n) - cache.G[0] * v_0;
  jet.d_phi = skew(Rt * (G * v_n));
  jet.d_phig_n = -Rt * G * skew(v_n);
  jet.d_phig_0 = cache.G[0] * skew(v_0);
  jet.d_bg_n = -Rt * G;
  jet.d_bg_0 = cache.G[0];
  return jet;
}

namespace {

ResidualBlock make_block(ResidualKind kind, int imu, int step, const Eigen::Vector3d& value,
                         double sigma) {
  ResidualBlock b;
  b.kind = kind;
  b.imu = imu;
  b.step = step;
  b.value = value;
  b.covariance = sigma * sigma * Eigen::Matrix3d::Identity();
  return b;
}

}  // namespace

ResidualBlock residual_accel(const CalibrationState& state, const SegmentView& segment,
                             const NoiseSpec& noise, int n, int k) {
  const RotationCache cache = RotationCache::from(state.extrinsics());
  const SegmentStates& seg = state.segment(segment.index);
  const int ni = state.num_imus();
  const Eigen::Vector3d value = accel_residual_value(
      cache, state.extrinsics(n).p, n, segment.at(k, n).accel, segment.at(k, n).gyro,
      segment.at(k, 0).accel, seg.accel_bias[k * ni + n], seg.accel_bias[k * ni],
      seg.gyro_bias[k * ni + n], seg.alpha[k]);
  return make_block(ResidualKind::kAccel, n, k, value, sigma_accel_residual(noise));
}

ResidualBlock residual_gyro(const CalibrationState& state, const SegmentView& segment,
                            const NoiseSpec& noise, int n, int k) {
  const RotationCache cache = RotationCache::from(state.extrinsics());
  const SegmentStates& seg = state.segment(segment.index);
  const int ni = state.num_imus();
  const Eigen::Vector3d value =
      gyro_residual_value(cache, n, segment.at(k, n).gyro, segment.at(k, 0).gyro,
                          seg.gyro_bias[k * ni + n], seg.gyro_bias[k * ni]);
  return make_block(ResidualKind::kGyro, n, k, value, sigma_gyro_residual(noise));
}

ResidualBlock residual_bias_step(const CalibrationState& state, int segment_index,
                                 const NoiseSpec& noise, int n, int k, bool accel_sensor) {
  const SegmentStates& seg = state.segment(segment_index);
  const int ni = state.num_imus();
  const auto& series = accel_sensor ? seg.accel_bias : seg.gyro_bias;
  const Eigen::Vector3d value = series[(k + 1) * ni + n] - series[k * ni + n];
  const double sigma =
      sigma_bias_step(accel_sensor ? noise.sigma_ba : noise.sigma_bg, noise.dt);
  return make_block(accel_sensor ? ResidualKind::kBiasStepA : ResidualKind::kBiasStepG, n, k,
                    value, sigma);
}

ResidualBlock residual_bias_bridge(const CalibrationState& state, const NoiseSpec& noise,
                                   int from, int to, int n, bool accel_sensor) {
  if (to <= from) throw ConfigError("bridge requires to > from");
  const int ni = state.num_imus();
  const int last = state.steps_per_segment() - 1;
  const auto& head = accel_sensor ? state.segment(to).accel_bias : state.segment(to).gyro_bias;
  const auto& tail =
      accel_sensor ? state.segment(from).accel_bias : state.segment(from).gyro_bias;
  const Eigen::Vector3d value = head[0 * ni + n] - tail[last * ni + n];
  const double sigma = sigma_bias_bridge(accel_sensor ? noise.sigma_ba : noise.sigma_bg,
                                         to - from, state.steps_per_segment(), noise.dt);
  return make_block(accel_sensor ? ResidualKind::kBridgeA : ResidualKind::kBridgeG, n, from,
                    value, sigma);
}

std::vector<ResidualBlock> segment_residuals(const CalibrationState& state,
                                             const SegmentView& segment, const NoiseSpec& noise) {
  const int ni = state.num_imus();
  const int K = segment.num_steps;
  std::vector<ResidualBlock> blocks;
  blocks.reserve(2 * (ni - 1) * K + 2 * ni * (K - 1));
  for (int k = 0; k < K; ++k) {
    for (int n = 1; n < ni; ++n) {
      blocks.push_back(residual_accel(state, segment, noise, n, k));
      blocks.push_back(residual_gyro(state, segment, noise, n, k));
    }
  }
  for (int k = 0; k + 1 < K; ++k) {
    for (int n = 0; n < ni; ++n) {
      blocks.push_back(residual_bias_step(state, segment.index, noise, n, k, true));
      blocks.push_back(residual_bias_step(state, segment.index, noise, n, k, false));
    }
  }
  return blocks;
}

}  // namespace imucal
