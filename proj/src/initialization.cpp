#include "imucal/initialization.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "imucal/errors.hpp"

namespace imucal {

RelativeOrientation init_relative_orientation(const std::vector<Eigen::Vector3d>& gyro_0,
                                              const std::vector<Eigen::Vector3d>& gyro_n,
                                              double dt) {
  if (gyro_0.size() != gyro_n.size()) throw ConfigError("gyro series must be time-aligned");
  if (gyro_0.size() < 2) throw ConfigError("need at least 2 timesteps");

  // A^T A accumulated over timestep pairs; sigma_i(A) = sqrt(eig_i(A^T A)).
  Eigen::Matrix4d ata = Eigen::Matrix4d::Zero();
  for (size_t k = 0; k + 1 < gyro_0.size(); ++k) {
    const Eigen::Matrix4d block =
        left_matrix(delta_quat(gyro_0[k], dt)) - right_matrix(delta_quat(gyro_n[k], dt));
    ata += block.transpose() * block;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(ata);  // eigenvalues ascending
  const Eigen::Vector4d values = eig.eigenvalues().cwiseMax(0.0);
  const double tiny = 1e-24 * std::max(values[3], 1.0);
  RelativeOrientation out;
  out.degeneracy_score =
      values[1] <= tiny ? 1.0 : std::sqrt(values[0] / values[1]);
  if (out.degeneracy_score > 0.5) throw DegenerateMotionError(out.degeneracy_score);
  out.base_from_imu = UnitQuaternion::from_vector(eig.eigenvectors().col(0));
  return out;
}

std::vector<Eigen::Vector3d> init_angular_acceleration(
    const std::vector<Eigen::Vector3d>& gyro_0, double dt, const UnitQuaternion& q_g0_guess) {
  const size_t n = gyro_0.size();
  if (n < 3) throw ConfigError("need at least 3 samples to differentiate");
  const Eigen::Matrix3d base_from_gyro = quat_to_rot(q_g0_guess).matrix();
  std::vector<Eigen::Vector3d> alpha(n);
  alpha[0] = base_from_gyro * ((gyro_0[1] - gyro_0[0]) / dt);
  for (size_t k = 1; k + 1 < n; ++k) {
    alpha[k] = base_from_gyro * ((gyro_0[k + 1] - gyro_0[k - 1]) / (2.0 * dt));
  }
  alpha[n - 1] = base_from_gyro * ((gyro_0[n - 1] - gyro_0[n - 2]) / dt);
  return alpha;
}

InitialStateResult initial_state(const SegmentedData& data,
                                 const std::vector<ImuExtrinsics>* rig_guess) {
  const MeasurementSet& set = data.set();
  const int num_imus = set.num_imus;
  const int K = data.steps_per_segment();

  std::vector<std::vector<Eigen::Vector3d>> gyro(num_imus);
  for (int n = 0; n < num_imus; ++n) {
    gyro[n].reserve(set.num_steps);
    for (int k = 0; k < set.num_steps; ++k) gyro[n].push_back(set.at(k, n).gyro);
  }

  InitialStateResult result{
      CalibrationState(std::vector<ImuExtrinsics>(num_imus), data.num_segments(), K), {}};
  CalibrationState& state = result.state;

  if (rig_guess != nullptr) {
    if (static_cast<int>(rig_guess->size()) != num_imus) {
      throw ConfigError("rig guess IMU count does not match the data");
    }
    for (int n = 0; n < num_imus; ++n) state.extrinsics(n) = (*rig_guess)[n];
  } else {
    for (int n = 1; n < num_imus; ++n) {
      try {
        const RelativeOrientation rel = init_relative_orientation(gyro[0], gyro[n], set.dt);
        state.extrinsics(n).q = rel.base_from_imu.conjugate();  // ^{In}_{I0} q
      } catch (const DegenerateMotionError& e) {
        result.warnings.push_back("IMU " + std::to_string(n) +
                                  ": degenerate motion (score " + std::to_string(e.score()) +
                                  "), orientation initialized to identity");
      }
    }
  }

  const std::vector<Eigen::Vector3d> alpha =
      init_angular_acceleration(gyro[0], set.dt, state.extrinsics(0).q_g);
  for (int l = 0; l < data.num_segments(); ++l) {
    const int first = data.segment(l).first_step;
    for (int k = 0; k < K; ++k) state.segment(l).alpha[k] = alpha[first + k];
  }
  return result;
}

}  // namespace imucal
