#pragma once

#include <string>

#include "imucal/trajectory.hpp"
#include "imucal/types.hpp"

namespace imucal {

/// Everything cmd_simulate needs: rig, trajectory, misalignment policy.
struct SimulationConfig {
  RigConfig rig;
  TrajectoryConfig trajectory;
  /// When >= 0 and a rig entry has no explicit q_g, a misalignment with this
  /// stddev is drawn per IMU from the simulation seed.
  double gyro_misalignment_deg = -1.0;
};

/// Measurement CSV, header `t,imu_id,ax,ay,az,gx,gy,gz`, 17 significant
/// digits (lossless round-trip), LF line endings.
void save_csv(const MeasurementSet& set, const std::string& path);
MeasurementSet load_csv(const std::string& path);

/// Rig config JSON: {imus:[{p:[..],q_xyzw:[..],q_g_xyzw:[..]}],
/// noise:{sigma_a,sigma_ba,sigma_g,sigma_bg,dt},gravity:[..]}.
RigConfig load_rig_json(const std::string& path);
RigConfig parse_rig_json(const std::string& text);
std::string rig_to_json(const RigConfig& rig);
void save_rig_json(const RigConfig& rig, const std::string& path);

/// Simulation config: the rig schema plus a `trajectory` object and optional
/// `gyro_misalignment_deg`.
SimulationConfig load_simulation_config(const std::string& path);
SimulationConfig parse_simulation_config(const std::string& text);

/// Ground-truth sidecar (rig with realized misalignments, motion samples and
/// bias trajectories) for evaluating estimates against simulation truth.
void save_ground_truth_json(const GroundTruth& truth, const std::string& path);
GroundTruth load_ground_truth_json(const std::string& path);

}  // namespace imucal
