#pragma once

#include <vector>

#include "imucal/types.hpp"

namespace imucal {

/// One sinusoidal excitation: angle (or displacement) = amplitude *
/// sin(omega * t) on one axis, active for t in [start, end). Phase uses
/// absolute time.
struct SinusoidInterval {
  double start = 0.0;
  double end = 0.0;
  int axis = 0;        // 0 = x, 1 = y, 2 = z
  double amplitude = 0.0;  // rad for rotation, m for translation
  double omega = 0.0;      // rad/s
};

struct TrajectoryConfig {
  double duration = 60.0;
  double dt = 0.01;
  std::vector<SinusoidInterval> rotation;     // XYZ Euler angle profiles
  std::vector<SinusoidInterval> translation;  // world-frame position profiles

  void validate() const;  // throws ConfigError on overlapping intervals
};

/// Rig profile of the simulated edge case: roll sin(pi t) on [0,20),
/// pitch sin(2 pi t) on [20,40), yaw sin(3 pi t) on [40,60), no translation.
TrajectoryConfig edge_case_trajectory();

/// Body orientation at time t: C(q) maps body coordinates to world
/// coordinates, composed as Rz(c) Ry(b) Rx(a) from the XYZ Euler profile.
UnitQuaternion orientation_at(const TrajectoryConfig& config, double t);

/// Samples the trajectory at dt over [0, duration): angular velocity and
/// acceleration by exact analytic differentiation of the Euler profile,
/// specific force from the translational profile and gravity.
std::vector<MotionSample> sinusoidal_euler_trajectory(const TrajectoryConfig& config,
                                                      const Eigen::Vector3d& gravity_world);

}  // namespace imucal
