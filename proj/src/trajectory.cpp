#include "imucal/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "imucal/errors.hpp"

namespace imucal {

namespace {

struct AxisProfile {
  // value, first and second time derivative per axis
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  Eigen::Vector3d d = Eigen::Vector3d::Zero();
  Eigen::Vector3d dd = Eigen::Vector3d::Zero();
};

AxisProfile evaluate(const std::vector<SinusoidInterval>& intervals, double t) {
  AxisProfile p;
  for (const auto& iv : intervals) {
    if (t >= iv.start && t < iv.end) {
      const double s = std::sin(iv.omega * t);
      const double c = std::cos(iv.omega * t);
      p.v[iv.axis] += iv.amplitude * s;
      p.d[iv.axis] += iv.amplitude * iv.omega * c;
      p.dd[iv.axis] -= iv.amplitude * iv.omega * iv.omega * s;
    }
  }
  return p;
}

void check_no_overlap(const std::vector<SinusoidInterval>& intervals, const char* what) {
  for (size_t i = 0; i < intervals.size(); ++i) {
    if (intervals[i].end <= intervals[i].start) {
      throw ConfigError(std::string(what) + " interval has end <= start");
    }
    if (intervals[i].axis < 0 || intervals[i].axis > 2) {
      throw ConfigError(std::string(what) + " interval axis out of range");
    }
    for (size_t j = i + 1; j < intervals.size(); ++j) {
      const bool disjoint =
          intervals[i].end <= intervals[j].start || intervals[j].end <= intervals[i].start;
      if (!disjoint) {
        throw ConfigError(std::string(what) + " intervals overlap");
      }
    }
  }
}

}  // namespace

void TrajectoryConfig::validate() const {
  if (duration <= 0.0 || dt <= 0.0) {
    throw ConfigError("trajectory duration and dt must be positive");
  }
  check_no_overlap(rotation, "rotation");
  check_no_overlap(translation, "translation");
}

TrajectoryConfig edge_case_trajectory() {
  TrajectoryConfig config;
  config.duration = 60.0;
  config.dt = 0.01;
  config.rotation = {
      {0.0, 20.0, 0, 1.0, M_PI},
      {20.0, 40.0, 1, 1.0, 2.0 * M_PI},
      {40.0, 60.0, 2, 1.0, 3.0 * M_PI},
  };
  return config;
}

UnitQuaternion orientation_at(const TrajectoryConfig& config, double t) {
  const AxisProfile e = evaluate(config.rotation, t);
  return euler_xyz_to_quat(e.v * (180.0 / M_PI));
}

std::vector<MotionSample> sinusoidal_euler_trajectory(const TrajectoryConfig& config,
                                                      const Eigen::Vector3d& gravity_world) {
  config.validate();
  const int steps = static_cast<int>(std::round(config.duration / config.dt));
  std::vector<MotionSample> out;
  out.reserve(steps);
  for (int k = 0; k < steps; ++k) {
    const double t = k * config.dt;
    const AxisProfile e = evaluate(config.rotation, t);
    const AxisProfile x = evaluate(config.translation, t);
    const double a = e.v[0], b = e.v[1];
    const double da = e.d[0], db = e.d[1], dc = e.d[2];
    const double dda = e.dd[0], ddb = e.dd[1], ddc = e.dd[2];
    const double sa = std::sin(a), ca = std::cos(a);
    const double sb = std::sin(b), cb = std::cos(b);

    MotionSample m;
    m.t = t;
    // Body rates of R_WB = Rz(c) Ry(b) Rx(a); standard Euler kinematics.
    m.omega = Eigen::Vector3d(da - dc * sb,                 //
                              db * ca + dc * cb * sa,       //
                              -db * sa + dc * cb * ca);
    m.alpha = Eigen::Vector3d(
        dda - ddc * sb - dc * db * cb,
        ddb * ca - db * da * sa + ddc * cb * sa + dc * (-db * sb * sa + da * cb * ca),
        -ddb * sa - db * da * ca + ddc * cb * ca + dc * (-db * sb * ca - da * cb * sa));

    const Eigen::Matrix3d world_from_body = quat_to_rot(orientation_at(config, t)).matrix();
    m.f0 = world_from_body.transpose() * (x.dd - gravity_world);
    out.push_back(m);
  }
  return out;
}

}  // namespace imucal
