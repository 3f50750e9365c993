#include "imucal/types.hpp"

#include <cmath>

#include "imucal/errors.hpp"

namespace imucal {

void NoiseSpec::validate() const {
  if (sigma_a < 0 || sigma_ba < 0 || sigma_g < 0 || sigma_bg < 0) {
    throw ConfigError("noise densities must be nonnegative");
  }
  if (dt <= 0) throw ConfigError("sampling interval dt must be positive");
}

void RigConfig::validate() const {
  noise.validate();
  if (imus.size() < 2) throw ConfigError("rig needs at least 2 IMUs");
  const ImuExtrinsics& base = imus[0];
  if (base.p.norm() != 0.0 || base.q.angle() != 0.0) {
    throw ConfigError("base IMU (index 0) must have identity pose");
  }
  if (!gravity.allFinite()) throw ConfigError("gravity must be finite");
}

void MeasurementSet::validate() const {
  if (num_imus < 1 || num_steps < 1) throw ConfigError("measurement set is empty");
  if (samples.size() != static_cast<size_t>(num_imus) * num_steps) {
    throw ConfigError("measurement set is not dense over timesteps x IMUs");
  }
  for (int n = 0; n < num_imus; ++n) {
    double prev = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < num_steps; ++k) {
      const ImuMeasurement& m = at(k, n);
      if (m.imu_id != n) throw ConfigError("measurement rows out of order");
      if (!(m.t > prev)) throw ConfigError("timestamps not strictly increasing");
      if (!m.accel.allFinite() || !m.gyro.allFinite()) {
        throw NumericalError("non-finite measurement");
      }
      prev = m.t;
    }
  }
}

SegmentedData::SegmentedData(const MeasurementSet& set, int steps_per_segment)
    : set_(&set), steps_per_segment_(steps_per_segment) {
  if (steps_per_segment < 2) throw ConfigError("segments need at least 2 timesteps");
  const int num_segments = set.num_steps / steps_per_segment;
  if (num_segments < 1) throw ConfigError("data shorter than one segment");
  dropped_steps_ = set.num_steps - num_segments * steps_per_segment;
  segments_.reserve(num_segments);
  for (int l = 0; l < num_segments; ++l) {
    segments_.push_back(SegmentView{&set, l, l * steps_per_segment, steps_per_segment});
  }
}

}  // namespace imucal
