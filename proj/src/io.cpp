#include "imucal/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "imucal/errors.hpp"

namespace imucal {

namespace {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(std::string_view token, int line) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("malformed numeric field '" + std::string(token) + "'", line);
  }
  return value;
}

json vec3_to_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

Eigen::Vector3d json_to_vec3(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw ParseError(what + " must be a 3-array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json quat_to_json(const UnitQuaternion& q) {
  return json::array({q.x(), q.y(), q.z(), q.w()});
}

UnitQuaternion json_to_quat(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 4) throw ParseError(what + " must be a 4-array [x,y,z,w]");
  return UnitQuaternion::from_vector(
      Eigen::Vector4d(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                      j[3].get<double>()));
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return j;
}

NoiseSpec parse_noise(const json& j) {
  NoiseSpec ns;
  ns.sigma_a = j.at("sigma_a").get<double>();
  ns.sigma_ba = j.at("sigma_ba").get<double>();
  ns.sigma_g = j.at("sigma_g").get<double>();
  ns.sigma_bg = j.at("sigma_bg").get<double>();
  ns.dt = j.at("dt").get<double>();
  if (j.contains("sigma_alpha")) ns.sigma_alpha_override = j["sigma_alpha"].get<double>();
  ns.validate();
  return ns;
}

json noise_to_json(const NoiseSpec& ns) {
  json j{{"sigma_a", ns.sigma_a}, {"sigma_ba", ns.sigma_ba}, {"sigma_g", ns.sigma_g},
         {"sigma_bg", ns.sigma_bg}, {"dt", ns.dt}};
  if (ns.sigma_alpha_override > 0) j["sigma_alpha"] = ns.sigma_alpha_override;
  return j;
}

RigConfig parse_rig(const json& j) {
  RigConfig rig;
  rig.noise = parse_noise(j.at("noise"));
  if (j.contains("gravity")) rig.gravity = json_to_vec3(j["gravity"], "gravity");
  for (const auto& imu : j.at("imus")) {
    ImuExtrinsics e;
    if (imu.contains("p")) e.p = json_to_vec3(imu["p"], "imus[].p");
    if (imu.contains("q_xyzw")) e.q = json_to_quat(imu["q_xyzw"], "imus[].q_xyzw");
    if (imu.contains("q_g_xyzw")) e.q_g = json_to_quat(imu["q_g_xyzw"], "imus[].q_g_xyzw");
    rig.imus.push_back(e);
  }
  rig.validate();
  return rig;
}

json rig_to_json_obj(const RigConfig& rig) {
  json imus = json::array();
  for (const auto& e : rig.imus) {
    imus.push_back(json{{"p", vec3_to_json(e.p)},
                        {"q_xyzw", quat_to_json(e.q)},
                        {"q_g_xyzw", quat_to_json(e.q_g)}});
  }
  return json{{"imus", imus}, {"noise", noise_to_json(rig.noise)},
              {"gravity", vec3_to_json(rig.gravity)}};
}

std::vector<SinusoidInterval> parse_intervals(const json& j) {
  std::vector<SinusoidInterval> out;
  for (const auto& iv : j) {
    SinusoidInterval s;
    s.start = iv.at("start").get<double>();
    s.end = iv.at("end").get<double>();
    s.axis = iv.at("axis").get<int>();
    s.amplitude = iv.at("amplitude").get<double>();
    s.omega = iv.at("omega").get<double>();
    out.push_back(s);
  }
  return out;
}

}  // namespace

void save_csv(const MeasurementSet& set, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << "t,imu_id,ax,ay,az,gx,gy,gz\n";
  for (const auto& m : set.samples) {
    out << format_double(m.t) << ',' << m.imu_id;
    for (int i = 0; i < 3; ++i) out << ',' << format_double(m.accel[i]);
    for (int i = 0; i < 3; ++i) out << ',' << format_double(m.gyro[i]);
    out << '\n';
  }
  if (!out) throw ParseError("write failed for " + path);
}

MeasurementSet load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,imu_id,ax,ay,az,gx,gy,gz") {
    throw ParseError("unexpected header '" + line + "'", 1);
  }

  std::vector<ImuMeasurement> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<std::string_view, 8> fields;
    std::string_view rest = line;
    for (int i = 0; i < 8; ++i) {
      const size_t comma = rest.find(',');
      if (i < 7) {
        if (comma == std::string_view::npos) throw ParseError("expected 8 fields", line_no);
        fields[i] = rest.substr(0, comma);
        rest = rest.substr(comma + 1);
      } else {
        if (comma != std::string_view::npos) throw ParseError("expected 8 fields", line_no);
        fields[i] = rest;
      }
    }
    ImuMeasurement m;
    m.t = parse_double(fields[0], line_no);
    const double id = parse_double(fields[1], line_no);
    m.imu_id = static_cast<int>(id);
    if (m.imu_id < 0 || m.imu_id != id) throw ParseError("bad imu_id", line_no);
    for (int i = 0; i < 3; ++i) m.accel[i] = parse_double(fields[2 + i], line_no);
    for (int i = 0; i < 3; ++i) m.gyro[i] = parse_double(fields[5 + i], line_no);
    rows.push_back(m);
  }
  if (rows.empty()) throw ParseError("no data rows");

  const int num_imus =
      1 + std::max_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
            return a.imu_id < b.imu_id;
          })->imu_id;
  if (rows.size() % num_imus != 0) {
    throw ParseError("row count is not a multiple of the IMU count");
  }
  const int steps = static_cast<int>(rows.size()) / num_imus;

  MeasurementSet set;
  set.num_imus = num_imus;
  set.num_steps = steps;
  set.samples.resize(rows.size());
  std::vector<char> seen(rows.size(), 0);
  // Rows may arrive in any order; timestamps group rows into timesteps.
  std::map<double, int> step_of_time;
  for (const auto& m : rows) step_of_time.emplace(m.t, 0);
  if (static_cast<int>(step_of_time.size()) != steps) {
    throw ParseError("timestamp count does not match timesteps x IMUs structure");
  }
  int idx = 0;
  for (auto& [t, step] : step_of_time) step = idx++;
  for (const auto& m : rows) {
    if (m.imu_id >= num_imus) throw ParseError("imu_id out of range");
    const int k = step_of_time[m.t];
    const size_t slot = static_cast<size_t>(k) * num_imus + m.imu_id;
    if (seen[slot]) throw ParseError("duplicate (timestep, imu) pair");
    seen[slot] = 1;
    set.samples[slot] = m;
  }
  for (char s : seen) {
    if (!s) throw ParseError("missing (timestep, imu) pair");
  }
  const auto t0 = set.at(0, 0).t, t1 = steps > 1 ? set.at(1, 0).t : t0 + 1.0;
  set.dt = t1 - t0;
  set.validate();
  return set;
}

RigConfig parse_rig_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("rig JSON: ") + e.what());
  }
  return parse_rig(j);
}

RigConfig load_rig_json(const std::string& path) { return parse_rig(read_json_file(path)); }

std::string rig_to_json(const RigConfig& rig) { return rig_to_json_obj(rig).dump(2); }

void save_rig_json(const RigConfig& rig, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << rig_to_json(rig) << '\n';
}

SimulationConfig parse_simulation_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("simulation config JSON: ") + e.what());
  }
  SimulationConfig config;
  config.rig = parse_rig(j);
  const json& tj = j.at("trajectory");
  config.trajectory.duration = tj.at("duration").get<double>();
  config.trajectory.dt = config.rig.noise.dt;
  if (tj.contains("dt")) config.trajectory.dt = tj["dt"].get<double>();
  if (tj.contains("rotation")) config.trajectory.rotation = parse_intervals(tj["rotation"]);
  if (tj.contains("translation")) {
    config.trajectory.translation = parse_intervals(tj["translation"]);
  }
  config.trajectory.validate();
  if (j.contains("gyro_misalignment_deg")) {
    config.gyro_misalignment_deg = j["gyro_misalignment_deg"].get<double>();
  }
  return config;
}

SimulationConfig load_simulation_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_simulation_config(ss.str());
}

void save_ground_truth_json(const GroundTruth& truth, const std::string& path) {
  json motion = json::array();
  for (const auto& m : truth.motion) {
    motion.push_back(json{{"t", m.t},
                          {"omega", vec3_to_json(m.omega)},
                          {"alpha", vec3_to_json(m.alpha)},
                          {"f0", vec3_to_json(m.f0)}});
  }
  const auto bias_series = [](const std::vector<std::vector<Eigen::Vector3d>>& b) {
    json out = json::array();
    for (const auto& per_imu : b) {
      json series = json::array();
      for (const auto& v : per_imu) series.push_back(vec3_to_json(v));
      out.push_back(series);
    }
    return out;
  };
  json j{{"rig", rig_to_json_obj(truth.rig)},
         {"motion", motion},
         {"accel_bias", bias_series(truth.accel_bias)},
         {"gyro_bias", bias_series(truth.gyro_bias)}};
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << j.dump() << '\n';
}

GroundTruth load_ground_truth_json(const std::string& path) {
  const json j = read_json_file(path);
  GroundTruth truth;
  truth.rig = parse_rig(j.at("rig"));
  for (const auto& mj : j.at("motion")) {
    MotionSample m;
    m.t = mj.at("t").get<double>();
    m.omega = json_to_vec3(mj.at("omega"), "motion[].omega");
    m.alpha = json_to_vec3(mj.at("alpha"), "motion[].alpha");
    m.f0 = json_to_vec3(mj.at("f0"), "motion[].f0");
    truth.motion.push_back(m);
  }
  const auto read_bias = [&](const char* key) {
    std::vector<std::vector<Eigen::Vector3d>> out;
    for (const auto& series : j.at(key)) {
      std::vector<Eigen::Vector3d> per_imu;
      for (const auto& v : series) per_imu.push_back(json_to_vec3(v, key));
      out.push_back(per_imu);
    }
    return out;
  };
  truth.accel_bias = read_bias("accel_bias");
  truth.gyro_bias = read_bias("gyro_bias");
  return truth;
}

}  // namespace imucal
