#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "imucal/analysis.hpp"
#include "imucal/errors.hpp"
#include "imucal/information.hpp"
#include "imucal/initialization.hpp"
#include "imucal/io.hpp"
#include "imucal/reports.hpp"
#include "imucal/selection.hpp"
#include "imucal/simulator.hpp"
#include "imucal/trajectory.hpp"

namespace {

using namespace imucal;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNumericalError = 2;

struct SimulateArgs {
  std::string config_path;
  std::string out_csv;
  std::string truth_out;
  uint64_t seed = 42;
  bool noiseless = false;
};

int run_simulate(const SimulateArgs& args) {
  SimulationConfig config = load_simulation_config(args.config_path);
  if (config.gyro_misalignment_deg >= 0.0) {
    for (int n = 0; n < config.rig.num_imus(); ++n) {
      config.rig.imus[n].q_g =
          random_gyro_misalignment(args.seed, n, config.gyro_misalignment_deg);
    }
  }
  const auto trajectory = sinusoidal_euler_trajectory(config.trajectory, config.rig.gravity);
  const MeasurementSet set = simulate(trajectory, config.rig, args.seed, !args.noiseless);
  save_csv(set, args.out_csv);
  const std::string truth_path =
      args.truth_out.empty() ? args.out_csv + ".truth.json" : args.truth_out;
  save_ground_truth_json(*set.ground_truth, truth_path);
  std::printf("wrote %s (%d steps x %d IMUs) and %s\n", args.out_csv.c_str(), set.num_steps,
              set.num_imus, truth_path.c_str());
  return kExitOk;
}

struct CalibrateArgs {
  std::string data_csv;
  std::string rig_guess;
  std::string truth_json;
  std::string policy = "greedy-init";
  double lambda = 0.5;
  int m = 15;
  double segment_seconds = 1.0;
  std::string out_json;
  std::string trace_csv;
};

int run_calibrate(const CalibrateArgs& args) {
  const MeasurementSet set = load_csv(args.data_csv);

  NoiseSpec noise;
  const std::vector<ImuExtrinsics>* guess = nullptr;
  std::vector<ImuExtrinsics> guess_storage;
  if (!args.rig_guess.empty()) {
    const RigConfig rig = load_rig_json(args.rig_guess);
    noise = rig.noise;
    guess_storage = rig.imus;
    guess = &guess_storage;
  }

  const int steps_per_segment =
      std::max(2, static_cast<int>(std::lround(args.segment_seconds / set.dt)));
  const SegmentedData data(set, steps_per_segment);

  InitialStateResult init = initial_state(data, guess);
  const Policy policy = policy_from_string(args.policy);
  SelectionReport report =
      run_policy(policy, data, init.state, noise, args.lambda, args.m);
  report.warnings.insert(report.warnings.end(), init.warnings.begin(), init.warnings.end());

  ExtrinsicErrorSummary errors;
  bool have_errors = false;
  if (!args.truth_json.empty()) {
    const GroundTruth truth = load_ground_truth_json(args.truth_json);
    errors = compare_extrinsics(report.final_state.extrinsics(), truth.rig.imus);
    have_errors = true;
  }
  ReprojectionError reprojection;
  bool have_reprojection = false;
  if (!report.selected.empty()) {
    reprojection = reprojection_error(data, report.final_state, report.selected);
    have_reprojection = true;
  }

  const std::string json = calibration_report_json(
      report, noise, args.lambda, args.m, args.segment_seconds,
      have_errors ? &errors : nullptr, have_reprojection ? &reprojection : nullptr);
  if (args.out_json.empty()) {
    std::printf("%s\n", json.c_str());
  } else {
    write_text_file(args.out_json, json);
  }
  if (!args.trace_csv.empty()) write_text_file(args.trace_csv, decisions_csv(report));

  // Observability gate on the final estimate: rank-deficient Theta
  // information is a numerical failure (exit code 2).
  MarginalInfo info(report.final_state.theta_dim(), EvalPoint::kCurrentEstimate);
  for (int l : report.selected) {
    info.add(marginalize_segment(segment_fisher(data.segment(l), report.final_state, noise)));
  }
  (void)marginal_covariance(info);
  return kExitOk;
}

struct SensitivityArgs {
  std::string data_csv;
  std::string rig_ref;
  std::vector<double> dp_grid{0.0, 0.05, 0.1, 0.2};
  std::vector<double> dq_grid{0.0, 5.0, 15.0, 45.0};
  uint64_t seed = 42;
  double segment_seconds = 1.0;
  std::string out_csv;
};

int run_sensitivity(const SensitivityArgs& args) {
  const MeasurementSet set = load_csv(args.data_csv);
  const RigConfig rig = load_rig_json(args.rig_ref);
  const int steps_per_segment =
      std::max(2, static_cast<int>(std::lround(args.segment_seconds / set.dt)));
  const SegmentedData data(set, steps_per_segment);
  const auto points = sensitivity_sweep(data, rig, args.dp_grid, args.dq_grid, args.seed);
  const std::string csv = sweep_csv(points);
  if (args.out_csv.empty()) {
    std::printf("%s", csv.c_str());
  } else {
    write_text_file(args.out_csv, csv);
  }
  return kExitOk;
}

struct BenchArgs {
  std::string policy = "greedy-init";
  std::vector<int> L_grid{8, 16, 32, 64};
  double lambda = 0.0;
  int aux_imus = 1;
  int steps_per_segment = 100;
  uint64_t seed = 42;
  std::string out_csv;
  std::string summary_json;
};

int run_bench(const BenchArgs& args) {
  const BenchResult result =
      bench_complexity(args.L_grid, args.aux_imus, args.steps_per_segment,
                       policy_from_string(args.policy), args.lambda, args.seed);
  const std::string csv = bench_csv(result.rows);
  if (args.out_csv.empty()) {
    std::printf("%s", csv.c_str());
  } else {
    write_text_file(args.out_csv, csv);
  }
  const std::string summary =
      bench_summary_json(result, policy_from_string(args.policy), args.lambda);
  if (args.summary_json.empty()) {
    std::printf("%s\n", summary.c_str());
  } else {
    write_text_file(args.summary_json, summary);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-IMU extrinsic self-calibration with informative segment selection"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Generate IMU measurements for a rig");
  simulate->add_option("config", sim.config_path, "simulation config JSON")->required();
  simulate->add_option("out", sim.out_csv, "output measurement CSV")->required();
  simulate->add_option("--seed", sim.seed, "RNG seed");
  simulate->add_option("--truth-out", sim.truth_out, "ground-truth sidecar path");
  simulate->add_flag("--noiseless", sim.noiseless, "disable noise and bias walks");

  CalibrateArgs cal;
  CLI::App* calibrate = app.add_subcommand("calibrate", "Select segments and calibrate");
  calibrate->add_option("data", cal.data_csv, "measurement CSV")->required();
  calibrate->add_option("--rig-guess", cal.rig_guess, "rig config JSON used as initial guess");
  calibrate->add_option("--truth", cal.truth_json, "ground-truth sidecar for error reporting");
  calibrate->add_option("--policy", cal.policy,
                        "baseline | greedy-original | greedy-init | m-largest");
  calibrate->add_option("--lambda", cal.lambda, "utility threshold (nats)");
  calibrate->add_option("--m", cal.m, "subset size for m-largest");
  calibrate->add_option("--segment-seconds", cal.segment_seconds, "segment length in seconds");
  calibrate->add_option("--out", cal.out_json, "report JSON path (stdout when omitted)");
  calibrate->add_option("--trace", cal.trace_csv, "per-segment decision trace CSV");

  SensitivityArgs sen;
  CLI::App* sensitivity =
      app.add_subcommand("sensitivity", "Information correlation under perturbations");
  sensitivity->add_option("data", sen.data_csv, "measurement CSV")->required();
  sensitivity->add_option("rig", sen.rig_ref, "reference rig JSON")->required();
  sensitivity->add_option("--dp-grid", sen.dp_grid, "position deviations [m]");
  sensitivity->add_option("--dq-grid", sen.dq_grid, "orientation deviations [deg]");
  sensitivity->add_option("--seed", sen.seed, "perturbation direction seed");
  sensitivity->add_option("--segment-seconds", sen.segment_seconds, "segment length in seconds");
  sensitivity->add_option("--out", sen.out_csv, "output CSV (stdout when omitted)");

  BenchArgs ben;
  CLI::App* bench = app.add_subcommand("bench", "Complexity counters over an L grid");
  bench->add_option("--policy", ben.policy, "greedy-original | greedy-init");
  bench->add_option("--L-grid", ben.L_grid, "segment counts");
  bench->add_option("--lambda", ben.lambda, "utility threshold");
  bench->add_option("--imus", ben.aux_imus, "number of non-base IMUs");
  bench->add_option("--K", ben.steps_per_segment, "timesteps per segment");
  bench->add_option("--seed", ben.seed, "data seed");
  bench->add_option("--out", ben.out_csv, "counter table CSV");
  bench->add_option("--summary-out", ben.summary_json, "fit summary JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (calibrate->parsed()) return run_calibrate(cal);
    if (sensitivity->parsed()) return run_sensitivity(sen);
    if (bench->parsed()) return run_bench(ben);
  } catch (const UnobservableError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumericalError;
  } catch (const SingularInformationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumericalError;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumericalError;
  } catch (const UndefinedCorrelationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumericalError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInputError;
  }
  return kExitInputError;
}
