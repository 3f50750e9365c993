#include <doctest.h>

#include "imucal/analysis.hpp"
#include "imucal/initialization.hpp"
#include "imucal/selection.hpp"
#include "test_helpers.hpp"

using namespace imucal;

namespace {

struct SelectionSetup {
  MeasurementSet set;
  SegmentedData data;
  CalibrationState theta0;
  NoiseSpec noise;

  SelectionSetup(int num_segments, int steps_per_segment, uint64_t seed = 91)
      : set(make_bench_data(num_segments, 1, steps_per_segment, seed)),
        data(set, steps_per_segment),
        theta0(initial_state(data).state),
        noise(set.ground_truth->rig.noise) {}
};

}  // namespace

TEST_CASE("counter laws: all-accept and first-only-accept workloads") {
  SelectionSetup s(6, 50);

  const SelectionReport all = select_greedy_original(s.data, s.theta0, s.noise, 0.0);
  CHECK(all.selected.size() == 6);
  CHECK(all.counters.segment_jacobian_evals == 6 * 7 / 2);
  CHECK(all.counters.calibrate_calls == 6);

  const SelectionReport first_only = select_greedy_original(s.data, s.theta0, s.noise, 1e18);
  CHECK(first_only.selected == std::vector<int>{0});
  CHECK(first_only.counters.segment_jacobian_evals == 2 * 6 - 1);
  CHECK(first_only.counters.calibrate_calls == 6);

  const SelectionReport init_all = select_greedy_init_param(s.data, s.theta0, s.noise, 0.0);
  CHECK(init_all.selected.size() == 6);
  CHECK(init_all.counters.segment_jacobian_evals == 6);
  CHECK(init_all.counters.calibrate_calls == 1);

  const SelectionReport init_first = select_greedy_init_param(s.data, s.theta0, s.noise, 1e18);
  CHECK(init_first.selected == std::vector<int>{0});
  CHECK(init_first.counters.segment_jacobian_evals == 6);
  CHECK(init_first.counters.calibrate_calls == 1);
}

TEST_CASE("first segment is always accepted by both greedy policies") {
  SelectionSetup s(4, 40);
  for (double lambda : {0.0, 0.5, 1e18}) {
    const SelectionReport orig = select_greedy_original(s.data, s.theta0, s.noise, lambda);
    REQUIRE(!orig.selected.empty());
    CHECK(orig.selected.front() == 0);
    CHECK(orig.decisions[0].accepted);
    CHECK(!orig.decisions[0].utility.has_value());  // empty-prior clause

    const SelectionReport init = select_greedy_init_param(s.data, s.theta0, s.noise, lambda);
    REQUIRE(!init.selected.empty());
    CHECK(init.selected.front() == 0);
    CHECK(init.decisions[0].accepted);
  }
}

TEST_CASE("policies are deterministic") {
  SelectionSetup s(5, 40);
  const SelectionReport a = select_greedy_init_param(s.data, s.theta0, s.noise, 0.5);
  const SelectionReport b = select_greedy_init_param(s.data, s.theta0, s.noise, 0.5);
  CHECK(a.selected == b.selected);
  REQUIRE(a.decisions.size() == b.decisions.size());
  for (size_t i = 0; i < a.decisions.size(); ++i) {
    CHECK(a.decisions[i].accepted == b.decisions[i].accepted);
    if (a.decisions[i].utility) {
      CHECK(*a.decisions[i].utility == *b.decisions[i].utility);
    }
  }
  CHECK(a.final_state.extrinsics(1).p == b.final_state.extrinsics(1).p);
}

TEST_CASE("m-largest: M = L selects everything, M = 1 is the argmax") {
  SelectionSetup s(5, 40);
  const SelectionReport all = select_m_largest(s.data, s.theta0, s.noise, 5);
  CHECK(all.selected == std::vector<int>{0, 1, 2, 3, 4});

  const SelectionReport one = select_m_largest(s.data, s.theta0, s.noise, 1);
  REQUIRE(one.selected.size() == 1);
  double best = -std::numeric_limits<double>::infinity();
  int argmax = -1;
  for (const auto& d : one.decisions) {
    if (d.info_scalar && *d.info_scalar > best) {
      best = *d.info_scalar;
      argmax = d.segment;
    }
  }
  CHECK(one.selected[0] == argmax);

  CHECK_THROWS(select_m_largest(s.data, s.theta0, s.noise, 0));
  CHECK_THROWS(select_m_largest(s.data, s.theta0, s.noise, 6));
}

TEST_CASE("baseline selects all segments and spends no time in Evaluate") {
  SelectionSetup s(4, 40);
  const SelectionReport report = select_baseline(s.data, s.theta0, s.noise);
  CHECK(report.selected.size() == 4);
  CHECK(report.selected_ratio() == doctest::Approx(1.0));
  CHECK(report.evaluate_seconds == 0.0);
  CHECK(report.calibrate_seconds > 0.0);
  CHECK(report.counters.calibrate_calls == 1);
  CHECK(report.counters.segment_jacobian_evals == 0);

  const SelectionReport m_all = select_m_largest(s.data, s.theta0, s.noise, 4);
  CHECK(m_all.selected == report.selected);
}

TEST_CASE("raising lambda never accepts a candidate the lower threshold rejected") {
  SelectionSetup s(8, 40);
  const std::vector<double> grid{0.0, 0.1, 0.5, 1.0, 2.0};
  std::vector<SelectionReport> reports;
  for (double lambda : grid) {
    reports.push_back(select_greedy_init_param(s.data, s.theta0, s.noise, lambda));
  }
  for (size_t i = 0; i + 1 < reports.size(); ++i) {
    const auto& low = reports[i].decisions;
    const auto& high = reports[i + 1].decisions;
    for (size_t c = 0; c < low.size(); ++c) {
      if (low[c].accepted != high[c].accepted) {
        // Divergence must be the higher threshold rejecting, and only while
        // the selected prefixes were identical up to this candidate.
        CHECK(low[c].accepted);
        CHECK(!high[c].accepted);
        break;
      }
    }
    CHECK(reports[i + 1].selected.size() <= reports[i].selected.size());
  }
}

TEST_CASE("an estimator failure marks the candidate rejected-with-error") {
  SelectionSetup s(4, 40);
  MeasurementSet broken = s.set;
  broken.at(1 * 40 + 3, 1).accel = Eigen::Vector3d::Constant(
      std::numeric_limits<double>::quiet_NaN());  // poison segment 1
  const SegmentedData data(broken, 40);
  const SelectionReport report = select_greedy_original(data, s.theta0, s.noise, 0.0);
  CHECK(!report.decisions[1].accepted);
  CHECK(!report.decisions[1].error.empty());
  // Selection survives and keeps the healthy segments.
  CHECK(report.selected.size() == 3);
  CHECK(std::find(report.selected.begin(), report.selected.end(), 1) == report.selected.end());
}

TEST_CASE("jaccard overlap") {
  CHECK(jaccard_overlap({0, 1, 2}, {0, 1, 2}) == doctest::Approx(1.0));
  CHECK(jaccard_overlap({0, 1}, {2, 3}) == doctest::Approx(0.0));
  CHECK(jaccard_overlap({0, 1, 2}, {1, 2, 3}) == doctest::Approx(0.5));
}
