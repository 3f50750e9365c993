#include <doctest.h>

#include <random>

#include "imucal/errors.hpp"
#include "imucal/information.hpp"
#include "imucal/problem.hpp"
#include "test_helpers.hpp"

using namespace imucal;

namespace {

struct InfoSetup {
  RigConfig rig;
  MeasurementSet set;
  SegmentedData data;
  CalibrationState truth;

  InfoSetup(int num_imus, int steps_per_segment, double duration, bool noisy, uint64_t seed)
      : rig(test::table_rig_with_misalignment(seed, num_imus)),
        set(test::simulate_rig(rig, test::rich_trajectory(duration), seed, noisy)),
        data(set, steps_per_segment),
        truth(test::truth_state(set, data)) {}
};

Eigen::MatrixXd random_psd(std::mt19937_64& rng, int dim, int rank) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd a(dim, rank);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < rank; ++j) a(i, j) = normal(rng);
  }
  return a * a.transpose();
}

}  // namespace

TEST_CASE("segment Fisher blocks equal the dense J^T J on a tiny instance") {
  const InfoSetup s(2, 3, 0.5, true, 81);
  const NormalEquations fisher = segment_fisher(s.data.segment(1), s.truth, s.rig.noise);

  const LeastSquaresProblem problem(s.data, {1}, s.rig.noise);
  const Eigen::MatrixXd jac = Eigen::MatrixXd(problem.jacobian(s.truth));
  const Eigen::MatrixXd dense = jac.transpose() * jac;
  const int p = problem.theta_dim();
  const int B = problem.psi_block_dim();

  CHECK((fisher.s() - dense.topLeftCorner(p, p)).cwiseAbs().maxCoeff() < 1e-9);
  for (int t = 0; t < 3; ++t) {
    CHECK((fisher.v(t) - dense.block(0, p + t * B, p, B)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((fisher.d(t) - dense.block(p + t * B, p + t * B, B, B)).cwiseAbs().maxCoeff() < 1e-9);
  }
  for (int t = 0; t < 2; ++t) {
    const Eigen::MatrixXd coupling = dense.block(p + t * B, p + (t + 1) * B, B, B);
    CHECK((coupling - Eigen::MatrixXd(fisher.u(t).asDiagonal())).cwiseAbs().maxCoeff() < 1e-9);
  }
  // H_psi,psi is block-tridiagonal: nothing couples steps 0 and 2.
  CHECK(dense.block(p, p + 2 * B, B, B).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("accumulated marginals equal the dense Schur complement (N=1, K=5, 2 segments)") {
  // Two segments from different excitation intervals; psi blocks are
  // disjoint without bridges, so the sum of per-segment marginals must equal
  // the Theta-Schur complement of the joint dense matrix (same jitter).
  const InfoSetup s(2, 5, 1.0, true, 82);
  const std::vector<int> segments{2, 12};

  const LeastSquaresProblem joint(s.data, segments, s.rig.noise, /*include_bridges=*/false);
  const Eigen::MatrixXd jac = Eigen::MatrixXd(joint.jacobian(s.truth));
  const Eigen::MatrixXd dense = jac.transpose() * jac;
  const int p = joint.theta_dim();
  const int psi = joint.psi_dim();

  const NormalEquations joint_ne = NormalEquations::assemble(joint, s.truth);
  const double jitter = joint_ne.psi_jitter();

  Eigen::MatrixXd accumulated = Eigen::MatrixXd::Zero(p, p);
  for (int l : segments) {
    accumulated +=
        segment_fisher(s.data.segment(l), s.truth, s.rig.noise).marginal_theta(jitter);
  }

  const Eigen::MatrixXd h_pp =
      dense.bottomRightCorner(psi, psi) + jitter * Eigen::MatrixXd::Identity(psi, psi);
  const Eigen::MatrixXd schur_dense =
      dense.topLeftCorner(p, p) -
      dense.topRightCorner(p, psi) * h_pp.ldlt().solve(dense.bottomLeftCorner(psi, p));

  CHECK((accumulated - schur_dense).cwiseAbs().maxCoeff() /
            schur_dense.cwiseAbs().maxCoeff() <
        1e-8);
}

TEST_CASE("marginal covariance matches the dense block inversion (N=2, K=6)") {
  // Generic geometry with two auxiliary IMUs keeps every Theta direction
  // observable. The dense oracle inverts the Theta-Schur complement of the
  // joint matrix, which equals the Theta block of the full inverse; going
  // through the raw 273-dim inverse instead is numerically meaningless here
  // (the bias-step whitening alone spreads the spectrum over ~1e16).
  RigConfig rig = test::generic_rig(89, 3);
  const MeasurementSet set = test::simulate_rig(rig, test::rich_trajectory(1.0), 89, true);
  const SegmentedData data(set, 6);
  const CalibrationState truth = test::truth_state(set, data);
  const std::vector<int> segments{1, 12};

  const LeastSquaresProblem joint(data, segments, rig.noise, /*include_bridges=*/false);
  const Eigen::MatrixXd jac = Eigen::MatrixXd(joint.jacobian(truth));
  const Eigen::MatrixXd dense = jac.transpose() * jac;
  const int p = joint.theta_dim();
  const int psi = joint.psi_dim();
  const double jitter = NormalEquations::assemble(joint, truth).psi_jitter();

  MarginalInfo info(truth.theta_dim(), EvalPoint::kCurrentEstimate);
  for (int l : segments) {
    info.add(segment_fisher(data.segment(l), truth, rig.noise).marginal_theta(jitter));
  }
  const MarginalCovariance cov = marginal_covariance(info);
  const Eigen::MatrixXd h_pp =
      dense.bottomRightCorner(psi, psi) + jitter * Eigen::MatrixXd::Identity(psi, psi);
  const Eigen::MatrixXd schur_dense =
      dense.topLeftCorner(p, p) -
      dense.topRightCorner(p, psi) * h_pp.ldlt().solve(dense.bottomLeftCorner(psi, p));
  const Eigen::MatrixXd sigma_dense =
      (schur_dense + 1e-9 * (schur_dense.trace() / p) * Eigen::MatrixXd::Identity(p, p))
          .ldlt()
          .solve(Eigen::MatrixXd::Identity(p, p));

  CHECK((cov.sigma - sigma_dense).cwiseAbs().maxCoeff() /
            sigma_dense.cwiseAbs().maxCoeff() <
        1e-8);
}

TEST_CASE("contributions of identical segments add exactly") {
  const InfoSetup s(2, 4, 0.5, true, 83);
  const Eigen::MatrixXd one =
      marginalize_segment(segment_fisher(s.data.segment(0), s.truth, s.rig.noise));
  MarginalInfo info(s.truth.theta_dim(), EvalPoint::kInitialGuess);
  info.add(one);
  info.add(one);
  CHECK((info.h_theta() - 2.0 * one).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK(info.eval_point() == EvalPoint::kInitialGuess);
  CHECK(info.contributions() == 2);
}

TEST_CASE("marginal covariance of H = 2I") {
  const int dim = 6;
  MarginalInfo info(dim, EvalPoint::kCurrentEstimate);
  info.add(2.0 * Eigen::MatrixXd::Identity(dim, dim));
  const MarginalCovariance cov = marginal_covariance(info);
  CHECK((cov.sigma - 0.5 * Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(cov.logdet_sigma == doctest::Approx(-dim * std::log(2.0)).epsilon(1e-7));
}

TEST_CASE("Cholesky log-determinant agrees with the dense determinant") {
  std::mt19937_64 rng(84);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 5;
    const Eigen::MatrixXd h =
        random_psd(rng, dim, dim) + Eigen::MatrixXd::Identity(dim, dim);
    const double jitter = 1e-9 * h.trace() / dim;
    const Eigen::MatrixXd jittered = h + jitter * Eigen::MatrixXd::Identity(dim, dim);
    CHECK(logdet_sigma_regularized(h) ==
          doctest::Approx(-std::log(jittered.determinant())).epsilon(1e-10));
  }
}

TEST_CASE("utility: exact cases and PSD monotonicity over 1000 increments") {
  CHECK(utility(3.7, 3.7) == doctest::Approx(0.0));

  // Sigma diag(4,1) -> diag(1,1): 0.5 ln 4.
  const double prior = std::log(4.0) + std::log(1.0);
  const double post = 0.0;
  CHECK(utility(prior, post) == doctest::Approx(0.5 * std::log(4.0)).epsilon(1e-12));

  // Sigma halved elementwise in dim d: (d/2) ln 2.
  const int d = 7;
  CHECK(utility(0.0, d * std::log(0.5)) == doctest::Approx(0.5 * d * std::log(2.0)));

  std::mt19937_64 rng(85);
  for (int trial = 0; trial < 1000; ++trial) {
    const int dim = 8;
    const Eigen::MatrixXd h = random_psd(rng, dim, dim + 2);
    const Eigen::MatrixXd inc = random_psd(rng, dim, 1 + trial % 4);
    const double u =
        utility(logdet_sigma_regularized(h), logdet_sigma_regularized(h + inc));
    CHECK(u >= -1e-9);
  }
}

TEST_CASE("information scalar: doubling, permutation invariance, singular sentinel") {
  std::mt19937_64 rng(86);
  const int dim = 9;
  const Eigen::MatrixXd h = random_psd(rng, dim, dim) + Eigen::MatrixXd::Identity(dim, dim);
  const double base = information_scalar(h);
  CHECK(information_scalar(2.0 * h) ==
        doctest::Approx(base + 0.5 * dim * std::log(2.0)).epsilon(1e-9));

  Eigen::PermutationMatrix<Eigen::Dynamic> perm(dim);
  perm.setIdentity();
  std::shuffle(perm.indices().data(), perm.indices().data() + dim, rng);
  const Eigen::MatrixXd permuted = perm.transpose() * h * perm;
  CHECK(information_scalar(permuted) == doctest::Approx(base).epsilon(1e-9));

  const Eigen::MatrixXd singular = random_psd(rng, dim, dim - 2);
  CHECK(information_scalar(singular) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("single-axis rotation leaves Theta unobservable (noiseless)") {
  RigConfig rig = test::table_rig_with_misalignment(87, 2);
  TrajectoryConfig roll_only;
  roll_only.duration = 2.0;
  roll_only.rotation = {{0.0, 2.0, 0, 0.9, M_PI}};
  const MeasurementSet set = test::simulate_rig(rig, roll_only, 87, false);
  const SegmentedData data(set, 50);
  const CalibrationState truth = test::truth_state(set, data);

  MarginalInfo info(truth.theta_dim(), EvalPoint::kCurrentEstimate);
  for (int l = 0; l < data.num_segments(); ++l) {
    info.add(marginalize_segment(segment_fisher(data.segment(l), truth, rig.noise)));
  }
  CHECK(information_scalar(info.h_theta()) == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(marginal_covariance(info), UnobservableError);
  try {
    marginal_covariance(info);
  } catch (const UnobservableError& e) {
    CHECK(e.null_basis().cols() >= 1);
    // Null directions are orthonormal.
    const Eigen::MatrixXd gram = e.null_basis().transpose() * e.null_basis();
    CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).norm() < 1e-9);
  }
}

TEST_CASE("ranking of the three edge-case intervals is non-constant") {
  const RigConfig rig = test::table_rig_with_misalignment(88);
  const MeasurementSet set = test::simulate_rig(rig, edge_case_trajectory(), 88, true);
  const SegmentedData data(set, 100);
  const CalibrationState truth = test::truth_state(set, data);
  const std::vector<double> info = per_segment_information(data, truth, rig.noise);
  REQUIRE(info.size() == 60);
  // Mean information per 20 s interval: the three excitation axes must not
  // produce an identical distribution.
  double mean[3] = {0, 0, 0};
  for (int l = 0; l < 60; ++l) mean[l / 20] += info[l] / 20.0;
  CHECK(std::abs(mean[0] - mean[2]) > 1e-3);
}
