#include "imucal/information.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "imucal/errors.hpp"

namespace imucal {

namespace {

double theta_jitter(const Eigen::MatrixXd& h) {
  return 1e-9 * h.trace() / std::max<int>(1, static_cast<int>(h.rows()));
}

// Null directions are declared at 1e-10 relative to the largest eigenvalue;
// structural rank deficiency (single-axis motion, zero motion) sits at
// roundoff while noise-driven small eigenvalues stay well above this.
Eigen::MatrixXd null_space_basis(const Eigen::MatrixXd& h) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
  const double max_eig = std::max(eig.eigenvalues().maxCoeff(), 0.0);
  const double tol = std::max(1e-10 * max_eig, 1e-300);
  int null_dims = 0;
  while (null_dims < h.rows() && eig.eigenvalues()[null_dims] < tol) ++null_dims;
  return eig.eigenvectors().leftCols(null_dims);
}

}  // namespace

NormalEquations segment_fisher(const SegmentView& segment, const CalibrationState& state,
                               const NoiseSpec& noise, EvalCounters* counters) {
  if (counters) counters->segment_jacobian_evals += 1;
  return NormalEquations::assemble_segment(segment, state, noise);
}

Eigen::MatrixXd marginalize_segment(const NormalEquations& fisher) {
  return fisher.marginal_theta(fisher.psi_jitter());
}

MarginalInfo::MarginalInfo(int theta_dim, EvalPoint eval_point)
    : h_theta_(Eigen::MatrixXd::Zero(theta_dim, theta_dim)), eval_point_(eval_point) {}

void MarginalInfo::add(const Eigen::MatrixXd& contribution) {
  if (contribution.rows() != h_theta_.rows() || contribution.cols() != h_theta_.cols()) {
    throw ConfigError("marginal contribution dimension mismatch");
  }
  h_theta_ += contribution;
  // Keep the accumulation symmetric against roundoff drift.
  h_theta_ = 0.5 * (h_theta_ + h_theta_.transpose()).eval();
  contributions_ += 1;
}

MarginalCovariance marginal_covariance(const MarginalInfo& info) {
  const Eigen::MatrixXd& h = info.h_theta();
  const Eigen::MatrixXd null_basis = null_space_basis(h);
  if (null_basis.cols() > 0) throw UnobservableError(null_basis);

  const int dim = static_cast<int>(h.rows());
  const Eigen::MatrixXd jittered =
      h + theta_jitter(h) * Eigen::MatrixXd::Identity(dim, dim);
  const Eigen::LLT<Eigen::MatrixXd> llt(jittered);
  if (llt.info() != Eigen::Success) {
    throw UnobservableError(null_space_basis(jittered));
  }
  MarginalCovariance out;
  out.sigma = llt.solve(Eigen::MatrixXd::Identity(dim, dim));
  out.logdet_sigma = -2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return out;
}

double logdet_sigma_regularized(const Eigen::MatrixXd& h_theta) {
  const int dim = static_cast<int>(h_theta.rows());
  const double jitter = std::max(theta_jitter(h_theta), 1e-300);
  const Eigen::MatrixXd jittered =
      h_theta + jitter * Eigen::MatrixXd::Identity(dim, dim);
  const Eigen::LLT<Eigen::MatrixXd> llt(jittered);
  if (llt.info() != Eigen::Success) {
    throw SingularInformationError("information matrix not PSD even after jitter");
  }
  return -2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double utility(double logdet_prior, double logdet_post) {
  return 0.5 * (logdet_prior - logdet_post);
}

double information_scalar(const Eigen::MatrixXd& h_theta) {
  if (null_space_basis(h_theta).cols() > 0) {
    return -std::numeric_limits<double>::infinity();
  }
  return -0.5 * logdet_sigma_regularized(h_theta);
}

std::vector<double> per_segment_information(const SegmentedData& data,
                                            const CalibrationState& state,
                                            const NoiseSpec& noise) {
  std::vector<double> out(data.num_segments());
  for (int l = 0; l < data.num_segments(); ++l) {
    out[l] = information_scalar(marginalize_segment(segment_fisher(data.segment(l), state, noise)));
  }
  return out;
}

}  // namespace imucal
