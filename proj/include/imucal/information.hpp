#pragma once

#include <vector>

#include "imucal/normal_equations.hpp"
#include "imucal/solver.hpp"
#include "imucal/state.hpp"
#include "imucal/types.hpp"

namespace imucal {

/// Where the Jacobians feeding a Fisher matrix were evaluated. The init-param
/// policy must keep every contribution at the initial guess; this tag makes
/// that contract checkable.
enum class EvalPoint { kInitialGuess, kCurrentEstimate };

/// Fisher information of one segment's intra-segment residuals, partitioned
/// as [Theta | segment-local psi]. Bridges are excluded: they exist only in
/// the final least-squares problem, which keeps per-segment psi disjoint and
/// the marginal contributions additive.
NormalEquations segment_fisher(const SegmentView& segment, const CalibrationState& state,
                               const NoiseSpec& noise, EvalCounters* counters = nullptr);

/// Theta-marginal information of one segment: H_TT - H_Tp H_pp^-1 H_pT with
/// the spec jitter on H_pp.
Eigen::MatrixXd marginalize_segment(const NormalEquations& fisher);

/// Theta-marginal Fisher information accumulated over segments (disjoint psi
/// makes the sum exact), tagged with the evaluation point.
class MarginalInfo {
 public:
  MarginalInfo(int theta_dim, EvalPoint eval_point);

  EvalPoint eval_point() const { return eval_point_; }
  int contributions() const { return contributions_; }
  const Eigen::MatrixXd& h_theta() const { return h_theta_; }

  void add(const Eigen::MatrixXd& contribution);

 private:
  Eigen::MatrixXd h_theta_;
  EvalPoint eval_point_;
  int contributions_ = 0;
};

struct MarginalCovariance {
  Eigen::MatrixXd sigma;      // Sigma_Theta = H^-1
  double logdet_sigma = 0.0;  // from the Cholesky diagonal
};

/// Inverts the accumulated Theta information via Cholesky (after the spec
/// jitter). Throws UnobservableError with the numerical null-space basis when
/// the information matrix is rank deficient.
MarginalCovariance marginal_covariance(const MarginalInfo& info);

/// log|Sigma_Theta| with jitter regularization and no observability gate;
/// rank-deficient directions contribute at the jitter level. This is what the
/// greedy utilities consume, so partially observable intermediate sets are
/// handled gracefully (resolving a null direction shows up as a huge gain).
double logdet_sigma_regularized(const Eigen::MatrixXd& h_theta);

/// Information gain in nats: 0.5 (log|Sigma_prior| - log|Sigma_post|).
/// Nonnegative up to numerical tolerance since information increments are PSD.
double utility(double logdet_prior, double logdet_post);

/// Scalar information -0.5 log|Sigma_Theta| used for ranking segments;
/// -infinity when Theta is unobservable from the given information.
double information_scalar(const Eigen::MatrixXd& h_theta);

/// Per-segment information scalar at a fixed state (psi from that state).
std::vector<double> per_segment_information(const SegmentedData& data,
                                            const CalibrationState& state,
                                            const NoiseSpec& noise);

}  // namespace imucal
