#pragma once

#include <vector>

#include <Eigen/Core>

#include "imucal/problem.hpp"

namespace imucal {

/// Gauss-Newton normal equations J^T J delta = -J^T r in the problem's block
/// structure: a dense Theta block, one diagonal block per timestep for psi,
/// and a diagonal-only coupling between adjacent timesteps (bias random-walk
/// steps and bridges are the only residuals that span two timesteps, and
/// their Jacobians are scaled identities).
///
///   [ S    V_0   V_1  ...  ]   S: p x p        V_t: p x B
///   [ V_0^T D_0  U_0        ]   D_t: B x B      U_t: diagonal (stored as B-vector)
///   [ V_1^T U_0^T D_1  U_1  ]
///   [  ...                  ]
///
/// psi is eliminated timestep by timestep (block-tridiagonal Schur / Cholesky
/// sweep), which is what keeps both the solver and the Fisher marginalization
/// linear in the number of timesteps.
class NormalEquations {
 public:
  NormalEquations(int theta_dim, int block_dim, int num_steps);

  int theta_dim() const { return theta_dim_; }
  int block_dim() const { return block_dim_; }
  int num_steps() const { return num_steps_; }

  const Eigen::MatrixXd& s() const { return s_; }
  const Eigen::MatrixXd& v(int t) const { return v_[t]; }
  const Eigen::MatrixXd& d(int t) const { return d_[t]; }
  const Eigen::VectorXd& u(int t) const { return u_[t]; }

  /// Accumulates one whitened residual block (J^T J and -J^T r).
  void add(const EmittedBlock& block);

  /// Builds the normal equations of a problem at a state in one pass.
  static NormalEquations assemble(const LeastSquaresProblem& problem,
                                  const CalibrationState& state);

  /// Fisher information of the intra-segment residuals of one segment
  /// (RHS left at zero).
  static NormalEquations assemble_segment(const SegmentView& segment,
                                          const CalibrationState& state, const NoiseSpec& noise);

  double max_diagonal() const;
  /// Spec jitter policy: 1e-9 * trace(H_psipsi) / dim(H_psipsi).
  double psi_jitter() const;

  /// Schur complement of psi onto Theta: S - sum_t V D^-1 V^T with the
  /// tridiagonal carry terms; `jitter` is added to every D_t diagonal.
  /// Throws SingularInformationError if a block cannot be factorized.
  Eigen::MatrixXd marginal_theta(double jitter) const;

  /// Solves (H + mu I) [delta_theta; delta_psi] = -J^T r. Returns false when
  /// a factorization fails (caller should raise mu).
  bool solve_damped(double mu, Eigen::VectorXd& delta) const;

  double gradient_inf_norm() const;

 private:
  int theta_dim_;
  int block_dim_;
  int num_steps_;
  Eigen::MatrixXd s_;
  Eigen::VectorXd g_theta_;
  std::vector<Eigen::MatrixXd> v_;
  std::vector<Eigen::MatrixXd> d_;
  std::vector<Eigen::VectorXd> u_;
  std::vector<Eigen::VectorXd> g_psi_;
};

}  // namespace imucal
