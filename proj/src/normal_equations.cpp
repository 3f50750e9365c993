#include "imucal/normal_equations.hpp"

#include <cassert>
#include <cmath>

#include <Eigen/Cholesky>

#include "imucal/errors.hpp"

namespace imucal {

NormalEquations::NormalEquations(int theta_dim, int block_dim, int num_steps)
    : theta_dim_(theta_dim), block_dim_(block_dim), num_steps_(num_steps),
      s_(Eigen::MatrixXd::Zero(theta_dim, theta_dim)),
      g_theta_(Eigen::VectorXd::Zero(theta_dim)),
      v_(num_steps, Eigen::MatrixXd::Zero(theta_dim, block_dim)),
      d_(num_steps, Eigen::MatrixXd::Zero(block_dim, block_dim)),
      u_(num_steps > 0 ? num_steps - 1 : 0, Eigen::VectorXd::Zero(block_dim)),
      g_psi_(num_steps, Eigen::VectorXd::Zero(block_dim)) {}

void NormalEquations::add(const EmittedBlock& block) {
  for (int i = 0; i < block.num_theta; ++i) {
    const auto& ti = block.theta[i];
    g_theta_.segment<3>(ti.col) -= ti.jac.transpose() * block.value;
    for (int j = 0; j < block.num_theta; ++j) {
      const auto& tj = block.theta[j];
      s_.block<3, 3>(ti.col, tj.col) += ti.jac.transpose() * tj.jac;
    }
    for (int j = 0; j < block.num_psi; ++j) {
      const auto& pj = block.psi[j];
      v_[pj.step].block<3, 3>(ti.col, pj.offset) += ti.jac.transpose() * pj.jac;
    }
  }
  for (int i = 0; i < block.num_psi; ++i) {
    const auto& pi = block.psi[i];
    g_psi_[pi.step].segment<3>(pi.offset) -= pi.jac.transpose() * block.value;
    for (int j = 0; j < block.num_psi; ++j) {
      const auto& pj = block.psi[j];
      const Eigen::Matrix3d h = pi.jac.transpose() * pj.jac;
      if (pi.step == pj.step) {
        d_[pi.step].block<3, 3>(pi.offset, pj.offset) += h;
      } else if (pi.step + 1 == pj.step) {
        // Only bias steps/bridges couple adjacent timesteps; their J^T J
        // cross term is diagonal by construction.
        assert(pi.offset == pj.offset);
        u_[pi.step].segment<3>(pi.offset) += h.diagonal();
      } else if (pj.step + 1 == pi.step) {
        // handled symmetrically when (i, j) are visited swapped
      } else {
        assert(false && "residual spans non-adjacent timesteps");
      }
    }
  }
}

NormalEquations NormalEquations::assemble(const LeastSquaresProblem& problem,
                                          const CalibrationState& state) {
  NormalEquations ne(problem.theta_dim(), problem.psi_block_dim(), problem.total_steps());
  problem.visit_blocks(state, true, [&](const EmittedBlock& b) { ne.add(b); });
  return ne;
}

NormalEquations NormalEquations::assemble_segment(const SegmentView& segment,
                                                  const CalibrationState& state,
                                                  const NoiseSpec& noise) {
  NormalEquations ne(state.theta_dim(), state.psi_block_dim(), segment.num_steps);
  LeastSquaresProblem::visit_segment_blocks(state, segment, noise, true,
                                            [&](const EmittedBlock& b) { ne.add(b); });
  return ne;
}

double NormalEquations::max_diagonal() const {
  double value = s_.diagonal().maxCoeff();
  for (const auto& d : d_) value = std::max(value, d.diagonal().maxCoeff());
  return value;
}

double NormalEquations::psi_jitter() const {
  double trace = 0.0;
  for (const auto& d : d_) trace += d.trace();
  const double dim = static_cast<double>(num_steps_) * block_dim_;
  return dim > 0 ? 1e-9 * trace / dim : 0.0;
}

Eigen::MatrixXd NormalEquations::marginal_theta(double jitter) const {
  Eigen::MatrixXd s = s_;
  Eigen::MatrixXd v_cur;       // \bar{V}_t
  Eigen::MatrixXd d_carry;     // correction for D_{t+1}
  const Eigen::MatrixXd jitter_eye =
      jitter * Eigen::MatrixXd::Identity(block_dim_, block_dim_);
  for (int t = 0; t < num_steps_; ++t) {
    Eigen::MatrixXd d_cur = d_[t] + jitter_eye;
    if (t > 0) d_cur -= d_carry;
    v_cur = t == 0 ? v_[0] : Eigen::MatrixXd(v_[t] - v_cur);
    const Eigen::LLT<Eigen::MatrixXd> llt(d_cur);
    if (llt.info() != Eigen::Success) {
      throw SingularInformationError("nuisance block not positive definite at timestep " +
                                     std::to_string(t));
    }
    const Eigen::MatrixXd w = llt.solve(v_cur.transpose());  // B x p
    s.noalias() -= v_cur * w;
    if (t + 1 < num_steps_) {
      const auto u = u_[t].asDiagonal();
      // Carries for the next step: V_{t+1} -= Vbar D^-1 U, D_{t+1} -= U D^-1 U.
      v_cur = (u * w).transpose();                    // p x B, subtracted next loop
      d_carry = u * llt.solve(Eigen::MatrixXd(u_[t].asDiagonal()));
    }
  }
  return s;
}

bool NormalEquations::solve_damped(double mu, Eigen::VectorXd& delta) const {
  const int p = theta_dim_;
  const int B = block_dim_;
  Eigen::MatrixXd s = s_ + mu * Eigen::MatrixXd::Identity(p, p);
  Eigen::VectorXd g_theta = g_theta_;

  std::vector<Eigen::LLT<Eigen::MatrixXd>> factors;
  factors.reserve(num_steps_);
  std::vector<Eigen::MatrixXd> v_bar(num_steps_);
  std::vector<Eigen::VectorXd> g_bar(num_steps_);

  Eigen::MatrixXd d_carry;
  for (int t = 0; t < num_steps_; ++t) {
    Eigen::MatrixXd d_cur = d_[t];
    d_cur.diagonal().array() += mu;
    if (t > 0) d_cur -= d_carry;
    v_bar[t] = t == 0 ? v_[0] : Eigen::MatrixXd(v_[t] - v_bar[t]);
    g_bar[t] = t == 0 ? g_psi_[0] : Eigen::VectorXd(g_psi_[t] - g_bar[t]);
    factors.emplace_back(d_cur);
    const Eigen::LLT<Eigen::MatrixXd>& llt = factors.back();
    if (llt.info() != Eigen::Success) return false;
    const Eigen::MatrixXd w = llt.solve(v_bar[t].transpose());  // B x p
    s.noalias() -= v_bar[t] * w;
    g_theta.noalias() -= v_bar[t] * llt.solve(g_bar[t]);
    if (t + 1 < num_steps_) {
      const auto u = u_[t].asDiagonal();
      v_bar[t + 1] = (u * w).transpose();
      g_bar[t + 1] = u * llt.solve(g_bar[t]);
      d_carry = u * llt.solve(Eigen::MatrixXd(u_[t].asDiagonal()));
    }
  }

  const Eigen::LLT<Eigen::MatrixXd> s_llt(s);
  if (s_llt.info() != Eigen::Success) return false;
  delta.resize(p + num_steps_ * B);
  delta.head(p) = s_llt.solve(g_theta);

  Eigen::VectorXd psi_next;
  for (int t = num_steps_ - 1; t >= 0; --t) {
    Eigen::VectorXd rhs = g_bar[t] - v_bar[t].transpose() * delta.head(p);
    if (t + 1 < num_steps_) rhs -= u_[t].asDiagonal() * psi_next;
    psi_next = factors[t].solve(rhs);
    delta.segment(p + t * B, B) = psi_next;
  }
  return true;
}

double NormalEquations::gradient_inf_norm() const {
  double norm = g_theta_.lpNorm<Eigen::Infinity>();
  for (const auto& g : g_psi_) norm = std::max(norm, g.lpNorm<Eigen::Infinity>());
  return norm;
}

}  // namespace imucal
