#include "imucal/problem.hpp"

#include <algorithm>

#include "imucal/errors.hpp"

namespace imucal {

LeastSquaresProblem::LeastSquaresProblem(const SegmentedData& data, std::vector<int> selected,
                                         const NoiseSpec& noise, bool include_bridges)
    : data_(&data), selected_(std::move(selected)), noise_(noise),
      include_bridges_(include_bridges) {
  if (selected_.empty()) throw ConfigError("no segments selected");
  for (size_t i = 0; i + 1 < selected_.size(); ++i) {
    if (selected_[i] >= selected_[i + 1]) {
      throw ConfigError("selected segments must be sorted ascending and unique");
    }
  }
  if (selected_.front() < 0 || selected_.back() >= data.num_segments()) {
    throw ConfigError("selected segment index out of range");
  }
}

int LeastSquaresProblem::theta_dim() const { return 9 * (num_imus() - 1) + 3; }

int LeastSquaresProblem::num_residual_blocks() const {
  const int ni = num_imus();
  const int K = steps_per_segment();
  const int per_segment = 2 * (ni - 1) * K + 2 * ni * (K - 1);
  const int bridges = include_bridges_ ? 2 * ni * (num_selected() - 1) : 0;
  return num_selected() * per_segment + bridges;
}

double LeastSquaresProblem::evaluate_cost(const CalibrationState& state) const {
  double cost = 0.0;
  visit_blocks(state, false, [&](const EmittedBlock& b) { cost += b.value.squaredNorm(); });
  if (!std::isfinite(cost)) throw NumericalError("non-finite residual cost");
  return cost;
}

Eigen::VectorXd LeastSquaresProblem::residual_vector(const CalibrationState& state) const {
  Eigen::VectorXd r(3 * num_residual_blocks());
  int row = 0;
  visit_blocks(state, false, [&](const EmittedBlock& b) {
    r.segment<3>(row) = b.value;
    row += 3;
  });
  return r;
}

Eigen::SparseMatrix<double> LeastSquaresProblem::jacobian(const CalibrationState& state) const {
  const int rows = 3 * num_residual_blocks();
  const int cols = theta_dim() + psi_dim();
  const int B = psi_block_dim();
  const int p = theta_dim();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<size_t>(rows) * 8);
  int row = 0;
  visit_blocks(state, true, [&](const EmittedBlock& b) {
    for (int e = 0; e < b.num_theta; ++e) {
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          triplets.emplace_back(row + i, b.theta[e].col + j, b.theta[e].jac(i, j));
        }
      }
    }
    for (int e = 0; e < b.num_psi; ++e) {
      const int col = p + b.psi[e].step * B + b.psi[e].offset;
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          triplets.emplace_back(row + i, col + j, b.psi[e].jac(i, j));
        }
      }
    }
    row += 3;
  });
  Eigen::SparseMatrix<double> jac(rows, cols);
  jac.setFromTriplets(triplets.begin(), triplets.end());
  return jac;
}

CalibrationState LeastSquaresProblem::retract(const CalibrationState& state,
                                              const Eigen::VectorXd& delta) const {
  if (delta.size() != theta_dim() + psi_dim()) throw ConfigError("increment size mismatch");
  CalibrationState out = state;
  out.retract_theta(delta.head(theta_dim()));
  const int B = psi_block_dim();
  const int K = steps_per_segment();
  for (int t = 0; t < total_steps(); ++t) {
    out.retract_psi_block(selected_[t / K], t % K, delta.segment(theta_dim() + t * B, B));
  }
  return out;
}

}  // namespace imucal
