#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <vector>

#include "oicp/correspondence.hpp"
#include "oicp/geometry.hpp"

namespace oicp {

using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Vector6d = Eigen::Matrix<double, 6, 1>;

/// Accumulated linearized point-to-plane system: ata = sum a_i a_i^T,
/// atb = sum a_i b_i with rows a_i = (p_i x n_i, n_i), b_i = (q_i - p_i).n_i.
struct NormalEquations {
  Matrix6d ata = Matrix6d::Zero();
  Vector6d atb = Vector6d::Zero();
  std::size_t n = 0;
};

/// Quadratic penalty on the three rotation parameters: the solved system is
/// (ata + 2*lambda_eff*n*P^T P) x = atb with P = [I3 | 03].
struct Regularizer {
  double lambda = 5.0;
  /// kScaledByCount treats lambda as c in lambda(n) = c / n.
  enum class Mode { kConstant, kScaledByCount } mode = Mode::kConstant;

  double effective(std::size_t n) const {
    return mode == Mode::kConstant ? lambda : (n > 0 ? lambda / static_cast<double>(n) : lambda);
  }
};

/// Partitioned, compensated (Kahan) accumulation merged by tree reduction:
/// deterministic for a fixed partition count and within 1e-9 relative across
/// partition counts.
NormalEquations build_normal_equations(const CorrespondenceSet& c, int partitions = 8);

/// Minimum-norm SVD solve of the regularized system; singular values below
/// rcond * sigma_max(ata) are treated as zero (the data term sets the scale,
/// so a strong regularizer cannot mask weak translation directions). Throws
/// DegenerateSystem when no singular value survives the cutoff.
Twistd solve_regularized(const NormalEquations& ne, const Regularizer& reg, double rcond = 1e-10);

struct ResidualStats {
  std::vector<double> residuals;
  double rms = 0.0;
};

/// Point-to-plane residuals r_i = (M(x) p_i - q_i).n_i at the given twist.
ResidualStats pointwise_residual(const CorrespondenceSet& c, const Twistd& x);

}  // namespace oicp
