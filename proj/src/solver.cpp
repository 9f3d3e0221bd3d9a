#include "oicp/solver.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

#include "oicp/errors.hpp"

namespace oicp {

namespace {

// 21 upper-triangle entries of ata + 6 entries of atb, each with a Kahan
// compensation term.
struct Accumulator {
  static constexpr int kTerms = 27;
  double sum[kTerms] = {};
  double comp[kTerms] = {};
  std::size_t n = 0;

  void add(const Vector6d& a, double b) {
    double terms[kTerms];
    int t = 0;
    for (int i = 0; i < 6; ++i)
      for (int j = i; j < 6; ++j) terms[t++] = a[i] * a[j];
    for (int i = 0; i < 6; ++i) terms[t++] = a[i] * b;
    for (int i = 0; i < kTerms; ++i) {
      const double y = terms[i] - comp[i];
      const double s = sum[i] + y;
      comp[i] = (s - sum[i]) - y;
      sum[i] = s;
    }
    ++n;
  }

  void merge(const Accumulator& other) {
    for (int i = 0; i < kTerms; ++i) {
      const double y = other.sum[i] - comp[i];
      const double s = sum[i] + y;
      comp[i] = (s - sum[i]) - y;
      sum[i] = s;
    }
    n += other.n;
  }
};

}  // namespace

NormalEquations build_normal_equations(const CorrespondenceSet& c, int partitions) {
  partitions = std::max(1, partitions);
  const std::size_t n = c.pairs.size();
  const std::size_t chunk = n == 0 ? 1 : (n + partitions - 1) / partitions;

  std::vector<Accumulator> partial(partitions);
  for (int part = 0; part < partitions; ++part) {
    const std::size_t begin = part * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    auto& acc = partial[part];
    for (std::size_t i = begin; i < end; ++i) {
      const auto& pair = c.pairs[i];
      Vector6d a;
      a.head<3>() = pair.p.cross(pair.n);
      a.tail<3>() = pair.n;
      acc.add(a, (pair.q - pair.p).dot(pair.n));
    }
  }

  // Tree reduction over the partials.
  for (std::size_t stride = 1; stride < partial.size(); stride *= 2) {
    for (std::size_t i = 0; i + stride < partial.size(); i += 2 * stride) {
      partial[i].merge(partial[i + stride]);
    }
  }

  NormalEquations ne;
  int t = 0;
  for (int i = 0; i < 6; ++i) {
    for (int j = i; j < 6; ++j) {
      ne.ata(i, j) = partial[0].sum[t];
      ne.ata(j, i) = partial[0].sum[t];
      ++t;
    }
  }
  for (int i = 0; i < 6; ++i) ne.atb[i] = partial[0].sum[t++];
  ne.n = partial[0].n;
  return ne;
}

Twistd solve_regularized(const NormalEquations& ne, const Regularizer& reg, double rcond) {
  if (ne.n < 1) throw Error(ErrorCode::kDegenerateSystem, "no pairs accumulated");

  Matrix6d system = ne.ata;
  const double weight = 2.0 * reg.effective(ne.n) * static_cast<double>(ne.n);
  system.diagonal().head<3>().array() += weight;  // P^T P = diag(1,1,1,0,0,0)

  // The cutoff is measured against the data term alone: a large regularizer
  // inflates sigma_max of the combined system and would otherwise mask every
  // translation direction behind the relative threshold.
  const double data_scale = ne.ata.operatorNorm();
  Eigen::JacobiSVD<Matrix6d> svd(system, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector6d& sv = svd.singularValues();
  if (!std::isfinite(sv[0]) || !(sv[0] > 0.0) || !(data_scale > 0.0)) {
    throw Error(ErrorCode::kDegenerateSystem, "normal equations are numerically zero");
  }
  const double cutoff = rcond * data_scale;
  Vector6d inv = Vector6d::Zero();
  int kept = 0;
  for (int i = 0; i < 6; ++i) {
    if (sv[i] >= cutoff && sv[i] > 0.0) {
      inv[i] = 1.0 / sv[i];
      ++kept;
    }
  }
  if (kept == 0) {
    throw Error(ErrorCode::kDegenerateSystem, "all singular values below cutoff");
  }
  const Vector6d x = svd.matrixV() * inv.asDiagonal() * (svd.matrixU().transpose() * ne.atb);
  return Twistd::FromVector(x);
}

ResidualStats pointwise_residual(const CorrespondenceSet& c, const Twistd& x) {
  ResidualStats stats;
  stats.residuals.reserve(c.pairs.size());
  const Mat4<double> m = small_angle_transform(x);
  const Eigen::Matrix3d r = m.block<3, 3>(0, 0);
  const Eigen::Vector3d t = m.block<3, 1>(0, 3);
  double sq = 0.0;
  for (const auto& pair : c.pairs) {
    const double res = (r * pair.p + t - pair.q).dot(pair.n);
    stats.residuals.push_back(res);
    sq += res * res;
  }
  stats.rms = stats.residuals.empty() ? 0.0 : std::sqrt(sq / stats.residuals.size());
  return stats;
}

}  // namespace oicp
