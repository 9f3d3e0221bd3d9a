#include "oicp/icp.hpp"

#include <algorithm>
#include <cmath>

#include "oicp/correspondence.hpp"
#include "oicp/errors.hpp"

namespace oicp {

RigidTransformd seed_from_imu(const RigidTransformd& prev_pose, const Eigen::Quaterniond& imu_prev,
                              const Eigen::Quaterniond& imu_curr, const RigidTransformd& extrinsic) {
  const Eigen::Matrix3d r_prev = imu_prev.normalized().toRotationMatrix();
  const Eigen::Matrix3d r_curr = imu_curr.normalized().toRotationMatrix();
  const Eigen::Matrix3d delta =
      extrinsic.rotation * r_prev.transpose() * r_curr * extrinsic.rotation.transpose();
  return compose(prev_pose, RigidTransformd{delta, Eigen::Vector3d::Zero()});
}

bool median_converged(const std::vector<double>& medians, int patience, double bin_width) {
  const size_t needed = static_cast<size_t>(patience) + 1;
  if (medians.size() < needed) return false;
  const auto tail = medians.end() - needed;
  const auto [lo, hi] = std::minmax_element(tail, medians.end());
  return *hi - *lo <= bin_width;
}

namespace {

bool is_tracking_failure(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kNoCorrespondences:
    case ErrorCode::kAllPairsRejected:
    case ErrorCode::kDegenerateSystem:
    case ErrorCode::kEmptyHistogram:
      return true;
    default:
      return false;
  }
}

}  // namespace

IcpResult register_clouds(const CloudPyramid& source, const CloudPyramid& target,
                          const RigidTransformd& seed, const IcpConfig& config) {
  const int levels = source.level_count();
  if (levels == 0 || target.level_count() != levels) {
    throw Error(ErrorCode::kBadConfig, "pyramids must have the same nonzero level count");
  }
  if (config.mode == IcpMode::kFixedCadence && static_cast<int>(config.cadence.size()) != levels) {
    throw Error(ErrorCode::kBadConfig, "cadence length must equal the pyramid level count");
  }

  IcpResult result;
  result.transform = seed;

  std::vector<double> finest_medians;
  for (int level = levels - 1; level >= 0; --level) {
    const double scale = static_cast<double>(1 << level);
    const double d_max = config.histogram.d_max * scale;
    const double bin_width = d_max / config.histogram.bins;

    NormalShootConfig shoot;
    shoot.max_dist = config.max_dist * scale;
    shoot.step_len = config.step_len > 0.0 ? config.step_len * scale : bin_width;
    shoot.normal_gate_deg = config.normal_gate_deg;

    const int iter_budget = config.mode == IcpMode::kFixedCadence
                                ? config.cadence[levels - 1 - level]
                                : config.max_iters_per_level;

    std::vector<double> medians;
    int executed = 0;
    bool level_converged = false;
    try {
      for (int iter = 0; iter < iter_budget; ++iter) {
        CorrespondenceSet corr =
            normal_shoot(source.levels[level], target.levels[level], result.transform, shoot);
        if (static_cast<int>(corr.size()) < config.min_pairs) {
          throw Error(ErrorCode::kNoCorrespondences, "too few correspondences");
        }

        const DistanceHistogram hist =
            build_histogram(corr, bin_width, d_max, config.partitions);
        const double median = median_from_cdf(hist);
        medians.push_back(median);

        double kept_fraction = 1.0;
        if (config.filter_enabled) {
          const double band =
              std::max(2.0 * bin_width, config.band_kappa * mad_from_histogram(hist, median));
          FilterResult filtered = median_filter(corr, median, band);
          kept_fraction = filtered.kept_fraction;
          corr = std::move(filtered.kept);
          if (static_cast<int>(corr.size()) < config.min_pairs) {
            throw Error(ErrorCode::kAllPairsRejected, "too few pairs after the median filter");
          }
        }

        const NormalEquations ne = build_normal_equations(corr, config.partitions);
        const Twistd x = solve_regularized(ne, config.regularizer, config.solver_rcond);
        if (x.translation().norm() > config.max_dist) {
          // A step beyond the finest-level correspondence radius contradicts
          // the data that produced it; the linearization has left its
          // validity range.
          throw Error(ErrorCode::kDegenerateSystem, "divergent update step");
        }
        const double rms = pointwise_residual(corr, x).rms;
        result.transform = compose(orthonormalize(small_angle_transform(x)), result.transform);

        ++executed;
        result.trace.push_back({level, iter, median, kept_fraction, rms});
        result.kept_fraction_history.push_back(kept_fraction);
        result.residual_history.push_back(rms);

        if (config.mode == IcpMode::kMedianConvergence &&
            median_converged(medians, config.convergence_patience, bin_width)) {
          level_converged = true;
          break;
        }
      }
    } catch (const Error& e) {
      if (!is_tracking_failure(e)) throw;
      result.iterations_per_level.push_back(executed);
      if (level == 0) {
        result.tracking_lost = true;
        result.converged = false;
        if (!medians.empty()) result.final_median = medians.back();
        return result;
      }
      continue;  // coarse-level failure: fall through with the current estimate
    }

    result.iterations_per_level.push_back(executed);
    if (level == 0) {
      finest_medians = medians;
      result.converged = config.mode == IcpMode::kMedianConvergence
                             ? level_converged
                             : median_converged(medians, config.convergence_patience, bin_width);
      if (!medians.empty()) result.final_median = medians.back();
    }
  }
  return result;
}

bool classify_failure(const IcpResult& result, const RigidTransformd& truth, double rot_tol_deg,
                      double trans_tol_m) {
  if (result.tracking_lost) return true;
  const double rot_err = geodesic_angle(result.transform.rotation, truth.rotation);
  const double trans_err = (result.transform.translation - truth.translation).norm();
  return rot_err > rot_tol_deg * M_PI / 180.0 || trans_err > trans_tol_m;
}

}  // namespace oicp
