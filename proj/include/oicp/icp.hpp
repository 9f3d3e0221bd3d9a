#pragma once

#include <Eigen/Geometry>

#include <vector>

#include "oicp/cloud.hpp"
#include "oicp/geometry.hpp"
#include "oicp/solver.hpp"

namespace oicp {

enum class IcpMode { kFixedCadence, kMedianConvergence };

struct HistogramConfig {
  int bins = 512;
  /// Histogram range at the finest level, meters; doubled per coarser level
  /// (so the bin count, and the relative resolution, stay fixed).
  double d_max = 0.5;
};

struct IcpConfig {
  IcpMode mode = IcpMode::kMedianConvergence;
  /// Iterations per level in coarse-to-fine order (fixed-cadence mode).
  std::vector<int> cadence = {10, 5, 4};
  /// Iteration cap per level (median-convergence mode).
  int max_iters_per_level = 50;
  /// The median must stay within one bin over this many successive
  /// iterations (i.e. patience+1 recorded medians) to declare convergence.
  int convergence_patience = 3;
  Regularizer regularizer{};
  bool filter_enabled = true;
  HistogramConfig histogram{};
  /// Correspondence acceptance radius and march budget at the finest level,
  /// meters; doubled per coarser level.
  double max_dist = 0.5;
  double normal_gate_deg = 60.0;
  /// March step at the finest level; 0 selects the histogram bin width.
  double step_len = 0.0;
  /// Fewer surviving pairs than this counts as a tracking failure.
  int min_pairs = 16;
  /// Filter band = max(2 * bin_width, band_kappa * MAD).
  double band_kappa = 3.0;
  int partitions = 8;
  /// Conditioning gate for the in-loop solves: directions with singular
  /// values below this fraction of the largest are treated as unobservable
  /// (no update along them, e.g. the in-plane slide of a lone visible plane).
  /// Looser than the solver's own 1e-10 default, which only strips exact
  /// rank deficiency.
  double solver_rcond = 1e-6;
};

struct IcpTraceRow {
  int level;
  int iteration;
  double median;
  double kept_fraction;
  double rms_residual;
};

struct IcpResult {
  RigidTransformd transform;
  bool converged = false;
  bool tracking_lost = false;
  /// Executed iteration counts in coarse-to-fine order.
  std::vector<int> iterations_per_level;
  double final_median = 0.0;
  std::vector<double> kept_fraction_history;
  std::vector<double> residual_history;
  std::vector<IcpTraceRow> trace;

  int total_iterations() const {
    int n = 0;
    for (int c : iterations_per_level) n += c;
    return n;
  }
};

/// Seeds the pose for a new frame from two absolute IMU orientations: the
/// relative rotation (mapped into the camera frame by the IMU-to-camera
/// extrinsic rotation) is composed onto the previous pose; the translation is
/// carried over unchanged.
RigidTransformd seed_from_imu(const RigidTransformd& prev_pose, const Eigen::Quaterniond& imu_prev,
                              const Eigen::Quaterniond& imu_curr,
                              const RigidTransformd& extrinsic = RigidTransformd::Identity());

/// True when the last patience+1 medians all lie within one bin width.
bool median_converged(const std::vector<double>& medians, int patience, double bin_width);

/// Coarse-to-fine registration of `source` onto `target` starting at `seed`.
/// Each iteration: normal shooting, distance histogram + median, median
/// filtering (optional), regularized solve, re-rigidified update. A level in
/// median-convergence mode stops once the median is stable; tracking failures
/// at the finest level flag the result lost, coarser failures fall through.
IcpResult register_clouds(const CloudPyramid& source, const CloudPyramid& target,
                          const RigidTransformd& seed, const IcpConfig& config);

/// Numeric surrogate for visual failure inspection: lost tracking, rotation
/// error above rot_tol_deg, or translation error above trans_tol_m.
bool classify_failure(const IcpResult& result, const RigidTransformd& truth,
                      double rot_tol_deg = 5.0, double trans_tol_m = 0.05);

}  // namespace oicp
