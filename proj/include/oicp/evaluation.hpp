#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "oicp/geometry.hpp"
#include "oicp/trajectory.hpp"

namespace oicp {

/// Least-squares rigid alignment (no scale) of estimated positions onto the
/// ground truth over nearest-timestamp matches. Throws InsufficientOverlap
/// (< 3 matches) and DegenerateAlignment (collinear positions, or data whose
/// optimal orthogonal alignment is a reflection).
RigidTransformd align_umeyama(const Trajectory& est, const Trajectory& truth,
                              double max_dt = 0.02);

struct AteReport {
  double rmse = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double max = 0.0;
  RigidTransformd alignment;
  std::vector<double> errors;
};

/// Absolute trajectory error: rigid alignment, then RMSE of position
/// differences at matched timestamps.
AteReport ate(const Trajectory& est, const Trajectory& truth, double max_dt = 0.02);

struct RpeReport {
  double rmse = 0.0;
  int delta_frames = 1;
  std::vector<double> errors;
};

/// Relative pose error (translational part) over matched-pose intervals of
/// `delta_frames`: e_i = |trans((Q_i^-1 Q_{i+d})^-1 (P_i^-1 P_{i+d}))|.
RpeReport rpe(const Trajectory& est, const Trajectory& truth, int delta_frames = 1,
              double max_dt = 0.02);

struct ComparisonRow {
  std::string run;
  double ate_rmse = 0.0;
  double rpe_rmse = 0.0;
  /// Percentage improvement vs the baseline run; NaN renders as "n/a"
  /// (baseline metric of zero).
  double ate_improvement_pct = 0.0;
  double rpe_improvement_pct = 0.0;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;

  std::string to_csv() const;
  std::string render_text() const;
};

/// Per-run ATE/RPE plus improvement percentages against the first run (the
/// baseline): improvement = (1 - ours/baseline) * 100.
ComparisonReport compare_report(const std::vector<std::pair<std::string, Trajectory>>& runs,
                                const Trajectory& truth, int rpe_delta_frames = 1,
                                double max_dt = 0.02);

/// Top-down (x/z) SVG plot: ground truth in black, the aligned estimate in
/// blue, per-match difference segments in red.
void write_trajectory_svg(const Trajectory& est, const Trajectory& truth,
                          const std::filesystem::path& path, double max_dt = 0.02);

}  // namespace oicp
