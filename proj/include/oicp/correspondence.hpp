#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <vector>

#include "oicp/cloud.hpp"
#include "oicp/geometry.hpp"

namespace oicp {

/// One matched pair. `p` is the source point already mapped by the current
/// transform estimate (so it lives in the target frame); `q` and `n` come from
/// the target cloud; `distance` = |p - q|.
struct CorrespondencePair {
  Eigen::Vector3d p;
  Eigen::Vector3d q;
  Eigen::Vector3d n;
  double distance;
};

struct CorrespondenceSet {
  std::vector<CorrespondencePair> pairs;
  int source_frame = -1;
  int target_frame = -1;

  size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

struct NormalShootConfig {
  /// Reject pairs farther apart than this, and bound the march, meters.
  double max_dist = 0.5;
  /// March step along the source normal, meters.
  double step_len = 0.5 / 512.0;
  /// Maximum angle between the (transformed) source normal and the matched
  /// target normal, degrees. >= 180 disables the gate.
  double normal_gate_deg = 60.0;
};

/// Closest-point search by normal shooting: each valid source point is mapped
/// by `seed`, then samples are taken outward along its transformed normal
/// (s = 0, +step, -step, +2*step, ...) and projected into the target image;
/// the first valid target pixel within max_dist and inside the normal gate is
/// taken. Pairs are emitted in row-major source-pixel order. Throws
/// NoCorrespondences when nothing matches.
CorrespondenceSet normal_shoot(const OrganizedCloud& source, const OrganizedCloud& target,
                               const RigidTransformd& seed, const NormalShootConfig& config);

/// Fixed-bin histogram of pair distances over [0, d_max]; larger distances
/// land in `overflow`. `cdf` excludes the overflow count.
struct DistanceHistogram {
  double bin_width = 0.0;
  double d_max = 0.0;
  std::vector<std::uint64_t> bins;
  std::uint64_t overflow = 0;
  std::uint64_t total = 0;
  std::vector<std::uint64_t> cdf;

  double bin_center(size_t k) const { return (static_cast<double>(k) + 0.5) * bin_width; }
};

/// Histogram accumulation partitioned into `partitions` chunks merged in a
/// fixed order; counts are integers, so the result is bitwise independent of
/// the partitioning.
DistanceHistogram build_histogram(const CorrespondenceSet& c, double bin_width, double d_max,
                                  int partitions = 8);

/// Center of the first bin whose CDF reaches ceil(total/2); within one
/// bin_width of the exact sample median whenever the median mass is below
/// d_max. A median beyond d_max returns d_max + bin_width/2 (the open
/// overflow bucket). Throws EmptyHistogram when total = 0.
double median_from_cdf(const DistanceHistogram& h);

/// Median absolute deviation around `median`, estimated from the histogram at
/// bin resolution.
double mad_from_histogram(const DistanceHistogram& h, double median);

struct FilterResult {
  CorrespondenceSet kept;
  double kept_fraction = 0.0;
};

/// Keeps pairs with |distance - median| <= band. Throws AllPairsRejected when
/// nothing survives.
FilterResult median_filter(const CorrespondenceSet& c, double median, double band);

/// CSV dump `bin_lower,count`, one row per bin plus a final overflow row at
/// bin_lower = d_max.
void write_histogram_csv(const DistanceHistogram& h, const std::filesystem::path& path);

}  // namespace oicp
