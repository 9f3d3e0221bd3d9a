#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "oicp/geometry.hpp"

namespace oicp {

struct TrajectoryEntry {
  double timestamp = 0.0;
  RigidTransformd pose;
};

/// Timestamped pose sequence, timestamps strictly increasing.
struct Trajectory {
  std::vector<TrajectoryEntry> entries;

  bool empty() const { return entries.empty(); }
  size_t size() const { return entries.size(); }

  /// Sorts by timestamp and drops exact duplicates so the ordering invariant
  /// holds regardless of input order.
  void normalize();
};

/// TUM text format: `timestamp tx ty tz qx qy qz qw`, one pose per line,
/// 6-decimal timestamps, `#` comments.
void save_trajectory(const Trajectory& trajectory, const std::filesystem::path& path);

/// Throws ParseError (with the line number) on malformed lines.
Trajectory load_trajectory(const std::filesystem::path& path);

/// Greedy nearest-timestamp matching within max_dt; each entry of either
/// sequence is used at most once. Both inputs must be sorted ascending.
/// Returns index pairs (i into a, j into b) ordered by i.
std::vector<std::pair<size_t, size_t>> associate_timestamps(const std::vector<double>& a,
                                                            const std::vector<double>& b,
                                                            double max_dt);

}  // namespace oicp
