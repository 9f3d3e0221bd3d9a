#include "oicp/trajectory.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <tuple>

#include "oicp/errors.hpp"

namespace oicp {

void Trajectory::normalize() {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const TrajectoryEntry& a, const TrajectoryEntry& b) {
                     return a.timestamp < b.timestamp;
                   });
  entries.erase(std::unique(entries.begin(), entries.end(),
                            [](const TrajectoryEntry& a, const TrajectoryEntry& b) {
                              return a.timestamp == b.timestamp;
                            }),
                entries.end());
}

void save_trajectory(const Trajectory& trajectory, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kParseError, "cannot open " + path.string() + " for writing");
  out << "# timestamp tx ty tz qx qy qz qw\n";
  char line[256];
  for (const auto& entry : trajectory.entries) {
    const Eigen::Quaterniond q(entry.pose.rotation);
    const Eigen::Vector3d& t = entry.pose.translation;
    std::snprintf(line, sizeof(line), "%.6f %.9f %.9f %.9f %.9f %.9f %.9f %.9f\n", entry.timestamp,
                  t.x(), t.y(), t.z(), q.x(), q.y(), q.z(), q.w());
    out << line;
  }
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open " + path.string());
  Trajectory trajectory;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    double ts, tx, ty, tz, qx, qy, qz, qw;
    if (!(ss >> ts >> tx >> ty >> tz >> qx >> qy >> qz >> qw)) {
      throw Error(ErrorCode::kParseError,
                  path.string() + ":" + std::to_string(line_no) + ": expected 8 fields");
    }
    Eigen::Quaterniond q(qw, qx, qy, qz);
    if (q.norm() < 1e-12) {
      throw Error(ErrorCode::kParseError,
                  path.string() + ":" + std::to_string(line_no) + ": zero quaternion");
    }
    q.normalize();
    trajectory.entries.push_back({ts, {q.toRotationMatrix(), Eigen::Vector3d(tx, ty, tz)}});
  }
  trajectory.normalize();
  return trajectory;
}

std::vector<std::pair<size_t, size_t>> associate_timestamps(const std::vector<double>& a,
                                                            const std::vector<double>& b,
                                                            double max_dt) {
  std::vector<std::tuple<double, size_t, size_t>> candidates;
  size_t lo = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    while (lo < b.size() && b[lo] < a[i] - max_dt) ++lo;
    for (size_t j = lo; j < b.size() && b[j] <= a[i] + max_dt; ++j) {
      candidates.emplace_back(std::abs(a[i] - b[j]), i, j);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  std::vector<char> used_a(a.size(), 0), used_b(b.size(), 0);
  std::vector<std::pair<size_t, size_t>> matches;
  for (const auto& [dt, i, j] : candidates) {
    if (used_a[i] || used_b[j]) continue;
    used_a[i] = used_b[j] = 1;
    matches.emplace_back(i, j);
  }
  std::sort(matches.begin(), matches.end());
  return matches;
}

}  // namespace oicp
