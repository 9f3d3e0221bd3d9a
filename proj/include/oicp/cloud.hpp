#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "oicp/image.hpp"

namespace oicp {

/// Point cloud retaining the image grid: per-pixel points and unit normals in
/// the camera frame, with separate validity masks. A valid normal implies a
/// valid point; normals are oriented toward the camera (n.p <= 0).
struct OrganizedCloud {
  int width = 0;
  int height = 0;
  std::vector<Eigen::Vector3d> points;
  std::vector<Eigen::Vector3d> normals;
  std::vector<std::uint8_t> has_point;
  std::vector<std::uint8_t> has_normal;
  PinholeIntrinsics intrinsics;

  OrganizedCloud() = default;
  OrganizedCloud(int w, int h, const PinholeIntrinsics& k)
      : width(w),
        height(h),
        points(static_cast<size_t>(w) * h, Eigen::Vector3d::Zero()),
        normals(static_cast<size_t>(w) * h, Eigen::Vector3d::Zero()),
        has_point(static_cast<size_t>(w) * h, 0),
        has_normal(static_cast<size_t>(w) * h, 0),
        intrinsics(k) {}

  size_t index(int u, int v) const { return static_cast<size_t>(v) * width + u; }
  bool in_bounds(int u, int v) const { return u >= 0 && u < width && v >= 0 && v < height; }
};

/// Coarse-to-fine stack of organized clouds, finest first (level 0).
struct CloudPyramid {
  std::vector<OrganizedCloud> levels;

  int level_count() const { return static_cast<int>(levels.size()); }
  const OrganizedCloud& finest() const { return levels.front(); }
};

}  // namespace oicp
