#pragma once

#include <cmath>
#include <vector>

namespace oicp {

/// Pinhole camera intrinsics in pixels.
struct PinholeIntrinsics {
  double fx = 525.0;
  double fy = 525.0;
  double cx = 319.5;
  double cy = 239.5;

  /// Intrinsics of the half-resolution image (pixel-center convention).
  PinholeIntrinsics half() const {
    return {fx / 2.0, fy / 2.0, (cx + 0.5) / 2.0 - 0.5, (cy + 0.5) / 2.0 - 0.5};
  }

  bool valid() const { return fx > 0.0 && fy > 0.0; }
};

/// Row-major depth image in meters. 0 or NaN marks an invalid measurement.
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<double> depths;
  PinholeIntrinsics intrinsics;
  double depth_max = 6.0;

  DepthImage() = default;
  DepthImage(int w, int h, const PinholeIntrinsics& k, double dmax = 6.0)
      : width(w), height(h), depths(static_cast<size_t>(w) * h, 0.0), intrinsics(k), depth_max(dmax) {}

  double at(int u, int v) const { return depths[static_cast<size_t>(v) * width + u]; }
  double& at(int u, int v) { return depths[static_cast<size_t>(v) * width + u]; }

  bool valid_at(int u, int v) const {
    const double d = at(u, v);
    return std::isfinite(d) && d > 0.0 && d <= depth_max;
  }
};

}  // namespace oicp
