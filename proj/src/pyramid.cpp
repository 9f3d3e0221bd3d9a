#include "oicp/pyramid.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include "oicp/errors.hpp"

namespace oicp {

OrganizedCloud backproject(const DepthImage& depth) {
  if (!depth.intrinsics.valid()) {
    throw Error(ErrorCode::kBadIntrinsics, "focal lengths must be positive");
  }
  const auto& k = depth.intrinsics;
  OrganizedCloud cloud(depth.width, depth.height, k);
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      if (!depth.valid_at(u, v)) continue;
      const double d = depth.at(u, v);
      const size_t i = cloud.index(u, v);
      cloud.points[i] = Eigen::Vector3d(d * (u - k.cx) / k.fx, d * (v - k.cy) / k.fy, d);
      cloud.has_point[i] = 1;
    }
  }
  return cloud;
}

namespace {

// Summed-area tables with the usual (w+1) x (h+1) exclusive layout.
// The explicit zero matters: Eigen vectors do not zero-initialize.
template <typename T>
struct Integral {
  int width = 0, height = 0;
  T zero;
  std::vector<T> data;

  Integral(int w, int h, T z = T{})
      : width(w), height(h), zero(z), data((w + 1) * static_cast<size_t>(h + 1), z) {}

  T& at(int u, int v) { return data[static_cast<size_t>(v) * (width + 1) + u]; }
  const T& at(int u, int v) const { return data[static_cast<size_t>(v) * (width + 1) + u]; }

  template <typename F>
  void build(F&& value) {
    for (int v = 0; v < height; ++v) {
      T row = zero;
      for (int u = 0; u < width; ++u) {
        row += value(u, v);
        at(u + 1, v + 1) = at(u + 1, v) + row;
      }
    }
  }

  /// Inclusive rectangle [u0, u1] x [v0, v1].
  T sum(int u0, int v0, int u1, int v1) const {
    return at(u1 + 1, v1 + 1) - at(u0, v1 + 1) - at(u1 + 1, v0) + at(u0, v0);
  }
};

}  // namespace

void estimate_normals(OrganizedCloud& cloud, const NormalEstimationConfig& config) {
  const int w = cloud.width, h = cloud.height;
  const int hw = std::max(1, config.half_window);
  const int margin = hw + 1;
  std::fill(cloud.normals.begin(), cloud.normals.end(), Eigen::Vector3d::Zero());
  std::fill(cloud.has_normal.begin(), cloud.has_normal.end(), 0);
  if (2 * margin + 1 > w || 2 * margin + 1 > h) return;

  Integral<Eigen::Vector3d> sums(w, h, Eigen::Vector3d::Zero());
  sums.build([&](int u, int v) -> Eigen::Vector3d {
    const size_t i = cloud.index(u, v);
    return cloud.has_point[i] ? cloud.points[i] : Eigen::Vector3d::Zero();
  });
  Integral<std::int32_t> counts(w, h);
  counts.build([&](int u, int v) -> std::int32_t { return cloud.has_point[cloud.index(u, v)]; });

  // A pixel is flagged when the depth step to its right or lower neighbor
  // exceeds the discontinuity threshold.
  Integral<std::int32_t> flags(w, h);
  flags.build([&](int u, int v) -> std::int32_t {
    const size_t i = cloud.index(u, v);
    if (!cloud.has_point[i]) return 0;  // invalid pixels are caught by the count check
    const double z = cloud.points[i].z();
    if (u + 1 < w && cloud.has_point[i + 1] && std::abs(cloud.points[i + 1].z() - z) > config.disc_threshold)
      return 1;
    if (v + 1 < h && cloud.has_point[i + w] && std::abs(cloud.points[i + w].z() - z) > config.disc_threshold)
      return 1;
    return 0;
  });

  const int full = (2 * margin + 1) * (2 * margin + 1);
  for (int v = margin; v < h - margin; ++v) {
    for (int u = margin; u < w - margin; ++u) {
      const size_t i = cloud.index(u, v);
      if (!cloud.has_point[i]) continue;
      if (counts.sum(u - margin, v - margin, u + margin, v + margin) != full) continue;
      if (flags.sum(u - margin, v - margin, u + margin, v + margin) != 0) continue;

      const Eigen::Vector3d th = sums.sum(u + 1 - hw, v - hw, u + 1 + hw, v + hw) -
                                 sums.sum(u - 1 - hw, v - hw, u - 1 + hw, v + hw);
      const Eigen::Vector3d tv = sums.sum(u - hw, v + 1 - hw, u + hw, v + 1 + hw) -
                                 sums.sum(u - hw, v - 1 - hw, u + hw, v - 1 + hw);
      Eigen::Vector3d n = th.cross(tv);
      const double norm = n.norm();
      if (norm < 1e-12) continue;
      n /= norm;
      if (n.dot(cloud.points[i]) > 0.0) n = -n;
      cloud.normals[i] = n;
      cloud.has_normal[i] = 1;
    }
  }
}

DepthImage downsample_depth(const DepthImage& depth) {
  const int w2 = (depth.width + 1) / 2;
  const int h2 = (depth.height + 1) / 2;
  DepthImage out(w2, h2, depth.intrinsics.half(), depth.depth_max);
  for (int v = 0; v < h2; ++v) {
    for (int u = 0; u < w2; ++u) {
      std::array<double, 4> block;
      int n = 0;
      for (int dv = 0; dv < 2; ++dv) {
        for (int du = 0; du < 2; ++du) {
          const int su = 2 * u + du, sv = 2 * v + dv;
          if (su < depth.width && sv < depth.height && depth.valid_at(su, sv)) {
            block[n++] = depth.at(su, sv);
          }
        }
      }
      if (n == 0) continue;
      std::sort(block.begin(), block.begin() + n);
      out.at(u, v) = block[(n - 1) / 2];  // lower median: never invents a depth
    }
  }
  return out;
}

CloudPyramid build_pyramid(const DepthImage& depth, int levels, const NormalEstimationConfig& config) {
  if (levels < 1) throw Error(ErrorCode::kBadConfig, "pyramid needs at least one level");
  CloudPyramid pyramid;
  DepthImage current = depth;
  int hw = config.half_window;
  double disc = config.disc_threshold;
  for (int k = 0; k < levels; ++k) {
    if (k > 0) {
      current = downsample_depth(current);
      hw = std::max(1, (hw + 1) / 2);
      disc *= 2.0;  // pixel footprint doubles, keep the slope semantics
    }
    OrganizedCloud cloud = backproject(current);
    estimate_normals(cloud, NormalEstimationConfig{hw, disc});
    pyramid.levels.push_back(std::move(cloud));
  }
  return pyramid;
}

}  // namespace oicp
