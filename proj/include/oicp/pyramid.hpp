#pragma once

#include "oicp/cloud.hpp"
#include "oicp/image.hpp"

namespace oicp {

struct NormalEstimationConfig {
  /// Smoothing window half-size in pixels at the finest level; halved (and
  /// floored at 1) per coarser level.
  int half_window = 5;
  /// Depth step between neighboring pixels above which the surface is treated
  /// as discontinuous and no normal is estimated across it, meters.
  double disc_threshold = 0.05;
};

/// Pinhole back-projection; fills points only. Throws BadIntrinsics.
OrganizedCloud backproject(const DepthImage& depth);

/// Integral-image normal estimation: window-averaged horizontal/vertical
/// tangents, normal = normalize(cross(t_h, t_v)), oriented toward the camera.
/// Pixels whose (expanded) window leaves the image, contains an invalid point
/// or crosses a depth discontinuity get no normal.
void estimate_normals(OrganizedCloud& cloud, const NormalEstimationConfig& config = {});

/// 2x2 subsampling that takes the median of the valid depths in each block,
/// so coarse levels never average across discontinuities.
DepthImage downsample_depth(const DepthImage& depth);

/// Builds `levels` organized clouds with normals, finest first.
CloudPyramid build_pyramid(const DepthImage& depth, int levels,
                           const NormalEstimationConfig& config = {});

}  // namespace oicp
