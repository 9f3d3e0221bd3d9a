#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "oicp/image.hpp"
#include "oicp/trajectory.hpp"

namespace oicp {

struct DepthFrameRef {
  double timestamp = 0.0;
  std::string file;  // relative to the sequence root
};

struct FrameAssociation {
  size_t depth_index;
  size_t truth_index;
  double dt;
};

/// Indexed TUM/Freiburg RGB-D sequence: depth frame list, ground-truth
/// trajectory and their nearest-timestamp associations. Depth PNGs decode
/// lazily via load_depth_png.
struct SequenceIndex {
  std::filesystem::path root;
  std::vector<DepthFrameRef> depth_frames;
  Trajectory groundtruth;
  std::vector<FrameAssociation> associations;
  PinholeIntrinsics intrinsics{525.0, 525.0, 319.5, 239.5};
  double depth_scale = 5000.0;  // raw units per meter
  double depth_max = 6.0;
};

/// Loads `depth.txt` (lines `timestamp filename`) and `groundtruth.txt`
/// (lines `timestamp tx ty tz qx qy qz qw`) from a sequence directory; `#`
/// comments are skipped. Throws MalformedSequence when either file is missing
/// or empty.
SequenceIndex load_tum_sequence(const std::filesystem::path& root, double max_dt = 0.02);

/// 16-bit single-channel PNG, meters = raw / scale, raw 0 = invalid.
DepthImage load_depth_png(const std::filesystem::path& path, const PinholeIntrinsics& intrinsics,
                          double scale = 5000.0, double depth_max = 6.0);

/// Encodes meters as round(d * scale) clamped to [0, 65535]; invalid writes 0.
void save_depth_png(const DepthImage& depth, const std::filesystem::path& path,
                    double scale = 5000.0);

}  // namespace oicp
