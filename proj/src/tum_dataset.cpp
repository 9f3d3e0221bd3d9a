#include "oicp/tum_dataset.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "oicp/errors.hpp"

namespace oicp {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

DepthImage load_depth_png(const std::filesystem::path& path, const PinholeIntrinsics& intrinsics,
                          double scale, double depth_max) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw Error(ErrorCode::kParseError, "cannot open " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::kParseError, "libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::kParseError, "corrupt PNG: " + path.string());
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  if (bit_depth != 16 || color_type != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::kParseError,
                path.string() + ": expected 16-bit grayscale, got depth " +
                    std::to_string(bit_depth) + " color " + std::to_string(color_type));
  }

  std::vector<std::uint8_t> raw(static_cast<size_t>(width) * height * 2);
  std::vector<png_bytep> rows(height);
  for (png_uint_32 r = 0; r < height; ++r) rows[r] = raw.data() + static_cast<size_t>(r) * width * 2;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  DepthImage depth(static_cast<int>(width), static_cast<int>(height), intrinsics, depth_max);
  for (size_t i = 0; i < static_cast<size_t>(width) * height; ++i) {
    // PNG stores 16-bit samples big-endian; assemble explicitly.
    const unsigned value = (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
    depth.depths[i] = value == 0 ? 0.0 : static_cast<double>(value) / scale;
  }
  return depth;
}

void save_depth_png(const DepthImage& depth, const std::filesystem::path& path, double scale) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw Error(ErrorCode::kParseError, "cannot open " + path.string() + " for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kParseError, "libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kParseError, "PNG write failed: " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, depth.width, depth.height, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<std::uint8_t> row(static_cast<size_t>(depth.width) * 2);
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      const double d = depth.at(u, v);
      unsigned value = 0;
      if (std::isfinite(d) && d > 0.0) {
        value = static_cast<unsigned>(std::clamp(std::lround(d * scale), 0L, 65535L));
      }
      row[2 * u] = static_cast<std::uint8_t>(value >> 8);
      row[2 * u + 1] = static_cast<std::uint8_t>(value & 0xff);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

namespace {

std::vector<DepthFrameRef> parse_depth_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMalformedSequence, "missing " + path.string());
  std::vector<DepthFrameRef> frames;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    DepthFrameRef ref;
    if (!(ss >> ref.timestamp >> ref.file)) {
      throw Error(ErrorCode::kMalformedSequence,
                  path.string() + ":" + std::to_string(line_no) + ": expected `timestamp filename`");
    }
    frames.push_back(ref);
  }
  std::stable_sort(frames.begin(), frames.end(),
                   [](const DepthFrameRef& a, const DepthFrameRef& b) {
                     return a.timestamp < b.timestamp;
                   });
  return frames;
}

}  // namespace

SequenceIndex load_tum_sequence(const std::filesystem::path& root, double max_dt) {
  SequenceIndex index;
  index.root = root;
  index.depth_frames = parse_depth_list(root / "depth.txt");
  if (index.depth_frames.empty()) {
    throw Error(ErrorCode::kMalformedSequence, "depth.txt lists no frames");
  }
  try {
    index.groundtruth = load_trajectory(root / "groundtruth.txt");
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedSequence, e.what());
  }
  if (index.groundtruth.empty()) {
    throw Error(ErrorCode::kMalformedSequence, "groundtruth.txt lists no poses");
  }

  std::vector<double> ts_depth, ts_truth;
  for (const auto& f : index.depth_frames) ts_depth.push_back(f.timestamp);
  for (const auto& e : index.groundtruth.entries) ts_truth.push_back(e.timestamp);
  for (const auto& [i, j] : associate_timestamps(ts_depth, ts_truth, max_dt)) {
    index.associations.push_back({i, j, std::abs(ts_depth[i] - ts_truth[j])});
  }
  return index;
}

}  // namespace oicp
