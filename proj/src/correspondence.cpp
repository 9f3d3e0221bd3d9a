#include "oicp/correspondence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "oicp/errors.hpp"

namespace oicp {

namespace {

// Give up on a march direction after this many consecutive samples project
// outside the target image or behind the camera.
constexpr int kOffImagePatience = 64;

struct Marcher {
  bool alive = true;
  int off_image = 0;
  int last_pixel = -1;
};

}  // namespace

CorrespondenceSet normal_shoot(const OrganizedCloud& source, const OrganizedCloud& target,
                               const RigidTransformd& seed, const NormalShootConfig& config) {
  const auto& k = target.intrinsics;
  const double cos_gate = config.normal_gate_deg >= 180.0
                              ? -1.0
                              : std::cos(config.normal_gate_deg * M_PI / 180.0);
  const double step = std::max(config.step_len, 1e-6);
  const int max_steps = static_cast<int>(config.max_dist / step);

  CorrespondenceSet out;
  out.pairs.reserve(source.points.size() / 4);

  const size_t n_px = source.points.size();
  for (size_t i = 0; i < n_px; ++i) {
    if (!source.has_point[i] || !source.has_normal[i]) continue;
    const Eigen::Vector3d p = seed.rotation * source.points[i] + seed.translation;
    const Eigen::Vector3d dir = seed.rotation * source.normals[i];

    Marcher fwd, bwd;
    for (int s = 0; s <= max_steps && (fwd.alive || bwd.alive); ++s) {
      for (int sign = 0; sign < (s == 0 ? 1 : 2); ++sign) {
        Marcher& m = sign == 0 ? fwd : bwd;
        if (!m.alive) continue;
        const Eigen::Vector3d x = p + (sign == 0 ? s : -s) * step * dir;
        if (x.z() <= 1e-9) {
          if (++m.off_image > kOffImagePatience) m.alive = false;
          continue;
        }
        const int u = static_cast<int>(std::lround(k.fx * x.x() / x.z() + k.cx));
        const int v = static_cast<int>(std::lround(k.fy * x.y() / x.z() + k.cy));
        if (!target.in_bounds(u, v)) {
          if (++m.off_image > kOffImagePatience) m.alive = false;
          continue;
        }
        m.off_image = 0;
        const int pix = static_cast<int>(target.index(u, v));
        if (pix == m.last_pixel) continue;
        m.last_pixel = pix;
        if (!target.has_point[pix] || !target.has_normal[pix]) continue;
        const Eigen::Vector3d& q = target.points[pix];
        const double d = (p - q).norm();
        if (d > config.max_dist) continue;
        if (dir.dot(target.normals[pix]) < cos_gate) continue;
        out.pairs.push_back({p, q, target.normals[pix], d});
        fwd.alive = bwd.alive = false;
        break;
      }
    }
  }

  if (out.pairs.empty()) {
    throw Error(ErrorCode::kNoCorrespondences, "normal shooting found no matches");
  }
  return out;
}

DistanceHistogram build_histogram(const CorrespondenceSet& c, double bin_width, double d_max,
                                  int partitions) {
  if (!(bin_width > 0.0)) throw Error(ErrorCode::kBadConfig, "bin_width must be positive");
  const size_t n_bins = static_cast<size_t>(std::ceil(d_max / bin_width));
  partitions = std::max(1, partitions);

  DistanceHistogram h;
  h.bin_width = bin_width;
  h.d_max = d_max;
  h.bins.assign(n_bins, 0);

  const size_t n = c.pairs.size();
  const size_t chunk = (n + partitions - 1) / partitions;
  std::vector<DistanceHistogram> partial(partitions, h);
  for (int part = 0; part < partitions; ++part) {
    const size_t begin = part * chunk;
    const size_t end = std::min(n, begin + chunk);
    auto& ph = partial[part];
    for (size_t i = begin; i < end; ++i) {
      const double d = c.pairs[i].distance;
      size_t bin = static_cast<size_t>(d / bin_width);
      if (bin >= n_bins) {
        if (d <= d_max) {
          bin = n_bins - 1;
        } else {
          ++ph.overflow;
          ++ph.total;
          continue;
        }
      }
      ++ph.bins[bin];
      ++ph.total;
    }
  }
  for (const auto& ph : partial) {
    for (size_t b = 0; b < n_bins; ++b) h.bins[b] += ph.bins[b];
    h.overflow += ph.overflow;
    h.total += ph.total;
  }

  h.cdf.resize(n_bins);
  std::uint64_t run = 0;
  for (size_t b = 0; b < n_bins; ++b) {
    run += h.bins[b];
    h.cdf[b] = run;
  }
  return h;
}

double median_from_cdf(const DistanceHistogram& h) {
  if (h.total == 0) throw Error(ErrorCode::kEmptyHistogram, "no distances accumulated");
  const std::uint64_t half = (h.total + 1) / 2;
  for (size_t b = 0; b < h.cdf.size(); ++b) {
    if (h.cdf[b] >= half) return h.bin_center(b);
  }
  return h.d_max + 0.5 * h.bin_width;  // median mass sits in the overflow bucket
}

double mad_from_histogram(const DistanceHistogram& h, double median) {
  if (h.total == 0) throw Error(ErrorCode::kEmptyHistogram, "no distances accumulated");
  const std::uint64_t half = (h.total + 1) / 2;
  const size_t n_bins = h.bins.size();
  const double center_bin = median / h.bin_width - 0.5;
  // Walk bins outward from the median by increasing |center - median|.
  std::vector<size_t> order(n_bins);
  for (size_t b = 0; b < n_bins; ++b) order[b] = b;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    const double da = std::abs(static_cast<double>(a) - center_bin);
    const double db = std::abs(static_cast<double>(b) - center_bin);
    return da != db ? da < db : a < b;
  });
  std::uint64_t run = 0;
  for (size_t b : order) {
    run += h.bins[b];
    if (run >= half) return std::abs(h.bin_center(b) - median);
  }
  return h.d_max + 0.5 * h.bin_width - median;
}

FilterResult median_filter(const CorrespondenceSet& c, double median, double band) {
  if (!(band > 0.0)) throw Error(ErrorCode::kBadConfig, "band must be positive");
  FilterResult r;
  r.kept.source_frame = c.source_frame;
  r.kept.target_frame = c.target_frame;
  r.kept.pairs.reserve(c.pairs.size());
  for (const auto& pair : c.pairs) {
    if (std::abs(pair.distance - median) <= band) r.kept.pairs.push_back(pair);
  }
  if (r.kept.pairs.empty()) {
    throw Error(ErrorCode::kAllPairsRejected, "median filter removed every pair");
  }
  r.kept_fraction = static_cast<double>(r.kept.pairs.size()) / static_cast<double>(c.pairs.size());
  return r;
}

void write_histogram_csv(const DistanceHistogram& h, const std::filesystem::path& path) {
  std::ofstream out(path);
  out << "bin_lower,count\n";
  char line[64];
  for (size_t b = 0; b < h.bins.size(); ++b) {
    std::snprintf(line, sizeof(line), "%.9f,%llu\n", b * h.bin_width,
                  static_cast<unsigned long long>(h.bins[b]));
    out << line;
  }
  std::snprintf(line, sizeof(line), "%.9f,%llu\n", h.d_max,
                static_cast<unsigned long long>(h.overflow));
  out << line;
}

}  // namespace oicp
