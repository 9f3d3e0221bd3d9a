#pragma once

#include <Eigen/Geometry>

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "oicp/trajectory.hpp"

namespace oicp {

enum class OrientationSource { kGroundTruth, kSyntheticNoisy, kExternal };

struct OrientationSample {
  double timestamp = 0.0;
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
  OrientationSource source = OrientationSource::kExternal;
  bool gimbal_fallback = false;
};

/// Systematic orientation-error model: a repeatable, angle-dependent bias of
/// bounded amplitude per axis (sinusoid of the true Euler angle), plus an
/// optional zero-mean Gaussian term that defaults to off.
struct ImuNoiseModel {
  Eigen::Vector3d amplitude_deg{3.0, 3.0, 10.0};
  Eigen::Vector3d phase{0.0, 0.0, 0.0};
  int harmonics = 1;
  double random_sigma_deg = 0.0;

  static ImuNoiseModel with_seeded_phases(std::uint32_t seed) {
    ImuNoiseModel m;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);
    for (int i = 0; i < 3; ++i) m.phase[i] = uni(rng);
    return m;
  }

  bool is_zero() const {
    return amplitude_deg.isZero(0.0) && random_sigma_deg == 0.0;
  }
};

/// Perturbs a true orientation with the model's per-axis systematic error
/// (computed from its intrinsic-XYZ Euler angles and re-composed in the Euler
/// domain; near gimbal lock the error is applied about the world axes instead
/// and flagged). The total systematic perturbation is clamped to the
/// |amplitude| geodesic bound. Deterministic unless random_sigma_deg > 0 and
/// an RNG is supplied.
Eigen::Quaterniond apply_noise(const Eigen::Quaterniond& q_true, const ImuNoiseModel& model,
                               std::mt19937* rng = nullptr, bool* gimbal_fallback = nullptr);

/// One orientation sample per trajectory pose; noisy iff a model is given.
std::vector<OrientationSample> stream_from_trajectory(const Trajectory& trajectory,
                                                      const ImuNoiseModel* model,
                                                      std::uint32_t gaussian_seed = 0);

/// TUM-groundtruth-format export of a noisy orientation stream, translations
/// copied from the true trajectory.
void write_noisy_groundtruth(const Trajectory& truth, const ImuNoiseModel& model,
                             const std::filesystem::path& path, std::uint32_t gaussian_seed = 0);

}  // namespace oicp
