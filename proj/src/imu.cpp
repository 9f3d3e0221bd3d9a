#include "oicp/imu.hpp"

#include <cmath>

#include "oicp/errors.hpp"

namespace oicp {

Eigen::Quaterniond apply_noise(const Eigen::Quaterniond& q_true, const ImuNoiseModel& model,
                               std::mt19937* rng, bool* gimbal_fallback) {
  if (gimbal_fallback) *gimbal_fallback = false;
  const Eigen::Quaterniond q = q_true.normalized();
  if (model.is_zero()) return q;

  const Eigen::Matrix3d r = q.toRotationMatrix();
  const EulerXyz<double> euler = euler_xyz(r);
  const Eigen::Vector3d amp = model.amplitude_deg * M_PI / 180.0;
  const Eigen::Vector3d angles(euler.alpha, euler.beta, euler.gamma);
  Eigen::Vector3d err;
  for (int i = 0; i < 3; ++i) {
    err[i] = amp[i] * std::sin(model.harmonics * angles[i] + model.phase[i]);
  }

  Eigen::Matrix3d noisy;
  if (euler.gimbal_adjacent) {
    if (gimbal_fallback) *gimbal_fallback = true;
    noisy = rotation_from_euler_xyz(err.x(), err.y(), err.z()) * r;
  } else {
    noisy = rotation_from_euler_xyz(angles.x() + err.x(), angles.y() + err.y(),
                                    angles.z() + err.z());
  }

  // Euler-domain recomposition can overshoot the per-axis amplitudes by a few
  // percent in geodesic terms; clamp the total perturbation to |amp|.
  const double bound = amp.norm();
  Eigen::AngleAxisd perturbation(noisy * r.transpose());
  if (perturbation.angle() > bound) {
    perturbation.angle() = bound;
    noisy = perturbation.toRotationMatrix() * r;
  }

  if (model.random_sigma_deg > 0.0 && rng != nullptr) {
    std::normal_distribution<double> gauss(0.0, model.random_sigma_deg * M_PI / 180.0);
    const Eigen::Vector3d g(gauss(*rng), gauss(*rng), gauss(*rng));
    const double angle = g.norm();
    if (angle > 0.0) {
      noisy = Eigen::AngleAxisd(angle, g / angle).toRotationMatrix() * noisy;
    }
  }

  return Eigen::Quaterniond(noisy).normalized();
}

std::vector<OrientationSample> stream_from_trajectory(const Trajectory& trajectory,
                                                      const ImuNoiseModel* model,
                                                      std::uint32_t gaussian_seed) {
  if (trajectory.empty()) throw Error(ErrorCode::kBadConfig, "trajectory is empty");
  std::vector<OrientationSample> samples;
  samples.reserve(trajectory.size());
  std::mt19937 rng(gaussian_seed);
  for (const auto& entry : trajectory.entries) {
    OrientationSample s;
    s.timestamp = entry.timestamp;
    const Eigen::Quaterniond q(entry.pose.rotation);
    if (model != nullptr) {
      s.q = apply_noise(q, *model, &rng, &s.gimbal_fallback);
      s.source = OrientationSource::kSyntheticNoisy;
    } else {
      s.q = q.normalized();
      s.source = OrientationSource::kGroundTruth;
    }
    samples.push_back(s);
  }
  return samples;
}

void write_noisy_groundtruth(const Trajectory& truth, const ImuNoiseModel& model,
                             const std::filesystem::path& path, std::uint32_t gaussian_seed) {
  const auto samples = stream_from_trajectory(truth, &model, gaussian_seed);
  Trajectory noisy = truth;
  for (size_t i = 0; i < noisy.entries.size(); ++i) {
    noisy.entries[i].pose.rotation = samples[i].q.toRotationMatrix();
  }
  save_trajectory(noisy, path);
}

}  // namespace oicp
