#include "oicp/trials.hpp"

#include <cmath>
#include <random>

#include "oicp/errors.hpp"

namespace oicp {

Trial trial_generator(const SceneSpec& scene, double angle_deg, std::uint64_t seed,
                      const TrialOptions& options) {
  if (!(angle_deg > 0.0 && angle_deg < 90.0)) {
    throw Error(ErrorCode::kBadConfig, "trial angle must be in (0, 90) degrees");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_real_distribution<double> uni01(0.0, 1.0);

  Trial trial;
  trial.source = raycast_depth(scene, RigidTransformd::Identity(), options.intrinsics,
                               options.width, options.height, options.depth_max);

  const double angle = angle_deg * M_PI / 180.0;
  for (int attempt = 0; attempt < 10; ++attempt) {
    Eigen::Vector3d axis;
    if (options.axis_mode == TrialAxisMode::kPan) {
      axis = Eigen::Vector3d(0.0, -1.0, 0.0);  // camera up (y points down)
    } else {
      // Rotations near the optical axis (roll) barely change the acquired
      // view; the sweep probes view-changing shifts, so exclude that cone.
      do {
        axis = Eigen::Vector3d(uni(rng), uni(rng), uni(rng));
      } while (axis.norm() < 1e-3 || axis.norm() > 1.0 ||
               std::abs(axis.z()) > 0.8 * axis.norm());
      axis.normalize();
      if (axis.y() > 0.0) axis = -axis;  // upper hemisphere
    }
    Eigen::Vector3d t;
    for (int i = 0; i < 3; ++i) t[i] = options.translation_range * uni01(rng);

    trial.truth.rotation = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
    trial.truth.translation = t;
    try {
      trial.target = raycast_depth(scene, inverse(trial.truth), options.intrinsics,
                                   options.width, options.height, options.depth_max);
      return trial;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyFrame) throw;
    }
  }
  throw Error(ErrorCode::kEmptyFrame, "target view sees no geometry after 10 axis resamples");
}

std::vector<RigidTransformd> orbit_poses(const Eigen::Vector3d& look_at, double radius,
                                         int frames, double arc_deg) {
  std::vector<RigidTransformd> poses;
  poses.reserve(frames);
  const double arc = arc_deg * M_PI / 180.0;
  for (int i = 0; i < frames; ++i) {
    const double theta = frames > 1 ? arc * i / (frames - 1) : 0.0;
    const Eigen::Vector3d position =
        look_at + radius * Eigen::Vector3d(std::sin(theta), 0.0, -std::cos(theta));
    const Eigen::Vector3d forward = (look_at - position).normalized();
    Eigen::Vector3d right = Eigen::Vector3d(0.0, 1.0, 0.0).cross(forward).normalized();
    const Eigen::Vector3d down = forward.cross(right);
    RigidTransformd pose;
    pose.rotation.col(0) = right;
    pose.rotation.col(1) = down;
    pose.rotation.col(2) = forward;
    pose.translation = position;
    poses.push_back(pose);
  }
  return poses;
}

}  // namespace oicp
