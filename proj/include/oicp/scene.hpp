#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

#include "oicp/geometry.hpp"
#include "oicp/image.hpp"
#include "oicp/trajectory.hpp"

namespace oicp {

/// Finite rectangular patch: center, unit normal and half extents along a
/// deterministically derived in-plane tangent basis.
struct PlanePrimitive {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  Eigen::Vector2d half_extent{1.0, 1.0};
};

/// Axis-aligned box.
struct BoxPrimitive {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d half_extents{0.5, 0.5, 0.5};
};

/// Declarative analytic scene: planes + boxes in world coordinates.
/// World frame convention follows the camera at identity: x right, y down,
/// z forward (so "floor" planes sit at positive y).
struct SceneSpec {
  std::string name;
  std::vector<PlanePrimitive> planes;
  std::vector<BoxPrimitive> boxes;

  void validate() const;  // at least one primitive, positive extents
};

/// In-plane tangent basis for a plane normal, deterministic in the normal.
void plane_basis(const Eigen::Vector3d& normal, Eigen::Vector3d& u, Eigen::Vector3d& v);

/// Built-in scenes: `corner` (three orthogonal planes, constrains all six
/// degrees of freedom), `desk` (ground plane plus two boxes), `single_plane`
/// (degenerate: in-plane motion unobservable), `disjoint` (bounded corner plus
/// detached side panels arranged so two views 60 degrees apart share no
/// surface). Throws UnknownScene.
SceneSpec builtin_scene(const std::string& name);
std::vector<std::string> builtin_scene_names();

/// Closest-hit ray cast of the scene from a camera pose (camera-to-world).
/// Depth is the camera-frame z of the hit. Throws EmptyFrame when no pixel
/// hits any primitive.
DepthImage raycast_depth(const SceneSpec& scene, const RigidTransformd& camera_pose,
                         const PinholeIntrinsics& intrinsics, int width, int height,
                         double depth_max = 6.0);

/// Smallest positive ray parameter t with origin + t*dir on a primitive, or
/// +inf. `dir` need not be normalized (depth users pass camera-frame rays with
/// dir.z = 1 so t equals the depth).
double raycast_ray(const SceneSpec& scene, const Eigen::Vector3d& origin,
                   const Eigen::Vector3d& dir, double t_max);

struct SyntheticSequence {
  std::vector<DepthImage> frames;
  Trajectory groundtruth;
};

/// Renders one depth frame per pose; ground truth carries the poses at
/// timestamps i*dt. Throws EmptyFrame when a pose sees no geometry.
SyntheticSequence synth_sequence(const SceneSpec& scene, const std::vector<RigidTransformd>& motion,
                                 const PinholeIntrinsics& intrinsics, int width, int height,
                                 double dt = 1.0 / 30.0, double depth_max = 6.0);

/// JSON scene files (schema documented in the README).
SceneSpec load_scene(const std::filesystem::path& path);
void save_scene(const SceneSpec& scene, const std::filesystem::path& path);

}  // namespace oicp
