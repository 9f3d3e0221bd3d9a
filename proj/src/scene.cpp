#include "oicp/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "oicp/errors.hpp"

namespace oicp {

void SceneSpec::validate() const {
  if (planes.empty() && boxes.empty()) {
    throw Error(ErrorCode::kBadConfig, "scene '" + name + "' has no primitives");
  }
  for (const auto& p : planes) {
    if (!(p.half_extent.minCoeff() > 0.0)) {
      throw Error(ErrorCode::kBadConfig, "plane extents must be positive");
    }
  }
  for (const auto& b : boxes) {
    if (!(b.half_extents.minCoeff() > 0.0)) {
      throw Error(ErrorCode::kBadConfig, "box extents must be positive");
    }
  }
}

void plane_basis(const Eigen::Vector3d& normal, Eigen::Vector3d& u, Eigen::Vector3d& v) {
  const Eigen::Vector3d n = normal.normalized();
  int smallest = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(n[i]) < std::abs(n[smallest])) smallest = i;
  }
  u = n.cross(Eigen::Vector3d::Unit(smallest)).normalized();
  v = n.cross(u);
}

namespace {

double ray_plane(const PlanePrimitive& plane, const Eigen::Vector3d& o, const Eigen::Vector3d& d,
                 double t_max) {
  const Eigen::Vector3d n = plane.normal.normalized();
  const double denom = d.dot(n);
  if (std::abs(denom) < 1e-12) return std::numeric_limits<double>::infinity();
  const double t = (plane.center - o).dot(n) / denom;
  if (t <= 0.0 || t > t_max) return std::numeric_limits<double>::infinity();
  Eigen::Vector3d u, v;
  plane_basis(plane.normal, u, v);
  const Eigen::Vector3d local = o + t * d - plane.center;
  if (std::abs(local.dot(u)) > plane.half_extent.x() || std::abs(local.dot(v)) > plane.half_extent.y()) {
    return std::numeric_limits<double>::infinity();
  }
  return t;
}

double ray_box(const BoxPrimitive& box, const Eigen::Vector3d& o, const Eigen::Vector3d& d,
               double t_max) {
  double t_enter = 0.0, t_exit = t_max;
  for (int axis = 0; axis < 3; ++axis) {
    const double lo = box.center[axis] - box.half_extents[axis];
    const double hi = box.center[axis] + box.half_extents[axis];
    if (std::abs(d[axis]) < 1e-12) {
      if (o[axis] < lo || o[axis] > hi) return std::numeric_limits<double>::infinity();
      continue;
    }
    double t0 = (lo - o[axis]) / d[axis];
    double t1 = (hi - o[axis]) / d[axis];
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
    if (t_enter > t_exit) return std::numeric_limits<double>::infinity();
  }
  // Entering hit only; a camera inside the box sees nothing of it.
  return t_enter > 0.0 ? t_enter : std::numeric_limits<double>::infinity();
}

}  // namespace

double raycast_ray(const SceneSpec& scene, const Eigen::Vector3d& origin,
                   const Eigen::Vector3d& dir, double t_max) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& plane : scene.planes) {
    best = std::min(best, ray_plane(plane, origin, dir, t_max));
  }
  for (const auto& box : scene.boxes) {
    best = std::min(best, ray_box(box, origin, dir, t_max));
  }
  return best;
}

DepthImage raycast_depth(const SceneSpec& scene, const RigidTransformd& camera_pose,
                         const PinholeIntrinsics& intrinsics, int width, int height,
                         double depth_max) {
  scene.validate();
  DepthImage depth(width, height, intrinsics, depth_max);
  const Eigen::Vector3d origin = camera_pose.translation;
  size_t hits = 0;
  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) {
      // Camera-frame ray with unit z, so the ray parameter is the depth.
      const Eigen::Vector3d dir_cam((u - intrinsics.cx) / intrinsics.fx,
                                    (v - intrinsics.cy) / intrinsics.fy, 1.0);
      const double t = raycast_ray(scene, origin, camera_pose.rotation * dir_cam, depth_max);
      if (std::isfinite(t)) {
        depth.at(u, v) = t;
        ++hits;
      }
    }
  }
  if (hits == 0) throw Error(ErrorCode::kEmptyFrame, "pose sees no scene geometry");
  return depth;
}

SyntheticSequence synth_sequence(const SceneSpec& scene, const std::vector<RigidTransformd>& motion,
                                 const PinholeIntrinsics& intrinsics, int width, int height,
                                 double dt, double depth_max) {
  SyntheticSequence seq;
  seq.frames.reserve(motion.size());
  for (size_t i = 0; i < motion.size(); ++i) {
    seq.frames.push_back(raycast_depth(scene, motion[i], intrinsics, width, height, depth_max));
    seq.groundtruth.entries.push_back({static_cast<double>(i) * dt, motion[i]});
  }
  return seq;
}

SceneSpec builtin_scene(const std::string& name) {
  SceneSpec s;
  s.name = name;
  if (name == "corner") {
    // Room corner ahead and slightly off to the lower right: back wall, right
    // wall, floor. Generous extents keep all three orientations visible over
    // wide view changes.
    s.planes.push_back({{0.0, 0.0, 3.0}, {0.0, 0.0, -1.0}, {3.5, 3.5}});
    s.planes.push_back({{0.8, 0.0, 2.0}, {-1.0, 0.0, 0.0}, {3.0, 3.0}});
    s.planes.push_back({{0.0, 0.55, 2.0}, {0.0, -1.0, 0.0}, {3.0, 3.0}});
  } else if (name == "desk") {
    s.planes.push_back({{0.0, 0.85, 2.4}, {0.0, -1.0, 0.0}, {2.2, 2.2}});
    s.boxes.push_back({{-0.55, 0.5, 1.9}, {0.32, 0.35, 0.3}});
    s.boxes.push_back({{0.62, 0.58, 2.4}, {0.28, 0.26, 0.26}});
  } else if (name == "single_plane") {
    s.planes.push_back({{0.0, 0.0, 2.0}, {0.0, 0.0, -1.0}, {2.0, 2.0}});
  } else if (name == "disjoint") {
    // Bounded corner visible only near the optical axis, plus detached tilted
    // panels off to each side. A 60-degree pan sees a panel and none of the
    // corner; the panels are offset and tilted so no surface is shared.
    s.planes.push_back({{0.0, 0.0, 2.6}, {0.0, 0.0, -1.0}, {0.9, 0.9}});
    s.planes.push_back({{0.85, 0.0, 2.1}, {-1.0, 0.0, 0.0}, {0.5, 0.9}});
    s.planes.push_back({{0.0, 0.75, 2.1}, {0.0, -1.0, 0.0}, {0.9, 0.5}});
    const Eigen::Vector3d left_n = Eigen::Vector3d(2.2, -0.4, -1.6).normalized();
    const Eigen::Vector3d right_n = Eigen::Vector3d(-2.2, -0.4, -1.6).normalized();
    s.planes.push_back({{-2.9, 0.0, 1.9}, left_n, {1.6, 1.6}});
    s.planes.push_back({{2.9, 0.0, 1.9}, right_n, {1.6, 1.6}});
  } else {
    throw Error(ErrorCode::kUnknownScene, "no builtin scene named '" + name + "'");
  }
  return s;
}

std::vector<std::string> builtin_scene_names() {
  return {"corner", "desk", "single_plane", "disjoint"};
}

namespace {

Eigen::Vector3d vec3_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorCode::kParseError, "expected a 3-element array");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

SceneSpec load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  SceneSpec s;
  s.name = j.value("name", path.stem().string());
  for (const auto& p : j.value("planes", nlohmann::json::array())) {
    PlanePrimitive plane;
    plane.center = vec3_from_json(p.at("center"));
    plane.normal = vec3_from_json(p.at("normal")).normalized();
    const auto& e = p.at("half_extent");
    plane.half_extent = {e[0].get<double>(), e[1].get<double>()};
    s.planes.push_back(plane);
  }
  for (const auto& b : j.value("boxes", nlohmann::json::array())) {
    BoxPrimitive box;
    box.center = vec3_from_json(b.at("center"));
    box.half_extents = vec3_from_json(b.at("half_extents"));
    s.boxes.push_back(box);
  }
  s.validate();
  return s;
}

void save_scene(const SceneSpec& scene, const std::filesystem::path& path) {
  nlohmann::json j;
  j["name"] = scene.name;
  j["planes"] = nlohmann::json::array();
  for (const auto& p : scene.planes) {
    j["planes"].push_back({{"center", {p.center.x(), p.center.y(), p.center.z()}},
                           {"normal", {p.normal.x(), p.normal.y(), p.normal.z()}},
                           {"half_extent", {p.half_extent.x(), p.half_extent.y()}}});
  }
  j["boxes"] = nlohmann::json::array();
  for (const auto& b : scene.boxes) {
    j["boxes"].push_back({{"center", {b.center.x(), b.center.y(), b.center.z()}},
                          {"half_extents", {b.half_extents.x(), b.half_extents.y(), b.half_extents.z()}}});
  }
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

}  // namespace oicp
