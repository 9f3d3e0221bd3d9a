#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <filesystem>
#include <random>

#include "oicp/errors.hpp"
#include "oicp/icp.hpp"
#include "oicp/pyramid.hpp"
#include "oicp/scene.hpp"
#include "oicp/solver.hpp"
#include "oicp/trials.hpp"
#include "test_util.hpp"

using namespace oicp;
using namespace oicp::testutil;

namespace {

// Dense-sampled normal equations of a scene viewed from the origin: rank
// counts the observable degrees of freedom of a self-registration.
int scene_rank(const SceneSpec& scene) {
  const DepthImage depth = raycast_depth(scene, RigidTransformd::Identity(), kIntrinsics, 160, 120);
  OrganizedCloud cloud = backproject(depth);
  estimate_normals(cloud);
  CorrespondenceSet c;
  for (size_t i = 0; i < cloud.points.size(); ++i) {
    if (!cloud.has_normal[i]) continue;
    c.pairs.push_back({cloud.points[i], cloud.points[i], cloud.normals[i], 0.0});
  }
  const NormalEquations ne = build_normal_equations(c);
  Eigen::SelfAdjointEigenSolver<Matrix6d> es(ne.ata);
  int rank = 0;
  for (int i = 0; i < 6; ++i) {
    if (es.eigenvalues()[i] > 1e-9 * ne.ata.trace()) ++rank;
  }
  return rank;
}

}  // namespace

TEST_SUITE("scene") {

TEST_CASE("raycast of a fronto-parallel plane is constant depth") {
  SceneSpec s;
  s.name = "plane2m";
  s.planes.push_back({{0, 0, 2.0}, {0, 0, -1.0}, {3.0, 3.0}});
  const DepthImage img = raycast_depth(s, RigidTransformd::Identity(), kIntrinsics, 64, 48);
  for (int v = 0; v < 48; ++v) {
    for (int u = 0; u < 64; ++u) CHECK(img.at(u, v) == doctest::Approx(2.0).epsilon(1e-12));
  }

  RigidTransformd closer;
  closer.translation = Eigen::Vector3d(0, 0, 0.1);
  const DepthImage img2 = raycast_depth(s, closer, kIntrinsics, 64, 48);
  CHECK(img2.at(32, 24) == doctest::Approx(1.9).epsilon(1e-12));
}

TEST_CASE("raycast depth matches closed-form primitive intersections") {
  SceneSpec s;
  s.name = "oracle";
  s.planes.push_back({{0.3, 0.4, 2.5}, Eigen::Vector3d(0.2, -0.3, -1.0).normalized(), {2.0, 2.0}});
  s.boxes.push_back({{-0.3, 0.3, 1.6}, {0.25, 0.2, 0.3}});

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> angle(-0.2, 0.2);
  RigidTransformd pose;
  pose.rotation = rotation_from_euler_xyz(angle(rng), angle(rng), angle(rng));
  pose.translation = Eigen::Vector3d(0.05, -0.02, -0.1);
  const DepthImage img = raycast_depth(s, pose, kIntrinsics, 96, 72);

  for (int v = 0; v < 72; ++v) {
    for (int u = 0; u < 96; ++u) {
      const Eigen::Vector3d dir_cam((u - kIntrinsics.cx) / kIntrinsics.fx,
                                    (v - kIntrinsics.cy) / kIntrinsics.fy, 1.0);
      const Eigen::Vector3d o = pose.translation;
      const Eigen::Vector3d d = pose.rotation * dir_cam;

      // oracle: brute plane + slab intersection
      double best = std::numeric_limits<double>::infinity();
      {
        const auto& pl = s.planes[0];
        const double denom = d.dot(pl.normal);
        if (std::abs(denom) > 1e-12) {
          const double t = (pl.center - o).dot(pl.normal) / denom;
          if (t > 0 && t <= 6.0) {
            Eigen::Vector3d bu, bv;
            plane_basis(pl.normal, bu, bv);
            const Eigen::Vector3d local = o + t * d - pl.center;
            if (std::abs(local.dot(bu)) <= pl.half_extent.x() &&
                std::abs(local.dot(bv)) <= pl.half_extent.y()) {
              best = std::min(best, t);
            }
          }
        }
        const auto& bx = s.boxes[0];
        double t0 = 0.0, t1 = 6.0;
        bool hit = true;
        for (int axis = 0; axis < 3; ++axis) {
          const double lo = bx.center[axis] - bx.half_extents[axis];
          const double hi = bx.center[axis] + bx.half_extents[axis];
          if (std::abs(d[axis]) < 1e-12) {
            if (o[axis] < lo || o[axis] > hi) hit = false;
            continue;
          }
          double a = (lo - o[axis]) / d[axis], b = (hi - o[axis]) / d[axis];
          if (a > b) std::swap(a, b);
          t0 = std::max(t0, a);
          t1 = std::min(t1, b);
        }
        if (hit && t0 <= t1 && t0 > 0) best = std::min(best, t0);
      }

      if (std::isfinite(best)) {
        CHECK(std::abs(img.at(u, v) - best) <= 1e-9);
      } else {
        CHECK(img.at(u, v) == 0.0);
      }
    }
  }
}

TEST_CASE("raycast throws EmptyFrame when nothing is visible") {
  SceneSpec s;
  s.name = "behind";
  s.planes.push_back({{0, 0, -2.0}, {0, 0, -1.0}, {1.0, 1.0}});
  CHECK_THROWS_WITH_AS(raycast_depth(s, RigidTransformd::Identity(), kIntrinsics, 32, 24),
                       doctest::Contains("EmptyFrame"), Error);
}

TEST_CASE("builtin scenes expose the expected constraint ranks") {
  CHECK(scene_rank(builtin_scene("corner")) == 6);
  CHECK(scene_rank(builtin_scene("single_plane")) == 3);
  CHECK(scene_rank(builtin_scene("desk")) == 6);
  CHECK_THROWS_WITH_AS(builtin_scene("nope"), doctest::Contains("UnknownScene"), Error);
}

TEST_CASE("scene JSON round-trips") {
  const SceneSpec s = builtin_scene("desk");
  const auto path = std::filesystem::temp_directory_path() / "oicp_scene_test.json";
  save_scene(s, path);
  const SceneSpec back = load_scene(path);
  REQUIRE(back.planes.size() == s.planes.size());
  REQUIRE(back.boxes.size() == s.boxes.size());
  for (size_t i = 0; i < s.planes.size(); ++i) {
    CHECK((back.planes[i].center - s.planes[i].center).norm() <= 1e-12);
    CHECK((back.planes[i].normal - s.planes[i].normal).norm() <= 1e-12);
  }
  std::filesystem::remove(path);
}

TEST_CASE("scene validation rejects empty and non-positive specs") {
  SceneSpec empty;
  CHECK_THROWS_AS(empty.validate(), Error);
  SceneSpec bad;
  bad.planes.push_back({{0, 0, 2}, {0, 0, -1}, {0.0, 1.0}});
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("trial_generator honors the requested angle and is reproducible") {
  const SceneSpec scene = builtin_scene("corner");
  for (double angle : {5.0, 20.0, 45.0}) {
    const Trial t = trial_generator(scene, angle, 1234);
    CHECK(std::abs(geodesic_angle(t.truth.rotation, Eigen::Matrix3d::Identity()) -
                   angle * M_PI / 180.0) <= 1e-9);
    CHECK(t.truth.translation.minCoeff() >= 0.0);
    CHECK(t.truth.translation.maxCoeff() <= 0.05);
  }

  const Trial a = trial_generator(scene, 30.0, 99);
  const Trial b = trial_generator(scene, 30.0, 99);
  CHECK(a.truth.rotation == b.truth.rotation);
  CHECK(a.source.depths == b.source.depths);
  CHECK(a.target.depths == b.target.depths);

  CHECK_THROWS_AS(trial_generator(scene, 0.0, 1), Error);
}

TEST_CASE("seeded strongly-regularized registration nails the trial translation") {
  const SceneSpec scene = builtin_scene("corner");
  const Trial t = trial_generator(scene, 25.0, 17);
  const CloudPyramid source = bench_pyramid(t.source);
  const CloudPyramid target = bench_pyramid(t.target);
  IcpConfig cfg;
  cfg.regularizer.lambda = 1e6;
  cfg.solver_rcond = 1e-3;  // bench gate: bare-plane scenes, see trials.hpp
  RigidTransformd seed;
  seed.rotation = t.truth.rotation;
  const IcpResult result = register_clouds(source, target, seed, cfg);
  REQUIRE_FALSE(result.tracking_lost);
  CHECK((result.transform.translation - t.truth.translation).norm() < 5e-3);
}

TEST_CASE("orbit poses look at the target and step along the arc") {
  const Eigen::Vector3d center(0, 0, 2.5);
  const auto poses = orbit_poses(center, 2.5, 10, 30.0);
  REQUIRE(poses.size() == 10);
  CHECK((poses[0].translation - Eigen::Vector3d(0, 0, 0)).norm() <= 1e-12);
  for (const auto& pose : poses) {
    CHECK(std::abs((pose.translation - center).norm() - 2.5) <= 1e-9);
    const Eigen::Vector3d forward = pose.rotation.col(2);
    CHECK((forward - (center - pose.translation).normalized()).norm() <= 1e-9);
    CHECK(std::abs(pose.rotation.determinant() - 1.0) <= 1e-9);
  }
  const double step = geodesic_angle(poses[0].rotation, poses[1].rotation);
  CHECK(step == doctest::Approx(30.0 / 9 * M_PI / 180.0).epsilon(1e-6));
}

TEST_CASE("synth_sequence renders one frame per pose with exact ground truth") {
  const SceneSpec scene = builtin_scene("corner");
  const auto poses = orbit_poses({0, 0, 2.5}, 2.5, 4, 8.0);
  const SyntheticSequence seq = synth_sequence(scene, poses, kIntrinsics, 80, 60);
  REQUIRE(seq.frames.size() == 4);
  REQUIRE(seq.groundtruth.size() == 4);
  for (size_t i = 0; i < poses.size(); ++i) {
    CHECK((seq.groundtruth.entries[i].pose.rotation - poses[i].rotation).norm() == 0.0);
  }
  CHECK(seq.groundtruth.entries[1].timestamp > seq.groundtruth.entries[0].timestamp);
}

}  // TEST_SUITE
