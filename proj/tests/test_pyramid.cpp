#include <doctest.h>

#include <cmath>
#include <random>

#include "oicp/errors.hpp"
#include "oicp/pyramid.hpp"

using namespace oicp;

namespace {

const PinholeIntrinsics kIntrinsics{131.25, 131.25, 79.5, 59.5};

DepthImage constant_depth(int w, int h, double d) {
  DepthImage img(w, h, kIntrinsics);
  std::fill(img.depths.begin(), img.depths.end(), d);
  return img;
}

// Plane n.x = offset rendered through the pinhole model: depth is the z of the
// ray/plane intersection.
DepthImage plane_depth(int w, int h, const Eigen::Vector3d& n, double offset) {
  DepthImage img(w, h, kIntrinsics);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const Eigen::Vector3d dir((u - kIntrinsics.cx) / kIntrinsics.fx,
                                (v - kIntrinsics.cy) / kIntrinsics.fy, 1.0);
      const double denom = dir.dot(n);
      if (std::abs(denom) > 1e-9) {
        const double t = offset / denom;
        if (t > 0) img.at(u, v) = t;
      }
    }
  }
  return img;
}

}  // namespace

TEST_SUITE("pyramid") {

TEST_CASE("backproject maps the principal point to the optical axis") {
  DepthImage img(160, 120, kIntrinsics);
  img.at(79, 59) = 1.0;  // not exactly the principal point (cx=79.5)
  img.at(80, 60) = 2.0;
  OrganizedCloud cloud = backproject(img);
  // pixel (cx, cy) is between samples; check the pinhole formula instead
  CHECK((cloud.points[cloud.index(79, 59)] -
         Eigen::Vector3d((79 - 79.5) / 131.25, (59 - 59.5) / 131.25, 1.0))
            .norm() <= 1e-12);
  CHECK(cloud.has_point[cloud.index(79, 59)] == 1);
  CHECK(cloud.has_point[cloud.index(0, 0)] == 0);  // depth 0 is invalid
}

TEST_CASE("backproject round-trips through the forward projection") {
  std::mt19937 rng(21);
  std::uniform_int_distribution<int> du(0, 159), dv(0, 119);
  std::uniform_real_distribution<double> dd(0.3, 5.5);
  DepthImage img(160, 120, kIntrinsics);
  for (int i = 0; i < 500; ++i) img.at(du(rng), dv(rng)) = dd(rng);
  OrganizedCloud cloud = backproject(img);
  for (int v = 0; v < img.height; ++v) {
    for (int u = 0; u < img.width; ++u) {
      if (!cloud.has_point[cloud.index(u, v)]) continue;
      const Eigen::Vector3d& p = cloud.points[cloud.index(u, v)];
      CHECK(std::abs(kIntrinsics.fx * p.x() / p.z() + kIntrinsics.cx - u) <= 1e-9);
      CHECK(std::abs(kIntrinsics.fy * p.y() / p.z() + kIntrinsics.cy - v) <= 1e-9);
      CHECK(std::abs(p.z() - img.at(u, v)) <= 1e-12);
    }
  }
}

TEST_CASE("backproject rejects bad intrinsics") {
  DepthImage img(8, 8, {0.0, 1.0, 3.5, 3.5});
  CHECK_THROWS_WITH_AS(backproject(img), doctest::Contains("BadIntrinsics"), Error);
}

TEST_CASE("fronto-parallel plane yields -z normals in the interior") {
  OrganizedCloud cloud = backproject(constant_depth(80, 60, 2.0));
  estimate_normals(cloud);
  int checked = 0;
  for (int v = 10; v < 50; ++v) {
    for (int u = 10; u < 70; ++u) {
      REQUIRE(cloud.has_normal[cloud.index(u, v)] == 1);
      CHECK((cloud.normals[cloud.index(u, v)] - Eigen::Vector3d(0, 0, -1)).norm() <= 1e-6);
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("slanted plane normals match the analytic normal within 1 degree") {
  // 45-degree ramp: plane with normal (1,0,1)/sqrt(2)
  const Eigen::Vector3d n = Eigen::Vector3d(1, 0, 1).normalized();
  OrganizedCloud cloud = backproject(plane_depth(120, 90, n, 2.0));
  estimate_normals(cloud);
  int checked = 0;
  for (int v = 20; v < 70; v += 5) {
    for (int u = 20; u < 100; u += 5) {
      if (!cloud.has_normal[cloud.index(u, v)]) continue;
      const double angle = std::acos(std::abs(cloud.normals[cloud.index(u, v)].dot(n)));
      CHECK(angle <= 1.0 * M_PI / 180.0);
      ++checked;
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("normals are camera-facing and masked at discontinuities") {
  DepthImage img = constant_depth(80, 60, 2.0);
  for (int v = 0; v < 60; ++v) {
    for (int u = 40; u < 80; ++u) img.at(u, v) = 3.0;  // 1 m step at u=40
  }
  OrganizedCloud cloud = backproject(img);
  estimate_normals(cloud);
  for (int v = 10; v < 50; ++v) {
    CHECK(cloud.has_normal[cloud.index(39, v)] == 0);
    CHECK(cloud.has_normal[cloud.index(40, v)] == 0);
  }
  for (size_t i = 0; i < cloud.points.size(); ++i) {
    if (cloud.has_normal[i]) {
      CHECK(cloud.normals[i].dot(cloud.points[i]) <= 0.0);
      CHECK(std::abs(cloud.normals[i].norm() - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("pyramid levels halve with ceil and keep constant scenes constant") {
  DepthImage img = constant_depth(640, 480, 1.5);
  CloudPyramid pyr = build_pyramid(img, 3);
  REQUIRE(pyr.level_count() == 3);
  CHECK(pyr.levels[0].width == 640);
  CHECK(pyr.levels[0].height == 480);
  CHECK(pyr.levels[1].width == 320);
  CHECK(pyr.levels[1].height == 240);
  CHECK(pyr.levels[2].width == 160);
  CHECK(pyr.levels[2].height == 120);
  for (const auto& level : pyr.levels) {
    for (size_t i = 0; i < level.points.size(); ++i) {
      if (level.has_point[i]) CHECK(level.points[i].z() == 1.5);
    }
  }
}

TEST_CASE("coarse plane normals agree with fine normals within 2 degrees") {
  const Eigen::Vector3d n = Eigen::Vector3d(0.3, -0.2, 1.0).normalized();
  CloudPyramid pyr = build_pyramid(plane_depth(160, 120, n, 2.0), 3);
  const auto& fine = pyr.levels[0];
  const auto& coarse = pyr.levels[2];
  const Eigen::Vector3d fine_n = fine.normals[fine.index(80, 60)];
  REQUIRE(fine.has_normal[fine.index(80, 60)] == 1);
  int checked = 0;
  for (int v = 8; v < coarse.height - 8; v += 3) {
    for (int u = 8; u < coarse.width - 8; u += 3) {
      if (!coarse.has_normal[coarse.index(u, v)]) continue;
      const double angle = std::acos(std::min(1.0, std::abs(coarse.normals[coarse.index(u, v)].dot(fine_n))));
      CHECK(angle <= 2.0 * M_PI / 180.0);
      ++checked;
    }
  }
  CHECK(checked > 30);
}

TEST_CASE("pyramid validity is monotone: coarse valid implies a valid child") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  DepthImage img = constant_depth(64, 48, 2.0);
  for (auto& d : img.depths) {
    if (coin(rng) < 0.35) d = 0.0;
  }
  CloudPyramid pyr = build_pyramid(img, 3);
  for (int k = 1; k < 3; ++k) {
    const auto& coarse = pyr.levels[k];
    const auto& fine = pyr.levels[k - 1];
    for (int v = 0; v < coarse.height; ++v) {
      for (int u = 0; u < coarse.width; ++u) {
        if (!coarse.has_point[coarse.index(u, v)]) continue;
        bool any_child = false;
        for (int dv = 0; dv < 2; ++dv) {
          for (int du = 0; du < 2; ++du) {
            const int fu = 2 * u + du, fv = 2 * v + dv;
            if (fu < fine.width && fv < fine.height && fine.has_point[fine.index(fu, fv)]) {
              any_child = true;
            }
          }
        }
        CHECK(any_child);
      }
    }
  }
}

TEST_CASE("build_pyramid validates the level count") {
  CHECK_THROWS_AS(build_pyramid(constant_depth(16, 16, 1.0), 0), Error);
}

}  // TEST_SUITE
