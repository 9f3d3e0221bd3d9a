#include <doctest.h>

#include <Eigen/Geometry>
#include <random>

#include "oicp/geometry.hpp"

using namespace oicp;

namespace {

Eigen::Quaterniond random_quaternion(std::mt19937& rng) {
  std::normal_distribution<double> gauss;
  Eigen::Quaterniond q(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
  q.normalize();
  return q;
}

Eigen::Matrix3d exp_rotation(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  if (theta == 0.0) return Eigen::Matrix3d::Identity();
  return Eigen::AngleAxisd(theta, w / theta).toRotationMatrix();
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("small_angle_transform of zero twist is the identity") {
  CHECK(small_angle_transform(Twistd{}).isApprox(Eigen::Matrix4d::Identity(), 0.0));
}

TEST_CASE("small_angle_transform matches the documented layout") {
  const Twistd x{0.1, -0.2, 0.3, 1.0, 2.0, 3.0};
  const Eigen::Matrix4d m = small_angle_transform(x);
  Eigen::Matrix4d expected;
  expected << 1, -0.3, -0.2, 1,
      0.3, 1, -0.1, 2,
      0.2, 0.1, 1, 3,
      0, 0, 0, 1;
  CHECK((m - expected).norm() == 0.0);
}

TEST_CASE("small_angle_transform is exactly linear in the twist") {
  const Twistd x1{0.01, 0.02, -0.03, 0.4, -0.5, 0.6};
  const Twistd x2{-0.07, 0.001, 0.05, -0.2, 0.9, -0.3};
  const double a = 1.75, b = -0.4;
  Twistd combo;
  combo.alpha = a * x1.alpha + b * x2.alpha;
  combo.beta = a * x1.beta + b * x2.beta;
  combo.gamma = a * x1.gamma + b * x2.gamma;
  combo.tx = a * x1.tx + b * x2.tx;
  combo.ty = a * x1.ty + b * x2.ty;
  combo.tz = a * x1.tz + b * x2.tz;
  const Eigen::Matrix4d id = Eigen::Matrix4d::Identity();
  const Eigen::Matrix4d lhs = small_angle_transform(combo) - id;
  const Eigen::Matrix4d rhs =
      a * (small_angle_transform(x1) - id) + b * (small_angle_transform(x2) - id);
  CHECK((lhs - rhs).norm() <= 1e-15);
}

TEST_CASE("rotation block orthogonality defect is first order: |M^T M - I|_F <= 2 theta^2") {
  std::mt19937 rng(7);
  std::normal_distribution<double> gauss;
  for (double theta = 1e-4; theta <= 0.2; theta *= 1.6) {
    Eigen::Vector3d w(gauss(rng), gauss(rng), gauss(rng));
    w *= theta / w.norm();
    const Twistd x{w.x(), w.y(), w.z(), 0, 0, 0};
    const Eigen::Matrix3d r = small_angle_transform(x).block<3, 3>(0, 0);
    CHECK((r.transpose() * r - Eigen::Matrix3d::Identity()).norm() <= 2.0 * theta * theta);
  }
}

TEST_CASE("orthonormalize fixes points of SO(3) and projects the approximation") {
  CHECK(orthonormalize(Eigen::Matrix4d::Identity()).rotation.isApprox(Eigen::Matrix3d::Identity(), 1e-15));

  std::mt19937 rng(11);
  std::normal_distribution<double> gauss;

  SUBCASE("already orthonormal input is returned unchanged") {
    for (int i = 0; i < 20; ++i) {
      const Eigen::Matrix3d r = random_quaternion(rng).toRotationMatrix();
      Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
      m.block<3, 3>(0, 0) = r;
      m.block<3, 1>(0, 3) = Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
      const RigidTransformd t = orthonormalize(m);
      CHECK((t.rotation - r).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(t.translation == m.block<3, 1>(0, 3));
    }
  }

  SUBCASE("projection of the small-angle matrix tracks the exponential map") {
    for (double theta : {1e-4, 1e-3, 0.01, 0.05, 0.1, 0.2}) {
      Eigen::Vector3d w(gauss(rng), gauss(rng), gauss(rng));
      w *= theta / w.norm();
      const Twistd x{w.x(), w.y(), w.z(), 0, 0, 0};
      const RigidTransformd t = orthonormalize(small_angle_transform(x));
      const double err = geodesic_angle(t.rotation, exp_rotation(w));
      CHECK(err <= theta * theta / 2.0);
      if (theta == 0.1) CHECK(err < 0.01);
    }
  }

  SUBCASE("idempotent") {
    const Twistd x{0.1, -0.05, 0.07, 0.1, 0.2, 0.3};
    const RigidTransformd once = orthonormalize(small_angle_transform(x));
    const RigidTransformd twice = orthonormalize(once.matrix());
    CHECK((once.rotation - twice.rotation).cwiseAbs().maxCoeff() <= 1e-12);
  }

  SUBCASE("reflecting block is rejected") {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m(0, 0) = -1.0;
    CHECK_THROWS_WITH_AS(orthonormalize(m), doctest::Contains("DegenerateRotation"), Error);
  }

  SUBCASE("singular block is rejected") {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m(2, 2) = 0.0;
    CHECK_THROWS_AS(orthonormalize(m), Error);
  }
}

TEST_CASE("compose/inverse/apply behave as group operations") {
  std::mt19937 rng(3);
  std::normal_distribution<double> gauss;
  for (int i = 0; i < 50; ++i) {
    RigidTransformd a{random_quaternion(rng).toRotationMatrix(),
                      Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng))};
    RigidTransformd b{random_quaternion(rng).toRotationMatrix(),
                      Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng))};

    const RigidTransformd ab = compose(a, inverse(a));
    CHECK((ab.rotation - Eigen::Matrix3d::Identity()).norm() <= 1e-9);
    CHECK(ab.translation.norm() <= 1e-9);

    // dense 4x4 product oracle
    CHECK((compose(a, b).matrix() - a.matrix() * b.matrix()).norm() <= 1e-12);

    const Eigen::Vector3d p(gauss(rng), gauss(rng), gauss(rng));
    CHECK(apply(RigidTransformd::Identity(), p) == p);
    CHECK((apply(a, p) - (a.matrix() * p.homogeneous()).head<3>()).norm() <= 1e-12);
  }
}

TEST_CASE("quaternion conversions round-trip and honor the double cover") {
  CHECK(Eigen::Quaterniond::Identity().toRotationMatrix().isApprox(Eigen::Matrix3d::Identity(), 0.0));

  std::mt19937 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Quaterniond q = random_quaternion(rng);
    const Eigen::Quaterniond neg(-q.w(), -q.x(), -q.y(), -q.z());
    CHECK((q.toRotationMatrix() - neg.toRotationMatrix()).norm() <= 1e-15);

    const Eigen::Quaterniond back(q.toRotationMatrix());
    CHECK(geodesic_angle(q, back) < 1e-9);
    CHECK(rotations_equal(q, neg));
  }
}

TEST_CASE("euler_xyz extraction inverts rotation_from_euler_xyz") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> uni(-M_PI, M_PI);
  std::uniform_real_distribution<double> pitch(-M_PI / 2 + 0.01, M_PI / 2 - 0.01);
  for (int i = 0; i < 500; ++i) {
    const double a = uni(rng), b = pitch(rng), c = uni(rng);
    const Eigen::Matrix3d r = rotation_from_euler_xyz(a, b, c);
    const EulerXyz<double> e = euler_xyz(r);
    REQUIRE_FALSE(e.gimbal_adjacent);
    CHECK(std::abs(e.alpha - a) < 1e-9);
    CHECK(std::abs(e.beta - b) < 1e-9);
    CHECK(std::abs(e.gamma - c) < 1e-9);
  }

  SUBCASE("gimbal-adjacent pitch is flagged and still recomposes") {
    for (double sign : {1.0, -1.0}) {
      const Eigen::Matrix3d r = rotation_from_euler_xyz(0.4, sign * M_PI / 2, -0.9);
      const EulerXyz<double> e = euler_xyz(r);
      CHECK(e.gimbal_adjacent);
      const Eigen::Matrix3d back = rotation_from_euler_xyz(e.alpha, e.beta, e.gamma);
      CHECK(geodesic_angle(r, back) < 1e-6);  // the alpha/gamma split is ill-conditioned here
    }
  }
}

TEST_CASE("twist flags the small-angle validity range") {
  CHECK(Twistd{0.19, 0.0, 0.0, 0, 0, 0}.small_angle_valid());
  CHECK_FALSE(Twistd{0.21, 0.0, 0.0, 0, 0, 0}.small_angle_valid());
  CHECK(Twistd{}.small_angle_valid());
}

}  // TEST_SUITE
