#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

#include "oicp/errors.hpp"

namespace oicp {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Vec6 = Eigen::Matrix<Scalar, 6, 1>;
template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Mat4 = Eigen::Matrix<Scalar, 4, 4>;

/// Incremental motion parameters: small rotations (alpha, beta, gamma) about
/// the X, Y, Z axes in radians plus a translation in meters.
template <typename Scalar>
struct Twist {
  Scalar alpha{0}, beta{0}, gamma{0};
  Scalar tx{0}, ty{0}, tz{0};

  static Twist FromVector(const Vec6<Scalar>& v) {
    return Twist{v[0], v[1], v[2], v[3], v[4], v[5]};
  }

  Vec6<Scalar> vector() const {
    Vec6<Scalar> v;
    v << alpha, beta, gamma, tx, ty, tz;
    return v;
  }

  Vec3<Scalar> angles() const { return Vec3<Scalar>(alpha, beta, gamma); }
  Vec3<Scalar> translation() const { return Vec3<Scalar>(tx, ty, tz); }

  /// Diagnostic only: the linearization is trusted below 0.2 rad per angle.
  bool small_angle_valid() const {
    using std::abs;
    return abs(alpha) < Scalar(0.2) && abs(beta) < Scalar(0.2) && abs(gamma) < Scalar(0.2);
  }
};

using Twistd = Twist<double>;

/// SE(3) element stored as rotation matrix + translation.
template <typename Scalar>
struct RigidTransform {
  Mat3<Scalar> rotation = Mat3<Scalar>::Identity();
  Vec3<Scalar> translation = Vec3<Scalar>::Zero();

  static RigidTransform Identity() { return RigidTransform{}; }

  Mat4<Scalar> matrix() const {
    Mat4<Scalar> m = Mat4<Scalar>::Identity();
    m.template block<3, 3>(0, 0) = rotation;
    m.template block<3, 1>(0, 3) = translation;
    return m;
  }
};

using RigidTransformd = RigidTransform<double>;

template <typename Scalar>
RigidTransform<Scalar> compose(const RigidTransform<Scalar>& a, const RigidTransform<Scalar>& b) {
  return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

template <typename Scalar>
RigidTransform<Scalar> inverse(const RigidTransform<Scalar>& t) {
  Mat3<Scalar> rt = t.rotation.transpose();
  return {rt, -(rt * t.translation)};
}

template <typename Scalar>
Vec3<Scalar> apply(const RigidTransform<Scalar>& t, const Vec3<Scalar>& p) {
  return t.rotation * p + t.translation;
}

/// First-order rigid motion: ones on the diagonal, the skew of
/// (alpha, beta, gamma) off-diagonal and the translation in the last column.
/// Not orthonormal for nonzero angles.
template <typename Scalar>
Mat4<Scalar> small_angle_transform(const Twist<Scalar>& x) {
  Mat4<Scalar> m = Mat4<Scalar>::Identity();
  m(0, 1) = -x.gamma;
  m(0, 2) = x.beta;
  m(1, 0) = x.gamma;
  m(1, 2) = -x.alpha;
  m(2, 0) = -x.beta;
  m(2, 1) = x.alpha;
  m(0, 3) = x.tx;
  m(1, 3) = x.ty;
  m(2, 3) = x.tz;
  return m;
}

/// Projects the upper-left block of an approximately-rigid 4x4 matrix back to
/// SO(3) (polar decomposition: nearest rotation in Frobenius norm) and copies
/// the translation through. Throws DegenerateRotation for singular or
/// reflecting blocks.
template <typename Derived>
RigidTransform<typename Derived::Scalar> orthonormalize(const Eigen::MatrixBase<Derived>& m_expr) {
  using Scalar = typename Derived::Scalar;
  static_assert(Derived::RowsAtCompileTime == 4 && Derived::ColsAtCompileTime == 4);
  const Mat4<Scalar> m = m_expr;
  const Mat3<Scalar> block = m.template block<3, 3>(0, 0);
  Eigen::JacobiSVD<Mat3<Scalar>> svd(block, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv[0] > Scalar(0)) || sv[2] <= sv[0] * Scalar(1e-12)) {
    throw Error(ErrorCode::kDegenerateRotation, "rotation block is numerically singular");
  }
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < Scalar(0)) {
    throw Error(ErrorCode::kDegenerateRotation, "rotation block reflects (det < 0)");
  }
  RigidTransform<Scalar> out;
  out.rotation = svd.matrixU() * svd.matrixV().transpose();
  out.translation = m.template block<3, 1>(0, 3);
  return out;
}

/// Geodesic angle between two unit quaternions, treating q and -q as the same
/// rotation. Stable near zero (no acos of a near-1 dot product).
template <typename Scalar>
Scalar geodesic_angle(const Eigen::Quaternion<Scalar>& a, const Eigen::Quaternion<Scalar>& b) {
  const Scalar dm = (a.coeffs() - b.coeffs()).norm();
  const Scalar dp = (a.coeffs() + b.coeffs()).norm();
  const Scalar d = std::min(dm, dp);
  return Scalar(4) * std::asin(std::min(Scalar(1), d / Scalar(2)));
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar geodesic_angle(const Eigen::MatrixBase<DerivedA>& a,
                                         const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  return geodesic_angle(Eigen::Quaternion<Scalar>(Mat3<Scalar>(a)),
                        Eigen::Quaternion<Scalar>(Mat3<Scalar>(b)));
}

template <typename Scalar>
bool rotations_equal(const Eigen::Quaternion<Scalar>& a, const Eigen::Quaternion<Scalar>& b,
                     Scalar tol = Scalar(1e-9)) {
  return geodesic_angle(a, b) <= tol;
}

/// Euler angles (alpha, beta, gamma) such that R = Rx(alpha)*Ry(beta)*Rz(gamma)
/// (intrinsic X-Y-Z; this is the convention whose first-order expansion matches
/// small_angle_transform). beta is in [-pi/2, pi/2]; alpha and gamma in [-pi, pi].
template <typename Scalar>
struct EulerXyz {
  Scalar alpha, beta, gamma;
  /// |beta| within 1e-6 rad of pi/2: alpha/gamma split is ill-conditioned.
  bool gimbal_adjacent = false;
};

template <typename Scalar>
EulerXyz<Scalar> euler_xyz(const Mat3<Scalar>& r) {
  EulerXyz<Scalar> e;
  const Scalar s = std::clamp(r(0, 2), Scalar(-1), Scalar(1));
  e.beta = std::asin(s);
  e.gimbal_adjacent = std::abs(std::abs(e.beta) - Scalar(M_PI / 2)) < Scalar(1e-6);
  if (e.gimbal_adjacent) {
    // Only alpha - sgn(beta)*gamma is observable; put everything into alpha.
    e.gamma = Scalar(0);
    e.alpha = std::atan2(r(2, 1), r(1, 1));
  } else {
    e.alpha = std::atan2(-r(1, 2), r(2, 2));
    e.gamma = std::atan2(-r(0, 1), r(0, 0));
  }
  return e;
}

template <typename Scalar>
Mat3<Scalar> rotation_from_euler_xyz(Scalar alpha, Scalar beta, Scalar gamma) {
  return (Eigen::AngleAxis<Scalar>(alpha, Vec3<Scalar>::UnitX()) *
          Eigen::AngleAxis<Scalar>(beta, Vec3<Scalar>::UnitY()) *
          Eigen::AngleAxis<Scalar>(gamma, Vec3<Scalar>::UnitZ()))
      .toRotationMatrix();
}

}  // namespace oicp
