#pragma once

#include <cmath>

#include "beamlink/dual.hpp"
#include "beamlink/types.hpp"

// Rotation-group algebra on 3x3 triads, templated on the scalar so the same
// kernels run on doubles and on (nested) dual numbers.
//
// Conventions used throughout:
//   * a triad Lambda in SO(3) has the cross-section base vectors as columns,
//   * rotation vectors parametrize Lambda = exp(skew(psi)),
//   * spins are multiplicative left increments, delta Lambda = skew(dtheta) Lambda,
//   * the tangent map relates the two variations, dpsi = tangent_map(psi) dtheta.

namespace beamlink {

template <typename S>
Mat3T<S> skew(const Vec3T<S>& a) {
  Mat3T<S> m;
  m(0, 0) = S(0.0), m(0, 1) = -a(2), m(0, 2) = a(1);
  m(1, 0) = a(2), m(1, 1) = S(0.0), m(1, 2) = -a(0);
  m(2, 0) = -a(1), m(2, 1) = a(0), m(2, 2) = S(0.0);
  return m;
}

/// Axial vector of the skew-symmetric part of m.
template <typename S>
Vec3T<S> axial(const Mat3T<S>& m) {
  return Vec3T<S>(0.5 * (m(2, 1) - m(1, 2)), 0.5 * (m(0, 2) - m(2, 0)),
                  0.5 * (m(1, 0) - m(0, 1)));
}

namespace detail {

// sin(x)/x and (1-cos(x))/x^2 from the squared angle; series below x = 1e-4
// where the closed forms turn 0/0.
template <typename S>
S sinc_from_sq(const S& x2) {
  if (value_of(x2) < 1e-8)
    return S(1.0) - x2 / 6.0 + x2 * x2 / 120.0;
  const S x = sqrt(x2);
  return sin(x) / x;
}

template <typename S>
S haversinc_from_sq(const S& x2) {
  if (value_of(x2) < 1e-8)
    return S(0.5) - x2 / 24.0 + x2 * x2 / 720.0;
  const S x = sqrt(x2);
  return (S(1.0) - cos(x)) / x2;
}

// (1 - (x/2) cot(x/2)) / x^2, the S^2 coefficient of the tangent map.
template <typename S>
S tangent_b_from_sq(const S& x2) {
  if (value_of(x2) < 1e-4)
    return S(1.0 / 12.0) + x2 / 720.0 + x2 * x2 / 30240.0;
  const S x = sqrt(x2);
  const S c = (x / 2.0) / tan(x / 2.0);
  return (S(1.0) - c) / x2;
}

// (x/2) cot(x/2).
template <typename S>
S tangent_c_from_sq(const S& x2) {
  if (value_of(x2) < 1e-4)
    return S(1.0) - x2 / 12.0 - x2 * x2 / 720.0;
  const S x = sqrt(x2);
  return (x / 2.0) / tan(x / 2.0);
}

// 4 sin^2(x/2) / x^2.
template <typename S>
S sinc_half_sq_from_sq(const S& x2) {
  const S s = sinc_from_sq(x2 / 4.0);
  return s * s;
}

}  // namespace detail

/// Rodrigues' formula, exp(skew(psi)).
template <typename S>
Mat3T<S> exp_so3(const Vec3T<S>& psi) {
  const S n2 = psi.squaredNorm();
  const Mat3T<S> sk = skew(psi);
  return Mat3T<S>(Mat3T<S>::Identity() + detail::sinc_from_sq(n2) * sk +
                  detail::haversinc_from_sq(n2) * (sk * sk));
}

/// Rotation vector of a triad, |psi| <= pi. Extraction goes through the
/// quaternion with the largest-diagonal branch, which stays well conditioned
/// as the angle approaches pi. At exactly pi the axis sign is fixed so that
/// the first nonzero component is positive.
template <typename S>
Vec3T<S> log_so3(const Mat3T<S>& m) {
  S q0;
  Vec3T<S> q;

  const double t = value_of(m(0, 0)) + value_of(m(1, 1)) + value_of(m(2, 2));
  int branch = -1;
  double best = t;
  for (int i = 0; i < 3; ++i) {
    if (value_of(m(i, i)) > best) {
      best = value_of(m(i, i));
      branch = i;
    }
  }

  if (branch < 0) {
    const S s = sqrt(S(1.0) + m(0, 0) + m(1, 1) + m(2, 2));
    q0 = 0.5 * s;
    const S f = S(0.5) / s;
    q(0) = f * (m(2, 1) - m(1, 2));
    q(1) = f * (m(0, 2) - m(2, 0));
    q(2) = f * (m(1, 0) - m(0, 1));
  } else {
    const int i = branch, j = (branch + 1) % 3, k = (branch + 2) % 3;
    const S s = sqrt(S(1.0) + m(i, i) - m(j, j) - m(k, k));
    const S f = S(0.5) / s;
    q(i) = 0.5 * s;
    q0 = f * (m(k, j) - m(j, k));
    q(j) = f * (m(j, i) + m(i, j));
    q(k) = f * (m(k, i) + m(i, k));
  }

  if (value_of(q0) < 0.0) {
    q0 = -q0;
    q = -q;
  } else if (value_of(q0) == 0.0) {
    for (int i = 0; i < 3; ++i) {
      if (value_of(q(i)) > 0.0) break;
      if (value_of(q(i)) < 0.0) {
        q = -q;
        break;
      }
    }
  }

  // psi = 2 atan2(|q|, q0) q / |q|; series in |q|^2/q0^2 near the identity.
  const S qn2 = q.squaredNorm();
  if (value_of(qn2) < 1e-4) {
    const S x2 = qn2 / (q0 * q0);
    const S f = (2.0 / q0) * (S(1.0) - x2 / 3.0 + x2 * x2 / 5.0 - x2 * x2 * x2 / 7.0);
    return Vec3T<S>(f * q);
  }
  const S qn = sqrt(qn2);
  const S f = 2.0 * atan2(qn, q0) / qn;
  return Vec3T<S>(f * q);
}

/// Tangent map T(psi) with dpsi = T(psi) dtheta: T = I - 1/2 skew(psi) + b skew(psi)^2.
template <typename S>
Mat3T<S> tangent_map(const Vec3T<S>& psi) {
  const S n2 = psi.squaredNorm();
  const Mat3T<S> sk = skew(psi);
  return Mat3T<S>(Mat3T<S>::Identity() - 0.5 * sk + detail::tangent_b_from_sq(n2) * (sk * sk));
}

/// Closed-form inverse of the tangent map, T^-1 = I + beta skew + gamma skew^2.
template <typename S>
Mat3T<S> tangent_map_inverse(const Vec3T<S>& psi) {
  const S n2 = psi.squaredNorm();
  const S b = detail::tangent_b_from_sq(n2);
  const S c = detail::tangent_c_from_sq(n2);
  const S q = detail::sinc_half_sq_from_sq(n2);
  const S gamma = (S(0.25) - b * c) * q;
  const S beta = (S(0.5) - 0.5 * gamma * n2) / c;
  const Mat3T<S> sk = skew(psi);
  return Mat3T<S>(Mat3T<S>::Identity() + beta * sk + gamma * (sk * sk));
}

/// Relative rotation Lambda2 Lambda1^T.
template <typename S>
Mat3T<S> relative_rotation(const Mat3T<S>& lambda1, const Mat3T<S>& lambda2) {
  return Mat3T<S>(lambda2 * lambda1.transpose());
}

/// Orthonormality and determinant check (Frobenius, 1e-12 by default).
inline bool is_rotation(const Mat3& m, double tol = 1e-12) {
  if (((m.transpose() * m) - Mat3::Identity()).norm() > tol) return false;
  return std::abs(m.determinant() - 1.0) <= tol;
}

/// Rotates the triad by the smallest rotation that takes its first column
/// onto the (unit) direction t, preserving the twist about the axis.
inline Mat3 align_first_director(const Mat3& triad, const Vec3& t) {
  const Vec3 g1 = triad.col(0);
  const double c = g1.dot(t);
  if (c < -1.0 + 1e-12) return exp_so3<double>(Vec3(M_PI * triad.col(1))) * triad;
  const Vec3 w = g1.cross(t);
  const double n = w.norm();
  if (n < 1e-300) return triad;
  return exp_so3<double>(Vec3(w * (std::atan2(n, c) / n))) * triad;
}

/// Smallest rotation taking e1 onto the (unit) direction t.
inline Mat3 smallest_rotation_from_e1(const Vec3& t) {
  const Vec3 e1 = Vec3::UnitX();
  const double c = e1.dot(t);
  if (c < -1.0 + 1e-12) {
    // Antipodal: half-turn about e3.
    Mat3 m = -Mat3::Identity();
    m(2, 2) = 1.0;
    return m;
  }
  const Vec3 w = e1.cross(t);
  return exp_so3<double>(w * (std::atan2(w.norm(), c) / std::max(w.norm(), 1e-300)));
}

}  // namespace beamlink
