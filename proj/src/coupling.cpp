#include "beamlink/coupling.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include <Eigen/LU>

namespace beamlink {

namespace {

constexpr double kSingularMargin = M_PI - 1e-6;

template <typename S>
Vec3T<S> relative_rotation_vector(const Mat3T<S>& lambda1, const Mat3T<S>& lambda2,
                                  const CouplingReference& ref) {
  const Mat3T<S> rel = lambda2 * (ref.Lambda02.transpose() * ref.Lambda01).template cast<S>() *
                       lambda1.transpose();
  return log_so3(rel);
}

}  // namespace

Vec3 positional_gap(const CrossSectionState& state1, const CrossSectionState& state2,
                    const CouplingReference& ref) {
  return state2.r - state1.r -
         0.5 * (state1.triad * ref.R01 + state2.triad * ref.R02);
}

Vec3 rotational_gap(const CrossSectionState& state1, const CrossSectionState& state2,
                    const CouplingReference& ref) {
  const Vec3 psi = relative_rotation_vector<double>(state1.triad, state2.triad, ref);
  if (psi.norm() >= kSingularMargin)
    throw SingularConfigurationError("relative rotation of a coupled pair reached pi");
  return psi;
}

CouplingBlocks coupling_blocks_positional(const CrossSectionState& state1,
                                          const CrossSectionState& state2,
                                          const CouplingReference& ref, const Vec3& lambda_r) {
  CouplingBlocks blocks;
  const Vec3 r21 = state2.r - state1.r;
  const Mat3 half_skew_r21 = 0.5 * skew<double>(r21);
  const Mat3 half_skew_lambda = 0.5 * skew<double>(lambda_r);

  // Generalized forces from the objective variation of the gap: force rows
  // -I/+I, moment rows -1/2 skew(r_2 - r_1) on both sides.
  blocks.Cq1l.topRows<3>() = -Mat3::Identity();
  blocks.Cq2l.topRows<3>() = Mat3::Identity();
  blocks.Cq1l.bottomRows<3>() = -half_skew_r21;
  blocks.Cq2l.bottomRows<3>() = -half_skew_r21;

  // f_i moment part is 1/2 skew(lambda_r) (r_2 - r_1); only the positions enter.
  blocks.Cq1q1.block<3, 3>(3, 0) = -half_skew_lambda;
  blocks.Cq2q1.block<3, 3>(3, 0) = -half_skew_lambda;
  blocks.Cq1q2.block<3, 3>(3, 0) = half_skew_lambda;
  blocks.Cq2q2.block<3, 3>(3, 0) = half_skew_lambda;

  // Constraint rows, full variation of the gap.
  blocks.Clq1.leftCols<3>() = -Mat3::Identity();
  blocks.Clq2.leftCols<3>() = Mat3::Identity();
  blocks.Clq1.rightCols<3>() = 0.5 * skew<double>(Vec3(state1.triad * ref.R01));
  blocks.Clq2.rightCols<3>() = 0.5 * skew<double>(Vec3(state2.triad * ref.R02));
  return blocks;
}

CouplingBlocks coupling_blocks_rotational(const CrossSectionState& state1,
                                          const CrossSectionState& state2,
                                          const CouplingReference& ref,
                                          const Vec3& lambda_theta) {
  using S = Dual<double, 6>;

  // Seed the two cross-section spins and push them through the relative
  // rotation vector and the coupling moment.
  Vec3T<S> theta1, theta2;
  for (int c = 0; c < 3; ++c) {
    theta1(c) = S::seeded(0.0, c);
    theta2(c) = S::seeded(0.0, 3 + c);
  }
  const Mat3T<S> lambda1 = exp_so3(theta1) * state1.triad.cast<S>();
  const Mat3T<S> lambda2 = exp_so3(theta2) * state2.triad.cast<S>();
  const Vec3T<S> psi = relative_rotation_vector(lambda1, lambda2, ref);
  if (value_of(psi.squaredNorm()) >= kSingularMargin * kSingularMargin)
    throw SingularConfigurationError("relative rotation of a coupled pair reached pi");

  const Vec3T<S> moment = tangent_map(psi).transpose() * lambda_theta.cast<S>();

  CouplingBlocks blocks;
  Mat3 t_transposed, dpsi1, dpsi2, dm1, dm2;
  for (int a = 0; a < 3; ++a) {
    for (int c = 0; c < 3; ++c) {
      dpsi1(a, c) = psi(a).deriv[c];
      dpsi2(a, c) = psi(a).deriv[3 + c];
      dm1(a, c) = moment(a).deriv[c];
      dm2(a, c) = moment(a).deriv[3 + c];
    }
  }
  Vec3 psi_val;
  Vec3 m_val;
  for (int a = 0; a < 3; ++a) {
    psi_val(a) = psi(a).value;
    m_val(a) = moment(a).value;
  }
  t_transposed = tangent_map<double>(psi_val).transpose();

  blocks.Cq1l.bottomRows<3>() = -t_transposed;
  blocks.Cq2l.bottomRows<3>() = t_transposed;

  blocks.Cq1q1.block<3, 3>(3, 3) = -dm1;
  blocks.Cq1q2.block<3, 3>(3, 3) = -dm2;
  blocks.Cq2q1.block<3, 3>(3, 3) = dm1;
  blocks.Cq2q2.block<3, 3>(3, 3) = dm2;

  blocks.Clq1.rightCols<3>() = dpsi1;
  blocks.Clq2.rightCols<3>() = dpsi2;
  return blocks;
}

CouplingBlocks coupling_blocks_rotational_fd(const CrossSectionState& state1,
                                             const CrossSectionState& state2,
                                             const CouplingReference& ref,
                                             const Vec3& lambda_theta, double step) {
  const auto gap_and_moment = [&](const Mat3& l1, const Mat3& l2) {
    const Vec3 psi = relative_rotation_vector<double>(l1, l2, ref);
    const Vec3 m = tangent_map<double>(psi).transpose() * lambda_theta;
    return std::make_pair(psi, m);
  };

  CouplingBlocks blocks;
  const Vec3 psi0 = relative_rotation_vector<double>(state1.triad, state2.triad, ref);
  const Mat3 t_transposed = tangent_map<double>(psi0).transpose();
  blocks.Cq1l.bottomRows<3>() = -t_transposed;
  blocks.Cq2l.bottomRows<3>() = t_transposed;

  for (int side = 0; side < 2; ++side) {
    for (int c = 0; c < 3; ++c) {
      Vec3 dth = Vec3::Zero();
      dth(c) = step;
      Mat3 l1p = state1.triad, l1m = state1.triad, l2p = state2.triad, l2m = state2.triad;
      if (side == 0) {
        l1p = exp_so3<double>(dth) * state1.triad;
        l1m = exp_so3<double>(Vec3(-dth)) * state1.triad;
      } else {
        l2p = exp_so3<double>(dth) * state2.triad;
        l2m = exp_so3<double>(Vec3(-dth)) * state2.triad;
      }
      const auto [psi_p, m_p] = gap_and_moment(l1p, l2p);
      const auto [psi_m, m_m] = gap_and_moment(l1m, l2m);
      const Vec3 dpsi = (psi_p - psi_m) / (2.0 * step);
      const Vec3 dm = (m_p - m_m) / (2.0 * step);
      if (side == 0) {
        blocks.Clq1.block<3, 1>(0, 3 + c) = dpsi;
        blocks.Cq1q1.block<3, 1>(3, 3 + c) = -dm;
        blocks.Cq2q1.block<3, 1>(3, 3 + c) = dm;
      } else {
        blocks.Clq2.block<3, 1>(0, 3 + c) = dpsi;
        blocks.Cq1q2.block<3, 1>(3, 3 + c) = -dm;
        blocks.Cq2q2.block<3, 1>(3, 3 + c) = dm;
      }
    }
  }
  return blocks;
}

LagrangeMultipliers penalty_multiplier(const GeneralizedDeformation& gap, double eps_r,
                                       double eps_theta) {
  if (!(eps_r > 0.0) || !(eps_theta > 0.0))
    throw ModelError("penalty parameters must be strictly positive");
  LagrangeMultipliers out;
  out.lambda_r = eps_r * gap.g_r;
  out.lambda_theta = eps_theta * gap.g_theta;
  return out;
}

std::pair<double, double> default_penalties(const CrossSectionConstitutive& mat1,
                                            const CrossSectionConstitutive& mat2, double scale) {
  if (!(scale > 0.0)) throw ModelError("penalty scale must be strictly positive");
  const double e_bar = 0.5 * (mat1.E + mat2.E);
  const double r_bar = 0.5 * (mat1.R + mat2.R);
  return {scale * e_bar * r_bar, scale * e_bar * r_bar * r_bar * r_bar};
}

namespace {

struct CenterlinePoint {
  Vec3 r;
  Vec3 r_xi;
  Vec3 r_xixi;
};

CenterlinePoint reference_point(const BeamElement& e, double xi) {
  // Second xi-derivatives via the analytic Lagrange basis would need a
  // second derivative; finite-difference the first derivative instead.
  const int nn = e.n_nodes();
  double L[4], dL[4];
  lagrange_shape(nn, xi, L, dL);
  CenterlinePoint p{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  for (int k = 0; k < nn; ++k) {
    p.r += L[k] * e.ref_positions[k];
    p.r_xi += dL[k] * e.ref_positions[k];
  }
  const double h = 1e-6;
  double Lp[4], dLp[4], Lm[4], dLm[4];
  lagrange_shape(nn, xi + h, Lp, dLp);
  lagrange_shape(nn, xi - h, Lm, dLm);
  for (int k = 0; k < nn; ++k)
    p.r_xixi += ((dLp[k] - dLm[k]) / (2.0 * h)) * e.ref_positions[k];
  return p;
}

}  // namespace

ProjectionResult closest_point_projection(const BeamElement& elem_a, const BeamElement& elem_b) {
  // Coarse 11x11 scan for the seed.
  double best = std::numeric_limits<double>::max();
  Eigen::Vector2d xi(0.0, 0.0);
  for (int i = 0; i <= 10; ++i) {
    for (int j = 0; j <= 10; ++j) {
      const double xa = -1.0 + 0.2 * i;
      const double xb = -1.0 + 0.2 * j;
      const double d2 =
          (reference_point(elem_a, xa).r - reference_point(elem_b, xb).r).squaredNorm();
      if (d2 < best) {
        best = d2;
        xi = Eigen::Vector2d(xa, xb);
      }
    }
  }

  // Newton on the stationarity of 1/2 |r_a - r_b|^2, clamped to the
  // parameter box. Gradient components pushing against an active bound do
  // not count towards convergence.
  bool converged = false;
  for (int it = 0; it < 50; ++it) {
    const auto pa = reference_point(elem_a, xi(0));
    const auto pb = reference_point(elem_b, xi(1));
    const Vec3 d = pa.r - pb.r;
    const Eigen::Vector2d grad(d.dot(pa.r_xi), -d.dot(pb.r_xi));
    Eigen::Vector2d projected = grad;
    for (int c = 0; c < 2; ++c) {
      if (xi(c) >= 1.0 - 1e-14 && grad(c) < 0.0) projected(c) = 0.0;
      if (xi(c) <= -1.0 + 1e-14 && grad(c) > 0.0) projected(c) = 0.0;
    }
    const double scale = std::max(1.0, pa.r_xi.norm() * pb.r_xi.norm());
    if (projected.norm() < 1e-12 * scale) {
      converged = true;
      break;
    }
    Eigen::Matrix2d hess;
    hess(0, 0) = pa.r_xi.squaredNorm() + d.dot(pa.r_xixi);
    hess(1, 1) = pb.r_xi.squaredNorm() - d.dot(pb.r_xixi);
    hess(0, 1) = hess(1, 0) = -pa.r_xi.dot(pb.r_xi);
    const Eigen::Vector2d step = hess.fullPivLu().solve(grad);
    xi -= step;
    xi = xi.cwiseMax(-1.0).cwiseMin(1.0);
  }
  if (!converged)
    throw ProjectionError("closest-point projection did not converge in 50 iterations");

  const auto pa = reference_point(elem_a, xi(0));
  const auto pb = reference_point(elem_b, xi(1));
  ProjectionResult out;
  out.xi_a = xi(0);
  out.xi_b = xi(1);
  out.distance = (pa.r - pb.r).norm();
  const Vec3 ta = pa.r_xi.normalized();
  const Vec3 tb = pb.r_xi.normalized();
  out.angle = std::atan2(ta.cross(tb).norm(), std::abs(ta.dot(tb)));
  if (out.angle < 0.1)
    throw ProjectionError("interaction angle below 0.1 rad: point projection ill-posed");
  return out;
}

}  // namespace beamlink
