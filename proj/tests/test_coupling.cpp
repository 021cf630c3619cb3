#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "beamlink/coupling.hpp"
#include "test_helpers.hpp"

using namespace beamlink;
using namespace beamlink::testing;

namespace {

struct PairSetup {
  CrossSectionState ref1, ref2;
  CrossSectionState cur1, cur2;
  CouplingReference ref;
};

PairSetup random_pair(std::mt19937& rng, bool at_reference = false, double dr = 0.4,
                      double dtheta = 0.6) {
  PairSetup p;
  p.ref1 = {random_vec(rng, 1.0), random_rotation(rng)};
  p.ref2 = {p.ref1.r + random_vec(rng, 0.5), random_rotation(rng)};
  p.ref = CouplingReference::from_states(p.ref1, p.ref2);
  if (at_reference) {
    p.cur1 = p.ref1;
    p.cur2 = p.ref2;
  } else {
    p.cur1 = {p.ref1.r + random_vec(rng, dr),
              exp_so3<double>(random_vec(rng, dtheta)) * p.ref1.triad};
    p.cur2 = {p.ref2.r + random_vec(rng, dr),
              exp_so3<double>(random_vec(rng, dtheta)) * p.ref2.triad};
  }
  return p;
}

CrossSectionState perturb_section(const CrossSectionState& s, int dof, double h) {
  CrossSectionState out = s;
  if (dof < 3) {
    out.r(dof) += h;
  } else {
    Vec3 dtheta = Vec3::Zero();
    dtheta(dof - 3) = h;
    out.triad = exp_so3<double>(dtheta) * out.triad;
  }
  return out;
}

}  // namespace

TEST_CASE("gaps vanish at the reference configuration") {
  auto rng = std::mt19937(301);
  double max_err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = random_pair(rng, true);
    max_err = std::max(max_err, positional_gap(p.cur1, p.cur2, p.ref).norm());
    max_err = std::max(max_err, rotational_gap(p.cur1, p.cur2, p.ref).norm());
  }
  CHECK(max_err < 1e-12);
}

TEST_CASE("gaps are antisymmetric under index permutation") {
  auto rng = std::mt19937(302);
  double max_err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = random_pair(rng);
    const CouplingReference swapped = CouplingReference::from_states(p.ref2, p.ref1);
    max_err = std::max(max_err, (positional_gap(p.cur1, p.cur2, p.ref) +
                                 positional_gap(p.cur2, p.cur1, swapped))
                                    .norm());
    max_err = std::max(max_err, (rotational_gap(p.cur1, p.cur2, p.ref) +
                                 rotational_gap(p.cur2, p.cur1, swapped))
                                    .norm());
  }
  CHECK(max_err < 1e-12);
}

TEST_CASE("positional gap reduces to the translation for coincident centroids") {
  auto rng = std::mt19937(303);
  CrossSectionState ref1{Vec3(0.2, -0.1, 0.4), random_rotation(rng)};
  CrossSectionState ref2{ref1.r, random_rotation(rng)};
  const auto ref = CouplingReference::from_states(ref1, ref2);
  CHECK(ref.R01.norm() == 0.0);

  const Vec3 u(0.01, -0.02, 0.03);
  CrossSectionState cur2 = ref2;
  cur2.r += u;
  CHECK((positional_gap(ref1, cur2, ref) - u).norm() < 1e-15);
}

TEST_CASE("rotational gap returns the applied relative rotation") {
  auto rng = std::mt19937(304);
  const auto p = random_pair(rng, true);
  const Vec3 phi = random_vec(rng, 2.0);
  CrossSectionState cur2 = p.ref2;
  cur2.triad = exp_so3<double>(phi) * p.ref2.triad;
  CHECK((rotational_gap(p.ref1, cur2, p.ref) - phi).norm() < 1e-12);
}

TEST_CASE("rotational gap signals the pi singularity") {
  auto rng = std::mt19937(305);
  const auto p = random_pair(rng, true);
  CrossSectionState cur2 = p.ref2;
  cur2.triad = exp_so3<double>(Vec3(M_PI - 1e-9, 0.0, 0.0)) * p.ref2.triad;
  CHECK_THROWS_AS((void)rotational_gap(p.ref1, cur2, p.ref), SingularConfigurationError);
}

TEST_CASE("positional blocks: structure") {
  auto rng = std::mt19937(306);
  const auto p = random_pair(rng);

  // Blocks are linear in lambda_r.
  const auto b0 = coupling_blocks_positional(p.cur1, p.cur2, p.ref, Vec3::Zero());
  CHECK(b0.Cq1q1.norm() == 0.0);
  CHECK(b0.Cq1q2.norm() == 0.0);
  CHECK(b0.Cq2q1.norm() == 0.0);
  CHECK(b0.Cq2q2.norm() == 0.0);

  // Coincident centroids: no moment rows.
  CrossSectionState cur2 = p.cur2;
  cur2.r = p.cur1.r;
  const auto bc = coupling_blocks_positional(p.cur1, cur2, p.ref, Vec3(1.0, 2.0, 3.0));
  CHECK(bc.Cq1l.bottomRows<3>().norm() == 0.0);
  CHECK(bc.Cq2l.bottomRows<3>().norm() == 0.0);
}

TEST_CASE("positional blocks match finite differences") {
  auto rng = std::mt19937(307);
  const double h = 1e-6;
  double e_clq = 0.0, e_cqq = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_pair(rng);
    const Vec3 lambda = random_vec(rng, 2.0);
    const auto blocks = coupling_blocks_positional(p.cur1, p.cur2, p.ref, lambda);

    for (int side = 0; side < 2; ++side) {
      for (int dof = 0; dof < 6; ++dof) {
        const auto pert = [&](double step) {
          auto s1 = p.cur1;
          auto s2 = p.cur2;
          (side == 0 ? s1 : s2) = perturb_section(side == 0 ? p.cur1 : p.cur2, dof, step);
          return std::make_pair(s1, s2);
        };
        const auto [p1, p2] = pert(h);
        const auto [m1, m2] = pert(-h);

        const Vec3 dgap =
            (positional_gap(p1, p2, p.ref) - positional_gap(m1, m2, p.ref)) / (2.0 * h);
        const auto& clq = side == 0 ? blocks.Clq1 : blocks.Clq2;
        e_clq = std::max(e_clq, (clq.col(dof) - dgap).norm());

        // Generalized forces f_i = Cq{i}l lambda at fixed lambda.
        const auto bp = coupling_blocks_positional(p1, p2, p.ref, lambda);
        const auto bm = coupling_blocks_positional(m1, m2, p.ref, lambda);
        const Vec6 df1 = (bp.Cq1l * lambda - bm.Cq1l * lambda) / (2.0 * h);
        const Vec6 df2 = (bp.Cq2l * lambda - bm.Cq2l * lambda) / (2.0 * h);
        const auto& c1 = side == 0 ? blocks.Cq1q1 : blocks.Cq1q2;
        const auto& c2 = side == 0 ? blocks.Cq2q1 : blocks.Cq2q2;
        e_cqq = std::max(e_cqq, (c1.col(dof) - df1).norm());
        e_cqq = std::max(e_cqq, (c2.col(dof) - df2).norm());
      }
    }
  }
  CHECK(e_clq < 1e-5);
  CHECK(e_cqq < 1e-5);
}

TEST_CASE("rotational blocks: structure at the reference") {
  auto rng = std::mt19937(308);
  const auto p = random_pair(rng, true);
  const auto blocks = coupling_blocks_rotational(p.cur1, p.cur2, p.ref, Vec3::Zero());
  CHECK((blocks.Cq1l.bottomRows<3>() + Mat3::Identity()).norm() < 1e-14);
  CHECK((blocks.Cq2l.bottomRows<3>() - Mat3::Identity()).norm() < 1e-14);
  CHECK(blocks.Cq1l.topRows<3>().norm() == 0.0);
  CHECK(blocks.Cq1q1.norm() == 0.0);
  CHECK(blocks.Cq2q2.norm() == 0.0);
}

TEST_CASE("rotational blocks match finite differences and the FD fallback") {
  auto rng = std::mt19937(309);
  double max_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_pair(rng);
    const Vec3 lambda = random_vec(rng, 2.0);
    const auto blocks = coupling_blocks_rotational(p.cur1, p.cur2, p.ref, lambda);
    const auto fd = coupling_blocks_rotational_fd(p.cur1, p.cur2, p.ref, lambda);
    max_err = std::max(max_err, (blocks.Clq1 - fd.Clq1).norm());
    max_err = std::max(max_err, (blocks.Clq2 - fd.Clq2).norm());
    max_err = std::max(max_err, (blocks.Cq1q1 - fd.Cq1q1).norm());
    max_err = std::max(max_err, (blocks.Cq1q2 - fd.Cq1q2).norm());
    max_err = std::max(max_err, (blocks.Cq2q1 - fd.Cq2q1).norm());
    max_err = std::max(max_err, (blocks.Cq2q2 - fd.Cq2q2).norm());
    max_err = std::max(max_err, (blocks.Cq1l - fd.Cq1l).norm());
    max_err = std::max(max_err, (blocks.Cq2l - fd.Cq2l).norm());
  }
  CHECK(max_err < 1e-5);
}

TEST_CASE("virtual work of both couplings is objective") {
  auto rng = std::mt19937(310);
  double max_err = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_pair(rng);
    const Vec3 lambda_r = random_vec(rng, 2.0);
    const Vec3 lambda_t = random_vec(rng, 2.0);
    const Vec3 dlambda_r = random_vec(rng, 1.0);
    const Vec3 dlambda_t = random_vec(rng, 1.0);
    Vec6 dq1, dq2;
    dq1 << random_vec(rng, 1.0), random_vec(rng, 1.0);
    dq2 << random_vec(rng, 1.0), random_vec(rng, 1.0);

    const auto work = [&](const CrossSectionState& s1, const CrossSectionState& s2,
                          const Vec3& lr, const Vec3& lt, const Vec3& dlr, const Vec3& dlt,
                          const Vec6& v1, const Vec6& v2) {
      const auto bp = coupling_blocks_positional(s1, s2, p.ref, lr);
      const auto br = coupling_blocks_rotational(s1, s2, p.ref, lt);
      double w = dlr.dot(positional_gap(s1, s2, p.ref)) +
                 dlt.dot(rotational_gap(s1, s2, p.ref));
      w += v1.dot(bp.Cq1l * lr) + v2.dot(bp.Cq2l * lr);
      w += v1.dot(br.Cq1l * lt) + v2.dot(br.Cq2l * lt);
      return w;
    };

    const double w0 = work(p.cur1, p.cur2, lambda_r, lambda_t, dlambda_r, dlambda_t, dq1, dq2);

    const Mat3 q = random_rotation(rng);
    const Vec3 a = random_vec(rng, 2.0);
    CrossSectionState t1{q * p.cur1.r + a, q * p.cur1.triad};
    CrossSectionState t2{q * p.cur2.r + a, q * p.cur2.triad};
    Vec6 tq1, tq2;
    tq1 << q * dq1.head<3>(), q * dq1.tail<3>();
    tq2 << q * dq2.head<3>(), q * dq2.tail<3>();
    const double w1 = work(t1, t2, Vec3(q * lambda_r), Vec3(q * lambda_t), Vec3(q * dlambda_r),
                           Vec3(q * dlambda_t), tq1, tq2);
    max_err = std::max(max_err, std::abs(w1 - w0));
  }
  CHECK(max_err < 1e-12);
}

TEST_CASE("penalty multiplier") {
  GeneralizedDeformation zero;
  const auto l0 = penalty_multiplier(zero, 1.0, 1.0);
  CHECK(l0.lambda_r.norm() == 0.0);
  CHECK(l0.lambda_theta.norm() == 0.0);

  GeneralizedDeformation gap;
  gap.g_r = Vec3(1.0, 2.0, 3.0);
  const auto l1 = penalty_multiplier(gap, 1.0, 1.0);
  CHECK((l1.lambda_r - Vec3(1.0, 2.0, 3.0)).norm() == 0.0);

  // eps g is the gradient of the quadratic potential 1/2 eps g^T g.
  const double eps = 7.0, h = 1e-7;
  auto rng = std::mt19937(311);
  const Vec3 g = random_vec(rng, 1.0);
  for (int c = 0; c < 3; ++c) {
    Vec3 gp = g, gm = g;
    gp(c) += h;
    gm(c) -= h;
    const double fd = 0.5 * eps * (gp.squaredNorm() - gm.squaredNorm()) / (2.0 * h);
    CHECK(fd == doctest::Approx(eps * g(c)).epsilon(1e-7));
  }

  CHECK_THROWS_AS((void)penalty_multiplier(zero, -1.0, 1.0), ModelError);
}

TEST_CASE("penalty forces are gradients of the penalty potential") {
  // The rotational force and the positional translation rows derive from
  // 1/2 eps |g|^2 at any state; the positional moment rows do so wherever
  // the two push-forwards of the reference offset coincide (shared
  // effective rotation), which the rotational constraint enforces.
  auto rng = std::mt19937(312);
  const double h = 1e-6;
  const double eps_r = 3.0, eps_t = 2.0;
  double max_err = 0.0;

  for (int trial = 0; trial < 50; ++trial) {
    auto p = random_pair(rng, true);
    const Mat3 common = random_rotation(rng);
    p.cur1.triad = common * p.ref1.triad;
    p.cur2.triad = common * p.ref2.triad;
    p.cur1.r += random_vec(rng, 0.4);
    p.cur2.r += random_vec(rng, 0.4);

    const GeneralizedDeformation gap{positional_gap(p.cur1, p.cur2, p.ref),
                                     rotational_gap(p.cur1, p.cur2, p.ref)};
    const auto mult = penalty_multiplier(gap, eps_r, eps_t);
    const auto bp = coupling_blocks_positional(p.cur1, p.cur2, p.ref, mult.lambda_r);
    const Vec6 f1 = bp.Cq1l * mult.lambda_r;
    const Vec6 f2 = bp.Cq2l * mult.lambda_r;

    const auto potential = [&](const CrossSectionState& s1, const CrossSectionState& s2) {
      return 0.5 * eps_r * positional_gap(s1, s2, p.ref).squaredNorm();
    };
    for (int side = 0; side < 2; ++side) {
      for (int dof = 0; dof < 6; ++dof) {
        const auto sp = perturb_section(side == 0 ? p.cur1 : p.cur2, dof, h);
        const auto sm = perturb_section(side == 0 ? p.cur1 : p.cur2, dof, -h);
        const double fd = side == 0 ? (potential(sp, p.cur2) - potential(sm, p.cur2)) / (2.0 * h)
                                    : (potential(p.cur1, sp) - potential(p.cur1, sm)) / (2.0 * h);
        max_err = std::max(max_err, std::abs((side == 0 ? f1 : f2)(dof) - fd));
      }
    }
  }
  CHECK(max_err < 1e-5);

  // Rotational part at fully random states.
  max_err = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_pair(rng);
    const GeneralizedDeformation gap{positional_gap(p.cur1, p.cur2, p.ref),
                                     rotational_gap(p.cur1, p.cur2, p.ref)};
    const auto mult = penalty_multiplier(gap, eps_r, eps_t);
    const auto br = coupling_blocks_rotational(p.cur1, p.cur2, p.ref, mult.lambda_theta);
    const Vec6 f1 = br.Cq1l * mult.lambda_theta;
    const Vec6 f2 = br.Cq2l * mult.lambda_theta;

    const auto potential = [&](const CrossSectionState& s1, const CrossSectionState& s2) {
      return 0.5 * eps_t * rotational_gap(s1, s2, p.ref).squaredNorm();
    };
    for (int side = 0; side < 2; ++side) {
      for (int dof = 3; dof < 6; ++dof) {
        const auto sp = perturb_section(side == 0 ? p.cur1 : p.cur2, dof, h);
        const auto sm = perturb_section(side == 0 ? p.cur1 : p.cur2, dof, -h);
        const double fd = side == 0 ? (potential(sp, p.cur2) - potential(sm, p.cur2)) / (2.0 * h)
                                    : (potential(p.cur1, sp) - potential(p.cur1, sm)) / (2.0 * h);
        max_err = std::max(max_err, std::abs((side == 0 ? f1 : f2)(dof) - fd));
      }
    }
  }
  CHECK(max_err < 1e-5);
}

TEST_CASE("default penalty parameters") {
  const auto s1 = CrossSectionConstitutive::circular(1.0, 0.0, 0.05);
  auto [er, et] = default_penalties(s1, s1, 1.0);
  CHECK(er == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(et == doctest::Approx(1.25e-4).epsilon(1e-12));

  auto [er10, et10] = default_penalties(s1, s1, 10.0);
  CHECK(er10 == doctest::Approx(10.0 * er).epsilon(1e-15));
  CHECK(et10 == doctest::Approx(10.0 * et).epsilon(1e-15));

  const auto s2 = CrossSectionConstitutive::circular(3.0, 0.0, 0.1);
  const auto s3 = CrossSectionConstitutive::circular(1.0, 0.0, 0.1);
  auto [era, _] = default_penalties(s3, s2, 1.0);
  CHECK(era == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("closest-point projection") {
  // Perpendicular crossing at both midpoints.
  auto a = straight_element(1, 2.0);
  a.ref_positions = {Vec3(-1.0, 0.0, 0.0), Vec3(1.0, 0.0, 0.0)};
  auto b = straight_element(1, 2.0);
  b.ref_positions = {Vec3(0.0, 0.1, -1.0), Vec3(0.0, 0.1, 1.0)};
  b.ref_triads = {smallest_rotation_from_e1(Vec3::UnitZ()),
                  smallest_rotation_from_e1(Vec3::UnitZ())};
  const auto mid = closest_point_projection(a, b);
  CHECK(std::abs(mid.xi_a) < 1e-10);
  CHECK(std::abs(mid.xi_b) < 1e-10);
  CHECK(mid.distance == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(mid.angle == doctest::Approx(M_PI / 2).epsilon(1e-12));

  // Crossing at a shared endpoint.
  auto c = straight_element(1, 1.0);
  c.ref_positions = {Vec3(0.0, 0.0, 0.0), Vec3(1.0, 0.0, 0.0)};
  auto d = straight_element(1, 1.0);
  d.ref_positions = {Vec3(1.0, 0.0, 0.0), Vec3(1.0, 0.0, 1.0)};
  d.ref_triads = c.ref_triads;
  const auto corner = closest_point_projection(c, d);
  CHECK(corner.xi_a == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(corner.xi_b == doctest::Approx(-1.0).epsilon(1e-12));

  // Skew lines against the analytic foot points.
  const Vec3 c1(0.1, -0.2, 0.3), u1 = Vec3(1.0, 0.4, -0.2).normalized();
  const Vec3 c2(0.4, 0.5, -0.1), u2 = Vec3(-0.3, 1.0, 0.5).normalized();
  Eigen::Matrix2d m;
  m << u1.dot(u1), -u1.dot(u2), u1.dot(u2), -u2.dot(u2);
  const Eigen::Vector2d rhs((c2 - c1).dot(u1), (c2 - c1).dot(u2));
  const Eigen::Vector2d t = m.fullPivLu().solve(rhs);
  REQUIRE(std::abs(t(0)) < 0.8);
  REQUIRE(std::abs(t(1)) < 0.8);

  auto ea = straight_element(1, 2.0);
  ea.ref_positions = {c1 - u1, c1 + u1};
  ea.ref_triads = {smallest_rotation_from_e1(u1), smallest_rotation_from_e1(u1)};
  auto eb = straight_element(1, 2.0);
  eb.ref_positions = {c2 - u2, c2 + u2};
  eb.ref_triads = {smallest_rotation_from_e1(u2), smallest_rotation_from_e1(u2)};
  const auto skewed = closest_point_projection(ea, eb);
  CHECK(skewed.xi_a == doctest::Approx(t(0)).epsilon(1e-9));
  CHECK(skewed.xi_b == doctest::Approx(t(1)).epsilon(1e-9));

  // Nearly parallel lines: ill-posed.
  auto ep = straight_element(1, 2.0);
  ep.ref_positions = {Vec3(0.0, 0.05, 0.0), Vec3(2.0, 0.05 + 0.01, 0.0)};
  CHECK_THROWS_AS((void)closest_point_projection(a, ep), ProjectionError);
}
