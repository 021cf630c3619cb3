#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "beamlink/so3.hpp"

using namespace beamlink;

namespace {

std::mt19937 make_rng(unsigned seed) { return std::mt19937(seed); }

Vec3 random_vec(std::mt19937& rng, double max_norm) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec3 v(u(rng), u(rng), u(rng));
  const double n = v.norm();
  if (n < 1e-12) return Vec3(max_norm / 2.0, 0.0, 0.0);
  std::uniform_real_distribution<double> mag(1e-6, max_norm);
  return v / n * mag(rng);
}

Mat3 random_rotation(std::mt19937& rng, double max_angle = 0.99 * M_PI) {
  return exp_so3<double>(random_vec(rng, max_angle));
}

}  // namespace

TEST_CASE("skew operator") {
  CHECK(skew<double>(Vec3::Zero()).isZero(0.0));
  CHECK((skew<double>(Vec3::UnitX()) * Vec3::UnitY() - Vec3::UnitZ()).norm() == 0.0);

  auto rng = make_rng(101);
  double max_err = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Vec3 a = random_vec(rng, 3.0);
    const Vec3 b = random_vec(rng, 3.0);
    max_err = std::max(max_err, (skew<double>(a) * b - a.cross(b)).norm());
    max_err = std::max(max_err, (skew<double>(a).transpose() + skew<double>(a)).norm());
  }
  CHECK(max_err < 1e-15);
}

TEST_CASE("exponential map") {
  CHECK((exp_so3<double>(Vec3::Zero()) - Mat3::Identity()).norm() == 0.0);

  const Mat3 half_turn = exp_so3<double>(Vec3(M_PI, 0.0, 0.0));
  Mat3 expected;
  expected << 1, 0, 0, 0, -1, 0, 0, 0, -1;
  CHECK((half_turn - expected).norm() < 1e-15);

  auto rng = make_rng(102);
  double max_invariant = 0.0, max_axis = 0.0;
  for (int i = 0; i < 500; ++i) {
    const Vec3 psi = random_vec(rng, 0.999 * M_PI);
    const Mat3 m = exp_so3<double>(psi);
    max_invariant = std::max(max_invariant, ((m.transpose() * m) - Mat3::Identity()).norm());
    max_invariant = std::max(max_invariant, std::abs(m.determinant() - 1.0));
    max_axis = std::max(max_axis, (m * psi - psi).norm());
    CHECK(is_rotation(m));
  }
  CHECK(max_invariant < 1e-12);
  CHECK(max_axis < 1e-12);
}

TEST_CASE("exp/log round trip") {
  auto rng = make_rng(103);
  double max_err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 psi = random_vec(rng, 0.9999 * M_PI);
    const Vec3 back = log_so3<double>(exp_so3<double>(psi));
    max_err = std::max(max_err, (back - psi).norm());
  }
  CHECK(max_err < 1e-10);
}

TEST_CASE("logarithm map") {
  CHECK(log_so3<double>(Mat3::Identity()).norm() == 0.0);

  Mat3 half_turn;
  half_turn << 1, 0, 0, 0, -1, 0, 0, 0, -1;
  const Vec3 psi = log_so3<double>(half_turn);
  CHECK(psi.norm() == doctest::Approx(M_PI).epsilon(1e-14));
  // Deterministic sign at pi: first nonzero component positive.
  CHECK(psi(0) == doctest::Approx(M_PI).epsilon(1e-14));

  Mat3 half_turn_z;
  half_turn_z << -1, 0, 0, 0, -1, 0, 0, 0, 1;
  const Vec3 psi_z = log_so3<double>(half_turn_z);
  CHECK(psi_z(2) == doctest::Approx(M_PI).epsilon(1e-14));

  double max_err = 0.0;
  auto rng = make_rng(104);
  for (int i = 0; i < 500; ++i) {
    const Mat3 m = random_rotation(rng);
    const Vec3 v = log_so3<double>(m);
    CHECK(v.norm() <= M_PI + 1e-12);
    max_err = std::max(max_err, (exp_so3<double>(v) - m).norm());
  }
  CHECK(max_err < 1e-10);
}

TEST_CASE("log near pi stays accurate") {
  auto rng = make_rng(105);
  double max_err = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Vec3 axis = random_vec(rng, 1.0).normalized();
    const double angle = M_PI - 1e-9 * (i + 1);
    const Vec3 psi = angle * axis;
    max_err = std::max(max_err, (log_so3<double>(exp_so3<double>(psi)) - psi).norm());
  }
  CHECK(max_err < 1e-9);
}

TEST_CASE("tangent map closed form") {
  CHECK((tangent_map<double>(Vec3::Zero()) - Mat3::Identity()).norm() == 0.0);

  auto rng = make_rng(106);
  double max_err = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Vec3 psi = random_vec(rng, 0.9 * M_PI);
    const Vec3 dtheta = random_vec(rng, 1.0);
    const double eps = 1e-7;
    const Vec3 plus = log_so3<double>(exp_so3<double>(Vec3(eps * dtheta)) * exp_so3<double>(psi));
    const Vec3 minus =
        log_so3<double>(exp_so3<double>(Vec3(-eps * dtheta)) * exp_so3<double>(psi));
    const Vec3 fd = (plus - minus) / (2.0 * eps);
    const Vec3 analytic = tangent_map<double>(psi) * dtheta;
    max_err = std::max(max_err, (fd - analytic).norm() / analytic.norm());
    // The rotation axis is an eigenvector with unit eigenvalue.
    max_err = std::max(max_err, (tangent_map<double>(psi) * psi - psi).norm() / psi.norm());
  }
  CHECK(max_err < 1e-5);
}

TEST_CASE("tangent map inverse and conditioning") {
  auto rng = make_rng(107);
  double max_err = 0.0, max_cond = 0.0;
  for (int i = 0; i < 500; ++i) {
    const Vec3 psi = random_vec(rng, 0.99 * M_PI);
    const Mat3 t = tangent_map<double>(psi);
    const Mat3 tinv = tangent_map_inverse<double>(psi);
    max_err = std::max(max_err, (t * tinv - Mat3::Identity()).norm());
    max_cond = std::max(max_cond, t.norm() * tinv.norm());
  }
  CHECK(max_err < 1e-12);
  CHECK(max_cond < 1e3);
}

TEST_CASE("large-rotation transport identities") {
  auto rng = make_rng(108);
  double e_t = 0.0, e_s = 0.0, e_neg = 0.0, e_q = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 psi = random_vec(rng, 0.99 * M_PI);
    const Mat3 lambda = random_rotation(rng);
    const Mat3 q = random_rotation(rng);

    e_t = std::max(e_t, (lambda * tangent_map<double>(psi) * lambda.transpose() -
                         tangent_map<double>(Vec3(lambda * psi)))
                            .norm());
    e_s = std::max(
        e_s,
        (lambda * skew<double>(psi) * lambda.transpose() - skew<double>(Vec3(lambda * psi)))
            .norm());
    e_neg = std::max(
        e_neg, (log_so3<double>(lambda) + log_so3<double>(Mat3(lambda.transpose()))).norm());
    e_q = std::max(e_q, (log_so3<double>(Mat3(q * lambda * q.transpose())) -
                         q * log_so3<double>(lambda))
                            .norm());
  }
  CHECK(e_t < 1e-12);
  CHECK(e_s < 1e-12);
  CHECK(e_neg < 1e-12);
  CHECK(e_q < 1e-12);
}

TEST_CASE("relative rotation") {
  auto rng = make_rng(109);
  const Mat3 l = random_rotation(rng);
  CHECK((relative_rotation(l, l) - Mat3::Identity()).norm() < 1e-15);
  CHECK((relative_rotation(Mat3(Mat3::Identity()), l) - l).norm() == 0.0);

  // The relative rotation vector is not the difference of rotation vectors.
  int distinct = 0;
  for (int i = 0; i < 100; ++i) {
    Vec3 psi1 = random_vec(rng, 2.5);
    Vec3 psi2 = random_vec(rng, 2.5);
    if (psi1.norm() < 0.1) psi1 *= 0.2 / psi1.norm();
    if (psi2.norm() < 0.1) psi2 *= 0.2 / psi2.norm();
    if (psi1.cross(psi2).norm() < 0.05 * psi1.norm() * psi2.norm()) continue;
    const Vec3 rel =
        log_so3<double>(relative_rotation(exp_so3<double>(psi1), exp_so3<double>(psi2)));
    if ((rel - (psi2 - psi1)).norm() > 1e-6) ++distinct;
  }
  CHECK(distinct > 90);
}

TEST_CASE("small-angle branches join smoothly") {
  for (const double angle : {1e-9, 1e-7, 9.9e-5, 1.01e-4, 1e-3, 9e-3, 1.1e-2}) {
    const Vec3 psi = angle * Vec3(0.6, -0.48, 0.64).normalized();
    // Round trip and inverse consistency across the series thresholds.
    CHECK((log_so3<double>(exp_so3<double>(psi)) - psi).norm() < 1e-14);
    CHECK((tangent_map<double>(psi) * tangent_map_inverse<double>(psi) - Mat3::Identity())
              .norm() < 1e-14);
  }
}

TEST_CASE("dual numbers propagate through the kernels") {
  using S = Dual<double, 3>;
  auto rng = make_rng(110);
  double max_err = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Vec3 psi0 = random_vec(rng, 2.5);
    const Mat3 base = random_rotation(rng);

    // f(theta) = log(exp(skew(theta)) * base): dual derivative vs central FD.
    Vec3T<S> theta;
    for (int c = 0; c < 3; ++c) theta(c) = S::seeded(0.0, c);
    const Vec3T<S> f = log_so3(Mat3T<S>(exp_so3(theta) * base.cast<S>()));
    (void)psi0;

    const double h = 1e-6;
    for (int c = 0; c < 3; ++c) {
      Vec3 dt = Vec3::Zero();
      dt(c) = h;
      const Vec3 fp = log_so3<double>(Mat3(exp_so3<double>(dt) * base));
      const Vec3 fm = log_so3<double>(Mat3(exp_so3<double>(Vec3(-dt)) * base));
      const Vec3 fd = (fp - fm) / (2.0 * h);
      for (int a = 0; a < 3; ++a)
        max_err = std::max(max_err, std::abs(f(a).deriv[c] - fd(a)));
    }
  }
  CHECK(max_err < 1e-8);

  // Second derivatives through nested duals vs FD of the dual first derivative.
  using In = Dual<double, 3>;
  using Out = Dual<In, 3>;
  const Mat3 base = random_rotation(rng);
  Vec3T<Out> theta;
  for (int c = 0; c < 3; ++c) {
    theta(c) = Out(In::seeded(0.0, c));
    theta(c) = theta(c) + Out::seeded(In(0.0), c);
  }
  const Vec3T<Out> f = log_so3(Mat3T<Out>(exp_so3(theta) * base.cast<Out>()));
  const double h = 1e-6;
  double max_err2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    Vec3 dt = Vec3::Zero();
    dt(k) = h;
    Vec3T<In> tp, tm;
    for (int c = 0; c < 3; ++c) {
      tp(c) = In::seeded(c == k ? h : 0.0, c);
      tm(c) = In::seeded(c == k ? -h : 0.0, c);
    }
    const Vec3T<In> fp = log_so3(Mat3T<In>(exp_so3(tp) * base.cast<In>()));
    const Vec3T<In> fm = log_so3(Mat3T<In>(exp_so3(tm) * base.cast<In>()));
    for (int a = 0; a < 3; ++a)
      for (int j = 0; j < 3; ++j)
        max_err2 = std::max(max_err2, std::abs(f(a).deriv[k].deriv[j] -
                                               (fp(a).deriv[j] - fm(a).deriv[j]) / (2.0 * h)));
  }
  CHECK(max_err2 < 1e-8);
}
