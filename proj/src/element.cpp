#include "beamlink/element.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <numbers>

namespace beamlink {

void lagrange_shape(int n_nodes, double xi, double* values, double* derivatives) {
  std::array<double, 4> nodes{};
  for (int k = 0; k < n_nodes; ++k) nodes[k] = -1.0 + 2.0 * k / (n_nodes - 1);
  for (int k = 0; k < n_nodes; ++k) {
    double v = 1.0;
    double d = 0.0;
    for (int m = 0; m < n_nodes; ++m) {
      if (m == k) continue;
      const double w = 1.0 / (nodes[k] - nodes[m]);
      d = d * (xi - nodes[m]) * w + v * w;
      v *= (xi - nodes[m]) * w;
    }
    values[k] = v;
    derivatives[k] = d;
  }
}

namespace {
constexpr double kGp1[] = {0.0};
constexpr double kGw1[] = {2.0};
const double kGp2[] = {-1.0 / std::numbers::sqrt3, 1.0 / std::numbers::sqrt3};
constexpr double kGw2[] = {1.0, 1.0};
const double kGp3[] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
constexpr double kGw3[] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
const double kGp4[] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                       0.8611363115940526};
constexpr double kGw4[] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                           0.3478548451374538};
}  // namespace

std::span<const double> gauss_points(int n) {
  switch (n) {
    case 1:
      return {kGp1, 1};
    case 2:
      return {kGp2, 2};
    case 3:
      return {kGp3, 3};
    case 4:
      return {kGp4, 4};
  }
  throw ModelError("unsupported Gauss rule");
}

std::span<const double> gauss_weights(int n) {
  switch (n) {
    case 1:
      return {kGw1, 1};
    case 2:
      return {kGw2, 2};
    case 3:
      return {kGw3, 3};
    case 4:
      return {kGw4, 4};
  }
  throw ModelError("unsupported Gauss rule");
}

namespace {

template <int NN, typename S>
struct Nodes {
  std::array<Vec3T<S>, NN> r;
  std::array<Mat3T<S>, NN> lambda;
};

template <int NN, typename S>
struct SectionKinematics {
  Vec3T<S> r;
  Vec3T<S> r_xi;
  Vec3T<S> phi;     // interpolated relative rotation vector w.r.t. node 0
  Vec3T<S> phi_xi;  // its xi-derivative
  Mat3T<S> rel;     // exp(skew(phi))
  Mat3T<S> lambda;  // lambda_0 * rel
};

template <int NN, typename S>
SectionKinematics<NN, S> interpolate(const Nodes<NN, S>& nd, double xi) {
  double L[NN], dL[NN];
  lagrange_shape(NN, xi, L, dL);

  SectionKinematics<NN, S> out;
  out.r.setZero();
  out.r_xi.setZero();
  out.phi.setZero();
  out.phi_xi.setZero();

  const Mat3T<S> lam0_t = nd.lambda[0].transpose();
  for (int k = 0; k < NN; ++k) {
    out.r += L[k] * nd.r[k];
    out.r_xi += dL[k] * nd.r[k];
    if (k > 0) {
      const Vec3T<S> phi_k = log_so3(Mat3T<S>(lam0_t * nd.lambda[k]));
      if (value_of(phi_k.squaredNorm()) >= (M_PI - 1e-6) * (M_PI - 1e-6))
        throw SingularConfigurationError(
            "relative nodal rotation within an element reached pi; refine the mesh or cut the "
            "step");
      out.phi += L[k] * phi_k;
      out.phi_xi += dL[k] * phi_k;
    }
  }
  out.rel = exp_so3(out.phi);
  out.lambda = nd.lambda[0] * out.rel;
  return out;
}

// Material curvature per unit xi: axial(rel^T d(rel)/dxi).
template <int NN, typename S>
Vec3T<S> curvature_xi(const SectionKinematics<NN, S>& kin) {
  return Vec3T<S>(kin.rel.transpose() * (tangent_map_inverse(kin.phi) * kin.phi_xi));
}

template <int NN>
Nodes<NN, double> base_nodes(const BeamElement& e, std::span<const NodeState> st) {
  Nodes<NN, double> nd;
  for (int k = 0; k < NN; ++k) {
    nd.r[k] = st[k].r;
    nd.lambda[k] = e.node_triad(k, st[k]);
  }
  return nd;
}

template <int NN>
Nodes<NN, double> reference_nodes(const BeamElement& e) {
  Nodes<NN, double> nd;
  for (int k = 0; k < NN; ++k) {
    nd.r[k] = e.ref_positions[k];
    nd.lambda[k] = e.ref_triads[k];
  }
  return nd;
}

struct ReferenceGp {
  double xi = 0.0;
  double w = 0.0;
  double jac = 0.0;  // ds/dxi
  Vec3 gamma0 = Vec3::Zero();
  Vec3 kappa0 = Vec3::Zero();
};

template <int NN>
ReferenceGp reference_at(const BeamElement& e, double xi, double w) {
  const auto nd = reference_nodes<NN>(e);
  const auto kin = interpolate(nd, xi);
  ReferenceGp ref;
  ref.xi = xi;
  ref.w = w;
  ref.jac = kin.r_xi.norm();
  if (ref.jac <= 1e-14) throw ModelError("beam element has zero reference length");
  ref.gamma0 = kin.lambda.transpose() * kin.r_xi / ref.jac;
  ref.kappa0 = curvature_xi(kin) / ref.jac;
  return ref;
}

template <int NN, typename S>
S energy_kernel(const BeamElement& e, const Nodes<NN, S>& nd,
                std::span<const ReferenceGp> ref_gps) {
  const Vec3 cf = e.section.force_stiffness();
  const Vec3 cm = e.section.moment_stiffness();
  S energy(0.0);
  for (const auto& ref : ref_gps) {
    const auto kin = interpolate(nd, ref.xi);
    const Vec3T<S> gamma =
        Vec3T<S>(kin.lambda.transpose() * kin.r_xi / ref.jac) - ref.gamma0.template cast<S>();
    const Vec3T<S> kappa =
        Vec3T<S>(curvature_xi(kin) / ref.jac) - ref.kappa0.template cast<S>();
    S density(0.0);
    for (int c = 0; c < 3; ++c)
      density += cf(c) * gamma(c) * gamma(c) + cm(c) * kappa(c) * kappa(c);
    energy += (0.5 * ref.w * ref.jac) * density;
  }
  return energy;
}

template <int NN>
std::array<ReferenceGp, NN - 1> reduced_reference_gps(const BeamElement& e) {
  // Reduced quadrature: p points for order p.
  constexpr int ngp = NN - 1;
  const auto pts = gauss_points(ngp);
  const auto wts = gauss_weights(ngp);
  std::array<ReferenceGp, ngp> out;
  for (int g = 0; g < ngp; ++g) out[g] = reference_at<NN>(e, pts[g], wts[g]);
  return out;
}

template <int NN>
double energy_impl(const BeamElement& e, std::span<const NodeState> st) {
  const auto ref = reduced_reference_gps<NN>(e);
  return energy_kernel(e, base_nodes<NN>(e, st), std::span<const ReferenceGp>(ref));
}

template <int NN>
ElemVec force_impl(const BeamElement& e, std::span<const NodeState> st) {
  constexpr int ND = 6 * NN;
  using S = Dual<double, ND>;
  const auto base = base_nodes<NN>(e, st);
  Nodes<NN, S> nd;
  for (int k = 0; k < NN; ++k) {
    for (int c = 0; c < 3; ++c) nd.r[k](c) = S::seeded(base.r[k](c), 6 * k + c);
    Vec3T<S> theta;
    for (int c = 0; c < 3; ++c) theta(c) = S::seeded(0.0, 6 * k + 3 + c);
    nd.lambda[k] = exp_so3(theta) * base.lambda[k].template cast<S>();
  }
  const auto ref = reduced_reference_gps<NN>(e);
  const S en = energy_kernel(e, nd, std::span<const ReferenceGp>(ref));
  ElemVec out(ND);
  for (int j = 0; j < ND; ++j) out(j) = en.deriv[j];
  return out;
}

template <int NN>
std::pair<ElemVec, ElemMat> force_tangent_impl(const BeamElement& e,
                                               std::span<const NodeState> st) {
  constexpr int ND = 6 * NN;
  using In = Dual<double, ND>;
  using Out = Dual<In, ND>;
  const auto base = base_nodes<NN>(e, st);

  // Inner seeds (eta) provide the gradient, outer seeds (eps) the state
  // perturbation the gradient is differentiated against. Triads compose as
  // exp(skew(eta)) exp(skew(eps)) lambda, matching a fresh multiplicative
  // variation taken at the updated state.
  Nodes<NN, Out> nd;
  for (int k = 0; k < NN; ++k) {
    for (int c = 0; c < 3; ++c) {
      const int j = 6 * k + c;
      Out x(In(base.r[k](c)));
      x = x + Out(In::seeded(0.0, j));
      x = x + Out::seeded(In(0.0), j);
      nd.r[k](c) = x;
    }
    Vec3T<Out> eta, eps;
    for (int c = 0; c < 3; ++c) {
      const int j = 6 * k + 3 + c;
      eta(c) = Out(In::seeded(0.0, j));
      eps(c) = Out::seeded(In(0.0), j);
    }
    nd.lambda[k] = exp_so3(eta) * exp_so3(eps) * base.lambda[k].template cast<Out>();
  }

  const auto ref = reduced_reference_gps<NN>(e);
  const Out en = energy_kernel(e, nd, std::span<const ReferenceGp>(ref));

  ElemVec r(ND);
  ElemMat K(ND, ND);
  for (int j = 0; j < ND; ++j) {
    r(j) = en.value.deriv[j];
    for (int k = 0; k < ND; ++k) K(j, k) = en.deriv[k].deriv[j];
  }
  return {r, K};
}

template <int NN>
KinematicMaps kinematic_maps_impl(const BeamElement& e, std::span<const NodeState> st, double xi) {
  constexpr int ND = 6 * NN;
  using In = Dual<double, ND>;
  using Out = Dual<In, ND>;
  const auto base = base_nodes<NN>(e, st);

  Nodes<NN, Out> nd;
  for (int k = 0; k < NN; ++k) {
    for (int c = 0; c < 3; ++c) {
      const int j = 6 * k + c;
      Out x(In(base.r[k](c)));
      x = x + Out(In::seeded(0.0, j));
      x = x + Out::seeded(In(0.0), j);
      nd.r[k](c) = x;
    }
    Vec3T<Out> eta, eps;
    for (int c = 0; c < 3; ++c) {
      const int j = 6 * k + 3 + c;
      eta(c) = Out(In::seeded(0.0, j));
      eps(c) = Out::seeded(In(0.0), j);
    }
    nd.lambda[k] = exp_so3(eta) * exp_so3(eps) * base.lambda[k].template cast<Out>();
  }

  const auto kin = interpolate(nd, xi);

  // Value and derivative slices of the interpolated triad:
  //   B      = Lambda at (eta=0, eps=0),       dB[k]  = d Lambda / d eps_k,
  //   A[j]   = d Lambda / d eta_j,             dA[j][k] = mixed second derivative.
  Mat3 B;
  std::array<Mat3, ND> dB, A;
  std::array<std::array<Mat3, ND>, ND> dA;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const Out& x = kin.lambda(a, b);
      B(a, b) = x.value.value;
      for (int k = 0; k < ND; ++k) {
        dB[k](a, b) = x.deriv[k].value;
        A[k](a, b) = x.value.deriv[k];
        for (int j = 0; j < ND; ++j) dA[j][k](a, b) = x.deriv[k].deriv[j];
      }
    }
  }

  KinematicMaps maps;
  maps.H.resize(6, ND);
  for (int j = 0; j < ND; ++j) {
    for (int c = 0; c < 3; ++c) maps.H(c, j) = kin.r(c).value.deriv[j];
    maps.H.col(j).template tail<3>() = axial(Mat3(A[j] * B.transpose()));
  }
  maps.N = maps.H;

  // Spin rows of H at the eps-updated state, differentiated in eps. The
  // position rows are linear in the DOFs and do not contribute.
  auto dH_spin = std::make_shared<std::vector<Vec3>>(static_cast<size_t>(ND) * ND);
  for (int j = 0; j < ND; ++j)
    for (int k = 0; k < ND; ++k)
      (*dH_spin)[static_cast<size_t>(j) * ND + k] =
          axial(Mat3(dA[j][k] * B.transpose() + A[j] * dB[k].transpose()));

  maps.h_delta = [dH_spin, ND = ND](const Vec6& f) {
    ElemMat out(ND, ND);
    const Vec3 moment = f.tail<3>();
    for (int j = 0; j < ND; ++j)
      for (int k = 0; k < ND; ++k)
        out(j, k) = (*dH_spin)[static_cast<size_t>(j) * ND + k].dot(moment);
    return out;
  };
  return maps;
}

template <int NN>
ElemMap variation_map_impl(const BeamElement& e, std::span<const NodeState> st, double xi) {
  constexpr int ND = 6 * NN;
  using S = Dual<double, ND>;
  const auto base = base_nodes<NN>(e, st);
  Nodes<NN, S> nd;
  for (int k = 0; k < NN; ++k) {
    for (int c = 0; c < 3; ++c) nd.r[k](c) = S::seeded(base.r[k](c), 6 * k + c);
    Vec3T<S> theta;
    for (int c = 0; c < 3; ++c) theta(c) = S::seeded(0.0, 6 * k + 3 + c);
    nd.lambda[k] = exp_so3(theta) * base.lambda[k].template cast<S>();
  }
  const auto kin = interpolate(nd, xi);

  Mat3 lam0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) lam0(a, b) = kin.lambda(a, b).value;

  ElemMap h(6, ND);
  Mat3 dlam;
  for (int j = 0; j < ND; ++j) {
    for (int c = 0; c < 3; ++c) h(c, j) = kin.r(c).deriv[j];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) dlam(a, b) = kin.lambda(a, b).deriv[j];
    h.col(j).template tail<3>() = axial(Mat3(dlam * lam0.transpose()));
  }
  return h;
}

template <int NN>
SectionStrains strains_impl(const BeamElement& e, std::span<const NodeState> st, double xi) {
  const auto ref = reference_at<NN>(e, xi, 0.0);
  const auto kin = interpolate(base_nodes<NN>(e, st), xi);
  SectionStrains out;
  out.gamma = kin.lambda.transpose() * kin.r_xi / ref.jac - ref.gamma0;
  out.kappa = curvature_xi(kin) / ref.jac - ref.kappa0;
  return out;
}

template <typename F>
auto dispatch_order(int order, F&& f) {
  switch (order) {
    case 1:
      return f(std::integral_constant<int, 2>{});
    case 2:
      return f(std::integral_constant<int, 3>{});
    case 3:
      return f(std::integral_constant<int, 4>{});
  }
  throw ModelError("beam element order must be 1, 2 or 3");
}

void check_xi(double xi) {
  if (!(xi >= -1.0 - 1e-12 && xi <= 1.0 + 1e-12))
    throw ModelError("cross-section coordinate xi outside [-1, 1]");
}

void check_count(const BeamElement& e, std::span<const NodeState> st) {
  if (static_cast<int>(st.size()) != e.n_nodes())
    throw ModelError("nodal state count does not match element order");
}

}  // namespace

void BeamElement::validate() const {
  if (order < 1 || order > 3) throw ModelError("beam element order must be 1, 2 or 3");
  const auto nn = static_cast<size_t>(order + 1);
  if (node_ids.size() != nn || ref_positions.size() != nn || ref_triads.size() != nn)
    throw ModelError("beam element node data does not match its order");
  if (!dof_offsets.empty() && dof_offsets.size() != nn)
    throw ModelError("dof_offsets must be empty or one entry per node");
  section.validate();
  for (const auto& t : ref_triads)
    if (!is_rotation(t, 1e-9)) throw ModelError("element reference triad is not a rotation");

  // Zero-length detection via the centerline Jacobian at the quadrature points.
  dispatch_order(order, [&](auto nn_c) {
    constexpr int NN = decltype(nn_c)::value;
    (void)reduced_reference_gps<NN>(*this);
    return 0;
  });

  // For straight elements the first director must be tangent to the
  // centerline (within 1e-6 rad). Curved elements are exempt.
  const Vec3 chord = ref_positions.back() - ref_positions.front();
  bool straight = true;
  for (size_t k = 0; k + 1 < ref_positions.size(); ++k) {
    const Vec3 seg = ref_positions[k + 1] - ref_positions[k];
    if (seg.cross(chord).norm() > 1e-12 * chord.squaredNorm()) straight = false;
  }
  if (straight) {
    const Vec3 t = chord.normalized();
    for (const auto& triad : ref_triads) {
      const Vec3 d1 = triad.col(0);
      if (d1.cross(t).norm() > 1e-6 || d1.dot(t) < 0.0)
        throw ModelError("straight element: first director not aligned with the centerline");
    }
  }
}

CrossSectionState evaluate_cross_section(const BeamElement& element,
                                         std::span<const NodeState> nodal_states, double xi) {
  check_xi(xi);
  check_count(element, nodal_states);
  return dispatch_order(element.order, [&](auto nn_c) {
    constexpr int NN = decltype(nn_c)::value;
    const auto kin = interpolate(base_nodes<NN>(element, nodal_states), xi);
    return CrossSectionState{kin.r, kin.lambda};
  });
}

KinematicMaps kinematic_maps(const BeamElement& element, std::span<const NodeState> nodal_states,
                             double xi) {
  check_xi(xi);
  check_count(element, nodal_states);
  return dispatch_order(element.order, [&](auto nn_c) {
    constexpr int NN = decltype(nn_c)::value;
    return kinematic_maps_impl<NN>(element, nodal_states, xi);
  });
}

ElemMap variation_map(const BeamElement& element, std::span<const NodeState> nodal_states,
                      double xi) {
  check_xi(xi);
  check_count(element, nodal_states);
  return dispatch_order(element.order, [&](auto nn_c) {
    constexpr int NN = decltype(nn_c)::value;
    return variation_map_impl<NN>(element, nodal_states, xi);
  });
}

SectionStrains section_strains(const BeamElement& element, std::span<const NodeState> nodal_states,
                               double xi) {
  check_xi(xi);
  check_count(element, nodal_states);
  return dispatch_order(element.order, [&](auto nn_c) {
    constexpr int NN = decltype(nn_c)::value;
    return strains_impl<NN>(element, nodal_states, xi);
  });
}

double elastic_energy(const BeamElement& element, std::span<const NodeState> nodal_states) {
  check_count(element, nodal_states);
  return dispatch_order(element.order, [&](auto nn_c) {
    constexpr int NN = decltype(nn_c)::value;
    return energy_impl<NN>(element, nodal_states);
  });
}

ElemVec internal_force(const BeamElement& element, std::span<const NodeState> nodal_states) {
  check_count(element, nodal_states);
  return dispatch_order(element.order, [&](auto nn_c) {
    constexpr int NN = decltype(nn_c)::value;
    return force_impl<NN>(element, nodal_states);
  });
}

std::pair<ElemVec, ElemMat> internal_force_and_tangent(const BeamElement& element,
                                                       std::span<const NodeState> nodal_states) {
  check_count(element, nodal_states);
  return dispatch_order(element.order, [&](auto nn_c) {
    constexpr int NN = decltype(nn_c)::value;
    return force_tangent_impl<NN>(element, nodal_states);
  });
}

}  // namespace beamlink
