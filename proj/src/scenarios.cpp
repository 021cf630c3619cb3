#include "beamlink/scenarios.hpp"

#include <cmath>
#include <limits>

namespace beamlink {

namespace {

constexpr double kLoadMagnitude = 5e-6;

Mat3 frame_from_tangent(const Vec3& tangent, const Vec3& second_seed) {
  const Vec3 g1 = tangent.normalized();
  Vec3 g2 = second_seed - second_seed.dot(g1) * g1;
  if (g2.norm() < 1e-12) throw ModelError("degenerate frame seed");
  g2.normalize();
  Mat3 f;
  f.col(0) = g1;
  f.col(1) = g2;
  f.col(2) = g1.cross(g2);
  return f;
}

}  // namespace

Model generate_l_shape(const LShapeOptions& opt) {
  if (opt.elements_per_beam < 1) throw ModelError("need at least one element per beam");
  if (opt.offset < 0.0) throw ModelError("offset must be non-negative");
  if (opt.nodal_connection && opt.offset != 0.0)
    throw ModelError("nodal connection requires zero offset");
  if (opt.nodal_connection && opt.connector_stiffness > 0.0)
    throw ModelError("choose either a nodal connection or a connector beam");
  if (opt.connector_stiffness > 0.0 && opt.offset <= 0.0)
    throw ModelError("a connector beam requires a non-zero offset");

  const double length = 1.0;
  const int n = opt.elements_per_beam;
  const Mat3 frame_e3 = smallest_rotation_from_e1(Vec3::UnitZ());

  Model m;
  m.materials.push_back({0, 1.0, 0.0, 0.05, 1.0});

  // Beam A-B along e1: nodes 0..n.
  for (int k = 0; k <= n; ++k)
    m.nodes.push_back({k, Vec3(length * k / n, 0.0, 0.0), Mat3::Identity(), true});
  // Beam C-D along e3: nodes n+1..2n+1.
  const Vec3 p_c(length, opt.offset, 0.0);
  for (int k = 0; k <= n; ++k) {
    const Mat3 triad = opt.nodal_connection ? Mat3::Identity() : frame_e3;
    m.nodes.push_back({n + 1 + k, p_c + Vec3(0.0, 0.0, length * k / n), triad, true});
  }

  for (int k = 0; k < n; ++k) m.element_specs.push_back({k, 0, {k, k + 1}});
  for (int k = 0; k < n; ++k)
    m.element_specs.push_back({n + k, 0, {n + 1 + k, n + 2 + k}});

  if (opt.nodal_connection) {
    m.merge_nodes(n, n + 1);
  } else if (opt.connector_stiffness > 0.0) {
    m.materials.push_back({1, opt.connector_stiffness * 1.0, 0.0, 0.05, 1.0});
    m.element_specs.push_back({2 * n, 1, {n, n + 1}});
  } else {
    CouplingSpec c;
    c.elem_a = n - 1;
    c.elem_b = n;
    c.xi_a = 1.0;
    c.xi_b = -1.0;
    c.enforcement = opt.enforcement;
    c.penalty_scale = opt.penalty_scale;
    m.couplings.push_back(c);
  }

  DirichletBC clamp;
  clamp.node = 0;
  clamp.mask = {true, true, true, true, true, true};
  m.dirichlet.push_back(clamp);

  PointLoad tip;
  tip.node = 2 * n + 1;
  tip.force = Vec3(0.0, kLoadMagnitude, 0.0);
  tip.moment = Vec3(0.0, 0.0, kLoadMagnitude);
  m.loads.push_back(tip);

  m.monitor_node = 2 * n + 1;
  m.settings.load_steps = 10;
  m.build();
  return m;
}

Model generate_crossed_beams(const CrossedBeamsOptions& opt) {
  if (opt.elements_per_beam < 1) throw ModelError("need at least one element per beam");
  const double length = 2.0;
  const double offset = 0.1;  // 2R
  const int n = opt.elements_per_beam;
  const Mat3 frame_e3 = smallest_rotation_from_e1(Vec3::UnitZ());

  Model m;
  m.materials.push_back({0, 1.0, 0.0, 0.05, 1.0});

  // Beam 1 along e1 from the origin, beam 2 along e3 through (1, a, 0).
  for (int k = 0; k <= n; ++k)
    m.nodes.push_back({k, Vec3(length * k / n, 0.0, 0.0), Mat3::Identity(), true});
  for (int k = 0; k <= n; ++k)
    m.nodes.push_back(
        {n + 1 + k, Vec3(1.0, offset, -1.0 + length * k / n), frame_e3, true});

  for (int k = 0; k < n; ++k) m.element_specs.push_back({k, 0, {k, k + 1}});
  for (int k = 0; k < n; ++k)
    m.element_specs.push_back({n + k, 0, {n + 1 + k, n + 2 + k}});

  // Elements adjacent to the midpoints; the projection lands on the shared
  // node (even n) or the element midpoint (odd n).
  CouplingSpec c;
  c.elem_a = n % 2 == 0 ? n / 2 - 1 : (n - 1) / 2;
  c.elem_b = n + (n % 2 == 0 ? n / 2 : (n - 1) / 2);
  c.auto_xi = true;
  c.enforcement = opt.enforcement;
  c.penalty_scale = opt.penalty_scale;
  m.couplings.push_back(c);

  DirichletBC clamp;
  clamp.node = 0;
  clamp.mask = {true, true, true, true, true, true};
  m.dirichlet.push_back(clamp);

  PointLoad tip;
  tip.node = 2 * n + 1;
  tip.force = Vec3(0.0, kLoadMagnitude, 0.0);
  tip.moment = Vec3(0.0, 0.0, kLoadMagnitude);
  m.loads.push_back(tip);

  m.monitor_node = 2 * n + 1;
  m.settings.load_steps = 10;
  m.build();
  return m;
}

WireCylinderModel generate_wire_cylinder(const WireCylinderOptions& opt) {
  if (opt.n_axi < 4 || opt.n_axi % 2 != 0) throw ModelError("n_axi must be even and >= 4");
  if (opt.n_circ < 1) throw ModelError("n_circ must be >= 1");
  if (opt.elements_per_ring < 3 || opt.elements_per_axial < 1)
    throw ModelError("too few elements for the cylinder fibers");
  if (opt.order < 1 || opt.order > 3) throw ModelError("element order must be 1, 2 or 3");

  const double d = 2.0;
  const double fiber_radius = 0.04;
  const double a = M_PI * d / opt.n_axi;
  const double b = a * opt.n_circ;

  WireCylinderModel out;
  Model& m = out.model;
  m.materials.push_back({0, 1.0, 0.0, fiber_radius, 1.0});

  int next_node = 0;
  int next_elem = 0;

  // Axial fibers i = 1..n_axi: radius d/2 - (-1)^i R sin(pi z / a) at
  // azimuth 2 pi i / n_axi.
  const auto axial_point = [&](int i, double z) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    const double az = i * 2.0 * M_PI / opt.n_axi;
    const Vec3 e_r(std::cos(az), std::sin(az), 0.0);
    const double rho = 0.5 * d - sign * fiber_radius * std::sin(M_PI * z / a);
    const double drho = -sign * fiber_radius * (M_PI / a) * std::cos(M_PI * z / a);
    return std::make_pair(Vec3(rho * e_r + z * Vec3::UnitZ()),
                          Vec3(drho * e_r + Vec3::UnitZ()));
  };

  for (int i = 1; i <= opt.n_axi; ++i) {
    const int nodes_per_fiber = opt.order * opt.elements_per_axial + 1;
    const int first = next_node;
    const double az = i * 2.0 * M_PI / opt.n_axi;
    const Vec3 e_r(std::cos(az), std::sin(az), 0.0);
    for (int j = 0; j < nodes_per_fiber; ++j) {
      const double z = b * j / (nodes_per_fiber - 1);
      const auto [p, t] = axial_point(i, z);
      m.nodes.push_back({next_node++, p, frame_from_tangent(t, e_r), true});
    }
    for (int e = 0; e < opt.elements_per_axial; ++e) {
      ElementSpec spec;
      spec.id = next_elem++;
      spec.material = 0;
      for (int k = 0; k <= opt.order; ++k) spec.node_ids.push_back(first + opt.order * e + k);
      m.element_specs.push_back(spec);
    }
    out.bottom_nodes.push_back(first);
    out.top_nodes.push_back(first + nodes_per_fiber - 1);
  }
  const int axial_elems = next_elem;

  // Circumferential rings i = 1..n_circ at height a (i - 1/2): radius
  // d/2 - (-1)^i R cos(phi n_axi / 2), closed loops.
  const auto ring_point = [&](int i, double phi) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    const double z = a * (i - 0.5);
    const Vec3 e_r(std::cos(phi), std::sin(phi), 0.0);
    const Vec3 e_phi(-std::sin(phi), std::cos(phi), 0.0);
    const double rho = 0.5 * d - sign * fiber_radius * std::cos(phi * opt.n_axi / 2.0);
    const double drho = sign * fiber_radius * (opt.n_axi / 2.0) * std::sin(phi * opt.n_axi / 2.0);
    return std::make_pair(Vec3(rho * e_r + z * Vec3::UnitZ()), Vec3(drho * e_r + rho * e_phi));
  };

  std::vector<int> ring_first(opt.n_circ + 1, 0);
  for (int i = 1; i <= opt.n_circ; ++i) {
    const int nodes_per_ring = opt.order * opt.elements_per_ring;
    const int first = next_node;
    ring_first[i] = first;
    for (int j = 0; j < nodes_per_ring; ++j) {
      const double phi = 2.0 * M_PI * j / nodes_per_ring;
      const auto [p, t] = ring_point(i, phi);
      const Vec3 e_r(std::cos(phi), std::sin(phi), 0.0);
      m.nodes.push_back({next_node++, p, frame_from_tangent(t, e_r), true});
    }
    for (int e = 0; e < opt.elements_per_ring; ++e) {
      ElementSpec spec;
      spec.id = next_elem++;
      spec.material = 0;
      for (int k = 0; k <= opt.order; ++k)
        spec.node_ids.push_back(first + (opt.order * e + k) % nodes_per_ring);
      m.element_specs.push_back(spec);
    }
  }

  // One coupling per fiber intersection, located by projection.
  for (int ic = 1; ic <= opt.n_circ; ++ic) {
    for (int ia = 1; ia <= opt.n_axi; ++ia) {
      const double z_star = a * (ic - 0.5);
      const double phi_star = ia * 2.0 * M_PI / opt.n_axi;
      int axial_elem = static_cast<int>(z_star / b * opt.elements_per_axial);
      axial_elem = std::min(axial_elem, opt.elements_per_axial - 1);
      int ring_elem =
          static_cast<int>(phi_star / (2.0 * M_PI) * opt.elements_per_ring) %
          opt.elements_per_ring;
      CouplingSpec c;
      c.elem_a = (ia - 1) * opt.elements_per_axial + axial_elem;
      c.elem_b = axial_elems + (ic - 1) * opt.elements_per_ring + ring_elem;
      c.auto_xi = true;
      c.enforcement = opt.enforcement;
      c.penalty_scale = opt.penalty_scale;
      m.couplings.push_back(c);
    }
  }

  // Clamp the fiber ends; push the top down by the prescribed displacement.
  for (const int node : out.bottom_nodes) {
    DirichletBC bc;
    bc.node = node;
    bc.mask = {true, true, true, true, true, true};
    m.dirichlet.push_back(bc);
  }
  for (const int node : out.top_nodes) {
    DirichletBC bc;
    bc.node = node;
    bc.mask = {true, true, true, true, true, true};
    bc.u = Vec3(0.0, 0.0, -opt.prescribed_displacement);
    m.dirichlet.push_back(bc);
  }

  // Imperfection load at the node closest to -d/2 e1 + b/2 e3.
  const Vec3 target(-0.5 * d, 0.0, 0.5 * b);
  double best = std::numeric_limits<double>::max();
  for (const auto& node : m.nodes) {
    const double dist = (node.x - target).squaredNorm();
    if (dist < best) {
      best = dist;
      out.imperfection_node = node.id;
    }
  }
  PointLoad imperfection;
  imperfection.node = out.imperfection_node;
  imperfection.force = Vec3(0.0, 1e-6, 0.0);
  imperfection.ramp = Ramp::kHoldFromFirst;
  m.loads.push_back(imperfection);

  m.monitor_node = out.imperfection_node;
  m.settings.load_steps = opt.load_steps;
  m.settings.newton_max_iter = 50;
  m.build();
  return out;
}

}  // namespace beamlink
