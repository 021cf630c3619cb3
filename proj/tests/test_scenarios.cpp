#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "beamlink/studies.hpp"

using namespace beamlink;

TEST_CASE("l-shape geometry and coupling reference") {
  const auto m0 = generate_l_shape({});
  // p_B = p_C = (1, 0, 0) for zero offset.
  CHECK((m0.nodes[m0.node_index(10)].x - Vec3(1.0, 0.0, 0.0)).norm() == 0.0);
  CHECK((m0.nodes[m0.node_index(11)].x - Vec3(1.0, 0.0, 0.0)).norm() == 0.0);
  CHECK(m0.couplings[0].reference.R01.norm() == 0.0);

  const auto m1 = generate_l_shape({.offset = 0.1});
  CHECK((m1.nodes[m1.node_index(11)].x - Vec3(1.0, 0.1, 0.0)).norm() == 0.0);
  // Frozen material offsets reproduce the joint gap.
  CHECK(m1.couplings[0].reference.R01.norm() == doctest::Approx(0.1).epsilon(1e-14));

  // Gaps vanish at the generated reference configuration.
  const State ref = State::reference(m1);
  const auto& c = m1.couplings[0];
  const auto cs_a = evaluate_cross_section(m1.elements[c.elem_a],
                                           m1.gather(m1.elements[c.elem_a], ref.groups), c.xi_a);
  const auto cs_b = evaluate_cross_section(m1.elements[c.elem_b],
                                           m1.gather(m1.elements[c.elem_b], ref.groups), c.xi_b);
  CHECK(positional_gap(cs_a, cs_b, c.reference).norm() < 1e-14);
  CHECK(rotational_gap(cs_a, cs_b, c.reference).norm() < 1e-14);
}

TEST_CASE("crossed beams place the coupling by projection") {
  const auto even = generate_crossed_beams({.elements_per_beam = 4});
  CHECK(even.element_specs.size() == 8);
  CHECK(even.couplings[0].xi_a == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(even.couplings[0].xi_b == doctest::Approx(-1.0).epsilon(1e-12));

  const auto odd = generate_crossed_beams({.elements_per_beam = 5});
  CHECK(std::abs(odd.couplings[0].xi_a) < 1e-10);
  CHECK(std::abs(odd.couplings[0].xi_b) < 1e-10);
}

TEST_CASE("wire cylinder follows the parametric fiber layout") {
  const auto cyl = generate_wire_cylinder({.n_axi = 16, .n_circ = 10, .elements_per_ring = 12,
                                           .elements_per_axial = 8, .order = 2});
  const auto& m = cyl.model;
  CHECK(m.couplings.size() == 160);
  CHECK(cyl.top_nodes.size() == 16);
  CHECK(cyl.bottom_nodes.size() == 16);

  // Axial fiber at z = 0 sits at radius d/2 = 1 (the sine term vanishes).
  for (const int node : cyl.bottom_nodes) {
    const Vec3 x = m.nodes[m.node_index(node)].x;
    CHECK(x.head<2>().norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(x(2) == 0.0);
  }

  // First node of each ring is at phi = 0: radius 1 -+ 0.04.
  const double a = M_PI * 2.0 / 16.0;
  int ring_node = 16 * 17;  // nodes after the axial fibers
  for (int i = 1; i <= 10; ++i) {
    const Vec3 x = m.nodes[m.node_index(ring_node)].x;
    const double expected = 1.0 - (i % 2 == 0 ? 1.0 : -1.0) * 0.04;
    CHECK(x.head<2>().norm() == doctest::Approx(expected).epsilon(1e-14));
    CHECK(x(2) == doctest::Approx(a * (i - 0.5)).epsilon(1e-14));
    ring_node += 24;
  }

  // The continuous fibers touch at distance 2R = 0.08 at every
  // intersection; the interpolated centerlines under-resolve the winding,
  // so the discrete distance comes out somewhat below that.
  double min_dist = 1.0, max_dist = 0.0;
  for (const auto& c : m.couplings) {
    const double dist = (reference_cross_section(m.elements[c.elem_a], c.xi_a).r -
                         reference_cross_section(m.elements[c.elem_b], c.xi_b).r)
                            .norm();
    min_dist = std::min(min_dist, dist);
    max_dist = std::max(max_dist, dist);
  }
  CHECK(min_dist > 0.5 * 0.08);
  CHECK(max_dist < 1.01 * 0.08);

  // With a finer axial discretization the distance approaches 2R.
  const auto fine = generate_wire_cylinder({.n_axi = 4, .n_circ = 1, .elements_per_ring = 24,
                                            .elements_per_axial = 24, .order = 3});
  for (const auto& c : fine.model.couplings) {
    const double dist =
        (reference_cross_section(fine.model.elements[c.elem_a], c.xi_a).r -
         reference_cross_section(fine.model.elements[c.elem_b], c.xi_b).r)
            .norm();
    CHECK(dist == doctest::Approx(0.08).epsilon(1e-3));
  }

  // The imperfection load sits at (-1, 0, b/2).
  const Vec3 imp = m.nodes[m.node_index(cyl.imperfection_node)].x;
  CHECK((imp - Vec3(-1.0, 0.0, 0.5 * a * 10)).norm() < 1e-12);
}

TEST_CASE("csv output is deterministic") {
  const std::vector<double> scales = {1.0, 10.0};
  const LShapeOptions base{.elements_per_beam = 4};
  const auto first = run_penalty_sweep(base, scales);
  const auto second = run_penalty_sweep(base, scales);
  CHECK(first.table.csv() == second.table.csv());
  CHECK(first.table.csv().starts_with("lambda,rx,ry,rz,err\n"));
}

TEST_CASE("penalty sweep errors decrease") {
  const std::vector<double> scales = {1.0, 10.0, 100.0};
  const auto result = run_penalty_sweep({.elements_per_beam = 4}, scales);
  REQUIRE(result.errors.size() == 3);
  CHECK(result.errors[0] > result.errors[1]);
  CHECK(result.errors[1] > result.errors[2]);
  const double slope = loglog_slope(scales, result.errors);
  CHECK(slope == doctest::Approx(-1.0).epsilon(0.2));
}

TEST_CASE("convergence study reports parity-tagged errors") {
  const std::vector<int> meshes = {2, 3, 4, 5, 8};
  const auto result = run_convergence_study(meshes, 8);
  REQUIRE(result.table.rows.size() == 5);
  // Self-comparison at the reference mesh.
  CHECK(result.table.rows.back()[2] == 0.0);
  for (size_t i = 0; i + 1 < result.table.rows.size(); ++i)
    CHECK(result.table.rows[i][2] > 0.0);
  CHECK(result.table.rows[1][1] == 1.0);  // n_e = 3 tagged odd
  CHECK(result.table.rows[2][1] == 0.0);  // n_e = 4 tagged even
}

TEST_CASE("objectivity driver keeps the energy constant while rotating") {
  const auto result = run_objectivity_test({.elements_per_beam = 3}, 12);
  CHECK(result.loading_monotone);
  CHECK(result.max_energy_drift < 1e-10);
  CHECK(result.rotate_back_error < 1e-9);
  CHECK(result.table.header ==
        std::vector<std::string>{"step", "time", "internal_energy", "penalty_energy"});
  CHECK(result.table.rows.size() == 10 + 12);
}

TEST_CASE("generator input validation") {
  CHECK_THROWS_AS((void)generate_l_shape({.offset = -0.1}), ModelError);
  CHECK_THROWS_AS((void)generate_l_shape({.offset = 0.1, .nodal_connection = true}), ModelError);
  CHECK_THROWS_AS((void)generate_l_shape({.connector_stiffness = 10.0}), ModelError);
  CHECK_THROWS_AS((void)generate_crossed_beams({.elements_per_beam = 0}), ModelError);
  CHECK_THROWS_AS((void)generate_wire_cylinder({.n_axi = 5}), ModelError);
}
