#pragma once

#include "beamlink/model.hpp"

namespace beamlink {

/// Two straight beams of length 1 m joined at a right angle: beam A-B along
/// e1, beam C-D along e3, with C offset from B by `offset` along e2. Clamped
/// at A, loaded at D with 5e-6 N e2 and 5e-6 Nm e3 in 10 steps. E = 1 N/m^2,
/// nu = 0, R = 0.05 m.
struct LShapeOptions {
  double offset = 0.0;
  int elements_per_beam = 10;
  Enforcement enforcement = Enforcement::kLagrange;
  double penalty_scale = 1000.0;
  /// Share the DOFs of B and C instead of using a coupling pair
  /// (requires offset = 0).
  bool nodal_connection = false;
  /// When > 0 (and offset > 0): replace the coupling by one connector beam
  /// element B-C of radius R with Young's modulus scaled by this factor.
  double connector_stiffness = 0.0;
};

Model generate_l_shape(const LShapeOptions& opt);

/// Two beams of length 2 m crossing at their midpoints with offset a = 2R,
/// same loads and material as the L-shape; the coupling location is found
/// by closest-point projection (a node for even element counts, the element
/// midpoint for odd ones).
struct CrossedBeamsOptions {
  int elements_per_beam = 9;
  Enforcement enforcement = Enforcement::kLagrange;
  double penalty_scale = 1000.0;
};

Model generate_crossed_beams(const CrossedBeamsOptions& opt);

/// Wire-wound cylinder: n_axi axial fibers interwoven with n_circ
/// circumferential rings on a cylinder of diameter 2 m, fiber radius
/// 0.04 m, rigidly coupled at the n_axi * n_circ intersections. Axial fiber
/// ends are clamped; the top ends are pushed down by 0.2 m in 100 steps
/// with a small e2 imperfection load held from the first step.
struct WireCylinderOptions {
  int n_axi = 16;
  int n_circ = 10;
  int elements_per_ring = 12;
  int elements_per_axial = 8;
  int order = 2;
  Enforcement enforcement = Enforcement::kLagrange;
  double penalty_scale = 1000.0;
  double prescribed_displacement = 0.2;
  int load_steps = 100;
};

/// Node ids of the clamped axial-fiber ends at the top of the cylinder.
struct WireCylinderModel {
  Model model;
  std::vector<int> top_nodes;
  std::vector<int> bottom_nodes;
  int imperfection_node = -1;
};

WireCylinderModel generate_wire_cylinder(const WireCylinderOptions& opt);

}  // namespace beamlink
