#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "beamlink/section.hpp"
#include "beamlink/so3.hpp"
#include "beamlink/types.hpp"

namespace beamlink {

/// Current position and triad of one node. Rotational DOFs act
/// multiplicatively from the left: triad <- exp(skew(dtheta)) triad.
struct NodeState {
  Vec3 r = Vec3::Zero();
  Mat3 triad = Mat3::Identity();
};

/// Centroid position and triad of one cross-section.
struct CrossSectionState {
  Vec3 r = Vec3::Zero();
  Mat3 triad = Mat3::Identity();
};

/// Geometrically exact Simo-Reissner beam element with Lagrange
/// interpolation of the centerline and of relative rotation vectors
/// (order p in {1,2,3}, p+1 equispaced nodes on [-1,1]).
///
/// The triad field is interpolated objectively: with phi_k the rotation
/// vector of the first node's triad to node k, Lambda(xi) =
/// Lambda_1 exp(skew(sum_k L_k(xi) phi_k)).
struct BeamElement {
  std::vector<int> node_ids;
  int order = 1;
  std::vector<Vec3> ref_positions;
  std::vector<Mat3> ref_triads;
  // Maps the shared node-state triad to this element's cross-section triad
  // (identity unless an element joins a node whose frame differs from the
  // element's reference frame). Spins are unaffected.
  std::vector<Mat3> dof_offsets;
  CrossSectionConstitutive section;

  int n_nodes() const { return order + 1; }
  int n_dofs() const { return 6 * (order + 1); }

  /// Element triad at node k for the given node state.
  Mat3 node_triad(int k, const NodeState& state) const {
    return dof_offsets.empty() ? state.triad : Mat3(state.triad * dof_offsets[k]);
  }

  void validate() const;
};

/// Discrete variation/increment maps of the cross-section kinematics at xi.
/// Rows are ordered (position; spin). N equals H since increments are
/// multiplicative as well. h_delta(f) is the exact derivative of H^T f with
/// respect to the element DOFs at fixed f.
struct KinematicMaps {
  ElemMap H;
  ElemMap N;
  std::function<ElemMat(const Vec6&)> h_delta;
};

/// Material strains at one cross-section, relative to the reference
/// configuration: force strain Gamma and curvature kappa.
struct SectionStrains {
  Vec3 gamma = Vec3::Zero();
  Vec3 kappa = Vec3::Zero();
};

CrossSectionState evaluate_cross_section(const BeamElement& element,
                                         std::span<const NodeState> nodal_states, double xi);

KinematicMaps kinematic_maps(const BeamElement& element, std::span<const NodeState> nodal_states,
                             double xi);

/// Variation map H alone; cheaper than kinematic_maps when the
/// shape-function linearization is not needed.
ElemMap variation_map(const BeamElement& element, std::span<const NodeState> nodal_states,
                      double xi);

SectionStrains section_strains(const BeamElement& element, std::span<const NodeState> nodal_states,
                               double xi);

double elastic_energy(const BeamElement& element, std::span<const NodeState> nodal_states);

/// Gradient of the elastic energy with respect to the element DOFs
/// (positions additive, triads multiplicative).
ElemVec internal_force(const BeamElement& element, std::span<const NodeState> nodal_states);

/// Residual and its exact Jacobian under multiplicative updates.
std::pair<ElemVec, ElemMat> internal_force_and_tangent(const BeamElement& element,
                                                       std::span<const NodeState> nodal_states);

/// Lagrange shape functions and xi-derivatives for p+1 equispaced nodes.
void lagrange_shape(int n_nodes, double xi, double* values, double* derivatives);

/// Gauss-Legendre rule with 1..4 points on [-1,1].
std::span<const double> gauss_points(int n);
std::span<const double> gauss_weights(int n);

}  // namespace beamlink
