#pragma once

#include <array>
#include <unordered_map>
#include <vector>

#include "beamlink/coupling.hpp"
#include "beamlink/element.hpp"
#include "beamlink/section.hpp"
#include "beamlink/types.hpp"

namespace beamlink {

enum class Enforcement { kLagrange, kPenalty };
enum class Ramp { kLinear, kHoldFromFirst };

struct Material {
  int id = 0;
  double E = 0.0;
  double nu = 0.0;
  double R = 0.0;
  double shear_area_factor = 1.0;
  CrossSectionConstitutive section() const {
    return CrossSectionConstitutive::circular(E, nu, R, shear_area_factor);
  }
};

struct ModelNode {
  int id = 0;
  Vec3 x = Vec3::Zero();
  Mat3 triad = Mat3::Identity();
  bool has_triad = false;  // explicit triad vs derived from the adjacent element
};

struct ElementSpec {
  int id = 0;
  int material = 0;
  std::vector<int> node_ids;  // interpolation order = node count - 1
};

struct CouplingSpec {
  int elem_a = 0;
  int elem_b = 0;
  double xi_a = 0.0;
  double xi_b = 0.0;
  bool auto_xi = false;  // locate by closest-point projection at build time
  Enforcement enforcement = Enforcement::kLagrange;
  double penalty_scale = 1000.0;

  // Resolved by Model::build():
  double eps_r = 0.0;
  double eps_theta = 0.0;
  CouplingReference reference;
};

struct DirichletBC {
  int node = 0;
  std::array<bool, 6> mask{};   // translations 0-2, rotations 3-5
  Vec3 u = Vec3::Zero();        // prescribed final translation
  Vec3 theta = Vec3::Zero();    // prescribed final rotation vector, applied
                                // as a multiplicative ramp per load step
  Ramp ramp = Ramp::kLinear;
};

struct PointLoad {
  int node = 0;
  Vec3 force = Vec3::Zero();
  Vec3 moment = Vec3::Zero();  // dead moment, conjugate to the nodal spin
  Ramp ramp = Ramp::kLinear;
};

struct SolveSettings {
  int load_steps = 10;
  double newton_tol = 1e-10;  // scaled by (1 + |external load|)
  int newton_max_iter = 25;
  bool step_cut_allowed = true;
  void validate() const {
    if (load_steps < 1 || newton_max_iter < 1 || !(newton_tol > 0.0))
      throw ModelError("solve settings must be strictly positive");
  }
};

/// Node DOF numbering after nodal merges, with Lagrange multiplier DOFs
/// appended after all nodal blocks (pairs in coupling order).
struct DofMap {
  std::vector<int> group_of_node;  // node index -> DOF group
  int n_groups = 0;
  std::vector<int> lambda_base;  // coupling index -> first multiplier DOF, -1 for penalty
  int n_dofs = 0;

  int node_base(int node_index) const { return 6 * group_of_node[node_index]; }
};

struct Model {
  std::vector<ModelNode> nodes;
  std::vector<Material> materials;
  std::vector<ElementSpec> element_specs;
  std::vector<CouplingSpec> couplings;
  std::vector<std::array<int, 2>> merges;  // {kept node id, merged node id}
  std::vector<DirichletBC> dirichlet;
  std::vector<PointLoad> loads;
  SolveSettings settings;
  int monitor_node = -1;

  // Derived by build(); element node_ids hold node *indices*.
  std::vector<BeamElement> elements;
  DofMap dofs;
  bool built = false;

  /// Validates the document, derives missing node triads, constructs the
  /// beam elements (frames, offsets), resolves coupling locations and
  /// references, and numbers the DOFs.
  void build();

  int node_index(int id) const;
  const Material& material(int id) const;

  /// Registers a rigid nodal connection: node_b's DOFs are merged into
  /// node_a's. Both nodes must carry coincident reference states.
  void merge_nodes(int node_a, int node_b);

  /// Gather the element-local node states.
  std::vector<NodeState> gather(const BeamElement& e,
                                std::span<const NodeState> group_states) const;

 private:
  std::unordered_map<int, int> node_index_;
  std::unordered_map<int, int> material_index_;
};

/// Global state: one entry per DOF group plus the multiplier vector.
struct State {
  std::vector<NodeState> groups;
  VecX multipliers;

  static State reference(const Model& m);
};

/// Reference-configuration cross-section of an element at xi.
CrossSectionState reference_cross_section(const BeamElement& element, double xi);

}  // namespace beamlink
