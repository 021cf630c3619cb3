#include "beamlink/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace beamlink {

namespace {

// Tangent direction of the reference centerline at a local node.
Vec3 node_tangent(const std::vector<Vec3>& positions, int k) {
  const int nn = static_cast<int>(positions.size());
  double L[4], dL[4];
  lagrange_shape(nn, -1.0 + 2.0 * k / (nn - 1), L, dL);
  Vec3 t = Vec3::Zero();
  for (int m = 0; m < nn; ++m) t += dL[m] * positions[m];
  if (t.norm() < 1e-14) throw ModelError("element has a vanishing tangent at a node");
  return t.normalized();
}

}  // namespace

int Model::node_index(int id) const {
  const auto it = node_index_.find(id);
  if (it == node_index_.end()) throw ModelError("unknown node id " + std::to_string(id));
  return it->second;
}

const Material& Model::material(int id) const {
  const auto it = material_index_.find(id);
  if (it == material_index_.end()) throw ModelError("unknown material id " + std::to_string(id));
  return materials[it->second];
}

void Model::merge_nodes(int node_a, int node_b) {
  if (node_a == node_b) throw ModelError("cannot merge a node with itself");
  merges.push_back({node_a, node_b});
  built = false;
}

std::vector<NodeState> Model::gather(const BeamElement& e,
                                     std::span<const NodeState> group_states) const {
  std::vector<NodeState> out(e.node_ids.size());
  for (size_t k = 0; k < e.node_ids.size(); ++k)
    out[k] = group_states[dofs.group_of_node[e.node_ids[k]]];
  return out;
}

void Model::build() {
  settings.validate();

  std::sort(nodes.begin(), nodes.end(),
            [](const ModelNode& a, const ModelNode& b) { return a.id < b.id; });
  node_index_.clear();
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (!node_index_.emplace(nodes[i].id, static_cast<int>(i)).second)
      throw ModelError("duplicate node id " + std::to_string(nodes[i].id));
  }
  material_index_.clear();
  for (size_t i = 0; i < materials.size(); ++i) {
    materials[i].section().validate();
    if (!material_index_.emplace(materials[i].id, static_cast<int>(i)).second)
      throw ModelError("duplicate material id " + std::to_string(materials[i].id));
  }
  for (const auto& n : nodes)
    if (n.has_triad && !is_rotation(n.triad, 1e-9))
      throw ModelError("node triad is not a rotation matrix");

  // Nodal merges (union-find into the lowest id).
  std::vector<int> parent(nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (const auto& [a, b] : merges) {
    const int ia = node_index(a);
    const int ib = node_index(b);
    if ((nodes[ia].x - nodes[ib].x).norm() > 1e-10 ||
        (nodes[ia].triad - nodes[ib].triad).norm() > 1e-10)
      throw ModelError("nodal connection requires coincident reference states");
    const int ra = find(ia);
    const int rb = find(ib);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }

  dofs = DofMap{};
  dofs.group_of_node.assign(nodes.size(), -1);
  for (size_t i = 0; i < nodes.size(); ++i) {
    const int root = find(static_cast<int>(i));
    if (dofs.group_of_node[root] < 0) dofs.group_of_node[root] = dofs.n_groups++;
    dofs.group_of_node[i] = dofs.group_of_node[root];
  }

  // Replace merged-away nodes in element connectivity by their representative.
  std::vector<int> representative(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) representative[i] = find(static_cast<int>(i));

  // Derive missing node triads from the first element touching the node.
  std::vector<char> derived(nodes.size(), 0);
  for (const auto& spec : element_specs) {
    std::vector<Vec3> pos(spec.node_ids.size());
    for (size_t k = 0; k < spec.node_ids.size(); ++k)
      pos[k] = nodes[node_index(spec.node_ids[k])].x;
    for (size_t k = 0; k < spec.node_ids.size(); ++k) {
      const int ni = node_index(spec.node_ids[k]);
      if (!nodes[ni].has_triad && !derived[ni]) {
        nodes[ni].triad = smallest_rotation_from_e1(node_tangent(pos, static_cast<int>(k)));
        derived[ni] = 1;
      }
    }
  }

  // Build the elements. Node frames double as element frames where the
  // first director follows the centerline; otherwise the element gets its
  // own tangent-aligned frame and a fixed offset from the node frame.
  elements.clear();
  elements.reserve(element_specs.size());
  for (const auto& spec : element_specs) {
    if (spec.node_ids.size() < 2 || spec.node_ids.size() > 4)
      throw ModelError("element must have 2 to 4 nodes");
    BeamElement e;
    e.order = static_cast<int>(spec.node_ids.size()) - 1;
    e.section = material(spec.material).section();
    bool any_offset = false;
    std::vector<Vec3> pos(spec.node_ids.size());
    for (size_t k = 0; k < spec.node_ids.size(); ++k)
      pos[k] = nodes[node_index(spec.node_ids[k])].x;
    for (size_t k = 0; k < spec.node_ids.size(); ++k) {
      const int ni = representative[node_index(spec.node_ids[k])];
      e.node_ids.push_back(ni);
      e.ref_positions.push_back(pos[k]);
      const Mat3 node_triad = nodes[ni].triad;
      const Vec3 t = node_tangent(pos, static_cast<int>(k));
      Mat3 elem_triad = node_triad;
      if (node_triad.col(0).cross(t).norm() > 0.3 || node_triad.col(0).dot(t) < 0.0) {
        elem_triad = align_first_director(node_triad, t);
        any_offset = true;
      }
      e.ref_triads.push_back(elem_triad);
      e.dof_offsets.push_back(node_triad.transpose() * elem_triad);
    }
    if (!any_offset) e.dof_offsets.clear();
    e.validate();
    elements.push_back(std::move(e));
  }

  // Couplings: locate, freeze the reference, resolve penalties.
  for (auto& c : couplings) {
    if (c.elem_a < 0 || c.elem_a >= static_cast<int>(elements.size()) || c.elem_b < 0 ||
        c.elem_b >= static_cast<int>(elements.size()))
      throw ModelError("coupling references an unknown element");
    if (c.elem_a == c.elem_b) throw ModelError("coupling must join two distinct elements");
    if (c.auto_xi) {
      const auto proj = closest_point_projection(elements[c.elem_a], elements[c.elem_b]);
      c.xi_a = proj.xi_a;
      c.xi_b = proj.xi_b;
    }
    if (std::abs(c.xi_a) > 1.0 + 1e-12 || std::abs(c.xi_b) > 1.0 + 1e-12)
      throw ModelError("coupling coordinate outside [-1, 1]");
    const auto ref_a = reference_cross_section(elements[c.elem_a], c.xi_a);
    const auto ref_b = reference_cross_section(elements[c.elem_b], c.xi_b);
    c.reference = CouplingReference::from_states(ref_a, ref_b);
    if (c.enforcement == Enforcement::kPenalty) {
      std::tie(c.eps_r, c.eps_theta) = default_penalties(
          elements[c.elem_a].section, elements[c.elem_b].section, c.penalty_scale);
    } else {
      c.eps_r = c.eps_theta = 0.0;
    }
  }

  // Multiplier DOFs after all nodal blocks, in coupling order.
  dofs.lambda_base.assign(couplings.size(), -1);
  dofs.n_dofs = 6 * dofs.n_groups;
  for (size_t i = 0; i < couplings.size(); ++i) {
    if (couplings[i].enforcement == Enforcement::kLagrange) {
      dofs.lambda_base[i] = dofs.n_dofs;
      dofs.n_dofs += 6;
    }
  }

  for (const auto& bc : dirichlet) (void)node_index(bc.node);
  for (const auto& l : loads) (void)node_index(l.node);
  if (monitor_node >= 0) (void)node_index(monitor_node);

  built = true;
}

State State::reference(const Model& m) {
  if (!m.built) throw ModelError("model must be built before creating a state");
  State s;
  s.groups.resize(m.dofs.n_groups);
  for (size_t i = 0; i < m.nodes.size(); ++i)
    s.groups[m.dofs.group_of_node[i]] = NodeState{m.nodes[i].x, m.nodes[i].triad};
  s.multipliers = VecX::Zero(m.dofs.n_dofs - 6 * m.dofs.n_groups);
  return s;
}

CrossSectionState reference_cross_section(const BeamElement& element, double xi) {
  std::vector<NodeState> st(element.n_nodes());
  for (int k = 0; k < element.n_nodes(); ++k) {
    st[k].r = element.ref_positions[k];
    // Undo the offset so the interpolated triad is the element frame.
    st[k].triad = element.dof_offsets.empty()
                      ? element.ref_triads[k]
                      : Mat3(element.ref_triads[k] * element.dof_offsets[k].transpose());
  }
  return evaluate_cross_section(element, st, xi);
}

}  // namespace beamlink
