#include "beamlink/assembly.hpp"

#include <algorithm>

namespace beamlink {

MatX GlobalSystem::dense() const {
  MatX k = MatX::Zero(n, n);
  for (const auto& t : triplets) k(t.row(), t.col()) += t.value();
  return k;
}

Eigen::SparseMatrix<double> GlobalSystem::sparse() const {
  Eigen::SparseMatrix<double> k(n, n);
  k.setFromTriplets(triplets.begin(), triplets.end());
  return k;
}

VecX external_load_vector(const Model& m, std::span<const PointLoad> loads) {
  VecX f = VecX::Zero(m.dofs.n_dofs);
  for (const auto& l : loads) {
    const int base = m.dofs.node_base(m.node_index(l.node));
    f.segment<3>(base) += l.force;
    f.segment<3>(base + 3) += l.moment;
  }
  return f;
}

namespace {

struct PairData {
  Vec3 g_r, g_theta;
  Vec3 lambda_r, lambda_theta;
};

PairData evaluate_pair(const Model& m, const CouplingSpec& c, const CrossSectionState& cs_a,
                       const CrossSectionState& cs_b, const State& state, size_t pair_index) {
  PairData d;
  d.g_r = positional_gap(cs_a, cs_b, c.reference);
  d.g_theta = rotational_gap(cs_a, cs_b, c.reference);
  if (c.enforcement == Enforcement::kLagrange) {
    const int offset = m.dofs.lambda_base[pair_index] - 6 * m.dofs.n_groups;
    d.lambda_r = state.multipliers.segment<3>(offset);
    d.lambda_theta = state.multipliers.segment<3>(offset + 3);
  } else {
    const auto mult = penalty_multiplier({d.g_r, d.g_theta}, c.eps_r, c.eps_theta);
    d.lambda_r = mult.lambda_r;
    d.lambda_theta = mult.lambda_theta;
  }
  return d;
}

}  // namespace

GlobalSystem assemble(const Model& m, const State& state, const VecX& external,
                      bool with_tangent) {
  if (!m.built) throw ModelError("model must be built before assembly");
  GlobalSystem sys;
  sys.n = m.dofs.n_dofs;
  sys.has_tangent = with_tangent;
  sys.residual = -external;
  if (with_tangent) sys.triplets.reserve(4096);

  const auto global_dof = [&](const BeamElement& e, int local) {
    return m.dofs.node_base(e.node_ids[local / 6]) + local % 6;
  };

  for (const auto& e : m.elements) {
    const auto st = m.gather(e, state.groups);
    if (with_tangent) {
      const auto [r, k] = internal_force_and_tangent(e, st);
      for (int j = 0; j < e.n_dofs(); ++j) {
        sys.residual(global_dof(e, j)) += r(j);
        for (int l = 0; l < e.n_dofs(); ++l)
          sys.triplets.emplace_back(global_dof(e, j), global_dof(e, l), k(j, l));
      }
    } else {
      const ElemVec r = internal_force(e, st);
      for (int j = 0; j < e.n_dofs(); ++j) sys.residual(global_dof(e, j)) += r(j);
    }
  }

  for (size_t i = 0; i < m.couplings.size(); ++i) {
    const auto& c = m.couplings[i];
    const auto& ea = m.elements[c.elem_a];
    const auto& eb = m.elements[c.elem_b];
    const auto st_a = m.gather(ea, state.groups);
    const auto st_b = m.gather(eb, state.groups);
    const auto cs_a = evaluate_cross_section(ea, st_a, c.xi_a);
    const auto cs_b = evaluate_cross_section(eb, st_b, c.xi_b);
    const PairData d = evaluate_pair(m, c, cs_a, cs_b, state, i);

    const auto bp = coupling_blocks_positional(cs_a, cs_b, c.reference, d.lambda_r);
    const auto br = coupling_blocks_rotational(cs_a, cs_b, c.reference, d.lambda_theta);
    const Vec6 f1 = bp.Cq1l * d.lambda_r + br.Cq1l * d.lambda_theta;
    const Vec6 f2 = bp.Cq2l * d.lambda_r + br.Cq2l * d.lambda_theta;

    KinematicMaps maps_a, maps_b;
    ElemMap h_a, h_b;
    if (with_tangent) {
      maps_a = kinematic_maps(ea, st_a, c.xi_a);
      maps_b = kinematic_maps(eb, st_b, c.xi_b);
      h_a = maps_a.H;
      h_b = maps_b.H;
    } else {
      h_a = variation_map(ea, st_a, c.xi_a);
      h_b = variation_map(eb, st_b, c.xi_b);
    }

    const ElemVec ra = h_a.transpose() * f1;
    const ElemVec rb = h_b.transpose() * f2;
    for (int j = 0; j < ea.n_dofs(); ++j) sys.residual(global_dof(ea, j)) += ra(j);
    for (int j = 0; j < eb.n_dofs(); ++j) sys.residual(global_dof(eb, j)) += rb(j);

    const int lb = m.dofs.lambda_base[i];
    if (lb >= 0) {
      sys.residual.segment<3>(lb) += d.g_r;
      sys.residual.segment<3>(lb + 3) += d.g_theta;
    }

    if (!with_tangent) continue;

    using Mat66 = Eigen::Matrix<double, 6, 6>;
    Mat66 m11 = bp.Cq1q1 + br.Cq1q1;
    Mat66 m12 = bp.Cq1q2 + br.Cq1q2;
    Mat66 m21 = bp.Cq2q1 + br.Cq2q1;
    Mat66 m22 = bp.Cq2q2 + br.Cq2q2;
    if (c.enforcement == Enforcement::kPenalty) {
      m11 += c.eps_r * bp.Cq1l * bp.Clq1 + c.eps_theta * br.Cq1l * br.Clq1;
      m12 += c.eps_r * bp.Cq1l * bp.Clq2 + c.eps_theta * br.Cq1l * br.Clq2;
      m21 += c.eps_r * bp.Cq2l * bp.Clq1 + c.eps_theta * br.Cq2l * br.Clq1;
      m22 += c.eps_r * bp.Cq2l * bp.Clq2 + c.eps_theta * br.Cq2l * br.Clq2;
    }

    const auto scatter = [&](const BeamElement& er, const BeamElement& ec, const ElemMat& block) {
      for (int j = 0; j < er.n_dofs(); ++j)
        for (int l = 0; l < ec.n_dofs(); ++l)
          sys.triplets.emplace_back(global_dof(er, j), global_dof(ec, l), block(j, l));
    };
    scatter(ea, ea, ElemMat(h_a.transpose() * m11 * h_a + maps_a.h_delta(f1)));
    scatter(ea, eb, ElemMat(h_a.transpose() * m12 * h_b));
    scatter(eb, ea, ElemMat(h_b.transpose() * m21 * h_a));
    scatter(eb, eb, ElemMat(h_b.transpose() * m22 * h_b + maps_b.h_delta(f2)));

    if (lb >= 0) {
      const auto scatter_lambda = [&](const BeamElement& e, const ElemMap& h,
                                      const Eigen::Matrix<double, 6, 3>& cql,
                                      const Eigen::Matrix<double, 3, 6>& clq, int offset) {
        const Eigen::Matrix<double, Eigen::Dynamic, 3, 0, kMaxElementDofs, 3> col =
            h.transpose() * cql;
        const Eigen::Matrix<double, 3, Eigen::Dynamic, 0, 3, kMaxElementDofs> row = clq * h;
        for (int j = 0; j < e.n_dofs(); ++j) {
          for (int l = 0; l < 3; ++l) {
            sys.triplets.emplace_back(global_dof(e, j), lb + offset + l, col(j, l));
            sys.triplets.emplace_back(lb + offset + l, global_dof(e, j), row(l, j));
          }
        }
      };
      scatter_lambda(ea, h_a, bp.Cq1l, bp.Clq1, 0);
      scatter_lambda(eb, h_b, bp.Cq2l, bp.Clq2, 0);
      scatter_lambda(ea, h_a, br.Cq1l, br.Clq1, 3);
      scatter_lambda(eb, h_b, br.Cq2l, br.Clq2, 3);
    }
  }

  return sys;
}

Energies energies(const Model& m, const State& state) {
  Energies out;
  for (const auto& e : m.elements) out.internal += elastic_energy(e, m.gather(e, state.groups));
  for (const auto& c : m.couplings) {
    if (c.enforcement != Enforcement::kPenalty) continue;
    const auto st_a = m.gather(m.elements[c.elem_a], state.groups);
    const auto st_b = m.gather(m.elements[c.elem_b], state.groups);
    const auto cs_a = evaluate_cross_section(m.elements[c.elem_a], st_a, c.xi_a);
    const auto cs_b = evaluate_cross_section(m.elements[c.elem_b], st_b, c.xi_b);
    out.penalty += 0.5 * c.eps_r * positional_gap(cs_a, cs_b, c.reference).squaredNorm() +
                   0.5 * c.eps_theta * rotational_gap(cs_a, cs_b, c.reference).squaredNorm();
  }
  return out;
}

Vec3 reaction_force(const Model& m, const State& state, const VecX& external,
                    std::span<const int> node_ids) {
  for (const int id : node_ids) {
    const bool constrained =
        std::any_of(m.dirichlet.begin(), m.dirichlet.end(), [&](const DirichletBC& bc) {
          return bc.node == id && (bc.mask[0] || bc.mask[1] || bc.mask[2]);
        });
    if (!constrained)
      throw ModelError("reaction requested at a node without translational Dirichlet data");
  }
  const auto sys = assemble(m, state, external, false);
  Vec3 out = Vec3::Zero();
  for (const int id : node_ids) out += sys.residual.segment<3>(m.dofs.node_base(m.node_index(id)));
  return out;
}

}  // namespace beamlink
