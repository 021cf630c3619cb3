#pragma once

#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "beamlink/model.hpp"

namespace beamlink {

/// Assembled residual and tangent in triplet form. The tangent is
/// structurally symmetric; Lagrange pairs contribute a zero
/// multiplier-multiplier block.
struct GlobalSystem {
  VecX residual;
  std::vector<Eigen::Triplet<double>> triplets;
  int n = 0;
  bool has_tangent = false;

  MatX dense() const;
  Eigen::SparseMatrix<double> sparse() const;
};

/// External load vector for absolute (already ramped) nodal loads.
VecX external_load_vector(const Model& m, std::span<const PointLoad> loads);

/// residual = internal forces + coupling forces - external, plus the
/// constraint rows g_r, g_theta of Lagrange pairs; the tangent includes the
/// coupling block products and the shape-function linearization terms.
GlobalSystem assemble(const Model& m, const State& state, const VecX& external,
                      bool with_tangent);

struct Energies {
  double internal = 0.0;
  double penalty = 0.0;
  double total() const { return internal + penalty; }
};

Energies energies(const Model& m, const State& state);

/// Sum of raw residual entries at the constrained translation DOFs of the
/// given nodes (before Dirichlet elimination). Every node must carry a
/// Dirichlet condition with translations constrained.
Vec3 reaction_force(const Model& m, const State& state, const VecX& external,
                    std::span<const int> node_ids);

}  // namespace beamlink
