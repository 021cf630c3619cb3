#pragma once

#include <span>
#include <vector>

#include "beamlink/assembly.hpp"
#include "beamlink/model.hpp"

namespace beamlink {

/// One target of the quasi-static continuation: absolute external loads at
/// the step end plus the prescribed Dirichlet increments over the step.
struct StepSpec {
  double time = 0.0;
  std::vector<PointLoad> loads;  // absolute values, Ramp ignored
  std::vector<Vec3> bc_du;       // one entry per Model::dirichlet item
  std::vector<Vec3> bc_dtheta;
};

struct StepRecord {
  double time = 0.0;
  int iterations = 0;
  double residual_norm = 0.0;
  Energies energy;
  VecX external;
  State state;
};

struct SolutionHistory {
  std::vector<StepRecord> steps;
  State final_state;
};

/// Per-step load/BC targets derived from the model's ramps and step count.
std::vector<StepSpec> ramp_schedule(const Model& m);

/// Newton continuation over the given schedule starting from `state`.
/// Failing sub-steps are bisected up to 4 times when step cutting is
/// allowed. Throws NonConvergenceError once cutting is exhausted.
SolutionHistory solve_schedule(const Model& m, State state, std::span<const StepSpec> schedule);

/// Load-stepped solve of the model from its reference state.
SolutionHistory newton_solve(const Model& m);

inline Vec3 node_position(const Model& m, const State& state, int node_id) {
  return state.groups[m.dofs.group_of_node[m.node_index(node_id)]].r;
}

}  // namespace beamlink
