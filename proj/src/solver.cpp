#include "beamlink/solver.hpp"

#include <cmath>
#include <cstdio>

#include <Eigen/LU>
#include <Eigen/SparseLU>

namespace beamlink {

namespace {

std::vector<char> constrained_flags(const Model& m) {
  std::vector<char> flags(m.dofs.n_dofs, 0);
  for (const auto& bc : m.dirichlet) {
    const int base = m.dofs.node_base(m.node_index(bc.node));
    for (int c = 0; c < 6; ++c)
      if (bc.mask[c]) flags[base + c] = 1;
  }
  return flags;
}

// Direct solve of the (indefinite) reduced system; dense below 2000 DOFs,
// sparse LU above.
VecX solve_linear(const GlobalSystem& sys, const VecX& rhs, const std::vector<char>& fixed) {
  std::vector<Eigen::Triplet<double>> reduced;
  reduced.reserve(sys.triplets.size() + fixed.size());
  for (const auto& t : sys.triplets)
    if (!fixed[t.row()] && !fixed[t.col()]) reduced.push_back(t);
  for (int i = 0; i < sys.n; ++i)
    if (fixed[i]) reduced.emplace_back(i, i, 1.0);

  VecX x;
  if (sys.n <= 2000) {
    MatX k = MatX::Zero(sys.n, sys.n);
    for (const auto& t : reduced) k(t.row(), t.col()) += t.value();
    x = k.partialPivLu().solve(rhs);
  } else {
    Eigen::SparseMatrix<double> k(sys.n, sys.n);
    k.setFromTriplets(reduced.begin(), reduced.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(k);
    if (lu.info() != Eigen::Success) throw LinearSolveError("sparse LU factorization failed");
    x = lu.solve(rhs);
  }
  if (!x.allFinite()) throw LinearSolveError("linear solve produced non-finite values");
  return x;
}

void apply_update(const Model& m, State& state, const VecX& delta) {
  for (int g = 0; g < m.dofs.n_groups; ++g) {
    state.groups[g].r += delta.segment<3>(6 * g);
    const Vec3 dtheta = delta.segment<3>(6 * g + 3);
    if (dtheta.squaredNorm() > 0.0)
      state.groups[g].triad = exp_so3<double>(dtheta) * state.groups[g].triad;
  }
  const int nl = static_cast<int>(state.multipliers.size());
  if (nl > 0) state.multipliers += delta.tail(nl);
}

// Newton loop at fixed external load; returns the iteration count.
int newton_at(const Model& m, State& state, const VecX& external,
              const std::vector<char>& fixed, double* residual_norm) {
  const double tol = m.settings.newton_tol * (1.0 + external.norm());

  const auto reduced_norm = [&](VecX r) {
    for (int i = 0; i < r.size(); ++i)
      if (fixed[i]) r(i) = 0.0;
    return r.norm();
  };

  double rnorm = reduced_norm(assemble(m, state, external, false).residual);
  for (int it = 0; it <= m.settings.newton_max_iter; ++it) {
    if (rnorm <= tol) {
      *residual_norm = rnorm;
      return it;
    }
    if (it == m.settings.newton_max_iter) break;
    const auto sys = assemble(m, state, external, true);
    VecX rhs = -sys.residual;
    for (int i = 0; i < rhs.size(); ++i)
      if (fixed[i]) rhs(i) = 0.0;
    const VecX delta = solve_linear(sys, rhs, fixed);
    apply_update(m, state, delta);
    rnorm = reduced_norm(assemble(m, state, external, false).residual);
  }
  char msg[128];
  std::snprintf(msg, sizeof(msg), "Newton did not reach tolerance %.3e (residual %.3e)", tol,
                rnorm);
  throw NonConvergenceError(msg);
}

void apply_prescribed(const Model& m, State& state, std::span<const Vec3> du,
                      std::span<const Vec3> dtheta, double fraction) {
  for (size_t b = 0; b < m.dirichlet.size(); ++b) {
    const auto& bc = m.dirichlet[b];
    const int g = m.dofs.group_of_node[m.node_index(bc.node)];
    for (int c = 0; c < 3; ++c)
      if (bc.mask[c]) state.groups[g].r(c) += fraction * du[b](c);
    Vec3 dth = Vec3::Zero();
    for (int c = 0; c < 3; ++c)
      if (bc.mask[3 + c]) dth(c) = fraction * dtheta[b](c);
    if (dth.squaredNorm() > 0.0)
      state.groups[g].triad = exp_so3<double>(dth) * state.groups[g].triad;
  }
}

}  // namespace

std::vector<StepSpec> ramp_schedule(const Model& m) {
  const int n = m.settings.load_steps;
  std::vector<StepSpec> schedule(n);
  for (int s = 0; s < n; ++s) {
    auto& spec = schedule[s];
    spec.time = static_cast<double>(s + 1) / n;
    for (const auto& l : m.loads) {
      const double factor = l.ramp == Ramp::kLinear ? spec.time : 1.0;
      PointLoad scaled = l;
      scaled.force *= factor;
      scaled.moment *= factor;
      spec.loads.push_back(scaled);
    }
    for (const auto& bc : m.dirichlet) {
      if (bc.ramp == Ramp::kLinear) {
        spec.bc_du.push_back(bc.u / n);
        spec.bc_dtheta.push_back(bc.theta / n);
      } else {
        spec.bc_du.push_back(s == 0 ? bc.u : Vec3::Zero());
        spec.bc_dtheta.push_back(s == 0 ? bc.theta : Vec3::Zero());
      }
    }
  }
  return schedule;
}

SolutionHistory solve_schedule(const Model& m, State state, std::span<const StepSpec> schedule) {
  if (!m.built) throw ModelError("model must be built before solving");
  const auto fixed = constrained_flags(m);

  SolutionHistory history;
  VecX external_prev = VecX::Zero(m.dofs.n_dofs);

  for (const auto& spec : schedule) {
    if (!spec.bc_du.empty() && (spec.bc_du.size() != m.dirichlet.size() ||
                                spec.bc_dtheta.size() != m.dirichlet.size()))
      throw ModelError("step spec Dirichlet increments do not match the model");
    const VecX external_target = external_load_vector(m, spec.loads);

    double progress = 0.0;
    double fraction = 1.0;
    int cuts = 0;
    int iterations = 0;
    double rnorm = 0.0;
    VecX external = external_prev;
    while (progress < 1.0 - 1e-12) {
      fraction = std::min(fraction, 1.0 - progress);
      State backup = state;
      external = external_prev + (progress + fraction) * (external_target - external_prev);
      try {
        if (!spec.bc_du.empty()) apply_prescribed(m, state, spec.bc_du, spec.bc_dtheta, fraction);
        iterations += newton_at(m, state, external, fixed, &rnorm);
        progress += fraction;
        fraction = std::min(1.0, 2.0 * fraction);
      } catch (const NonConvergenceError&) {
        state = backup;
        if (!m.settings.step_cut_allowed || ++cuts > 4) throw;
        fraction *= 0.5;
      } catch (const SingularConfigurationError&) {
        state = backup;
        if (!m.settings.step_cut_allowed || ++cuts > 4) throw;
        fraction *= 0.5;
      } catch (const LinearSolveError&) {
        // A singular tangent along the path (e.g. right at a bifurcation);
        // re-sampling at a shorter step usually steps around it.
        state = backup;
        if (!m.settings.step_cut_allowed || ++cuts > 4) throw;
        fraction *= 0.5;
      }
    }

    StepRecord rec;
    rec.time = spec.time;
    rec.iterations = iterations;
    rec.residual_norm = rnorm;
    rec.energy = energies(m, state);
    rec.external = external;
    rec.state = state;
    history.steps.push_back(std::move(rec));
    external_prev = external_target;
  }

  history.final_state = state;
  return history;
}

SolutionHistory newton_solve(const Model& m) {
  const auto schedule = ramp_schedule(m);
  return solve_schedule(m, State::reference(m), schedule);
}

}  // namespace beamlink
