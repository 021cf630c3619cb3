#include "beamlink/studies.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace beamlink {

namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

Vec3 solve_monitor(const Model& m) {
  const auto history = newton_solve(m);
  return node_position(m, history.final_state, m.monitor_node);
}

}  // namespace

std::string StudyResult::csv() const {
  std::string out;
  for (size_t i = 0; i < header.size(); ++i) {
    out += header[i];
    out += (i + 1 < header.size()) ? "," : "\n";
  }
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      out += format_number(row[i]);
      out += (i + 1 < row.size()) ? "," : "\n";
    }
  }
  return out;
}

void write_csv(const StudyResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << result.csv();
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("need at least two points for a slope");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

SweepResult sweep_impl(const LShapeOptions& base, std::span<const double> scales,
                       bool connector) {
  LShapeOptions ref_opt = base;
  ref_opt.enforcement = Enforcement::kLagrange;
  ref_opt.connector_stiffness = 0.0;
  ref_opt.nodal_connection = false;
  const Model reference = generate_l_shape(ref_opt);
  const Vec3 r_ref = solve_monitor(reference);

  SweepResult out;
  out.reference_position = r_ref;
  out.table.header = {"lambda", "rx", "ry", "rz", "err"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const double scale : scales) {
    LShapeOptions opt = base;
    opt.nodal_connection = false;
    if (connector) {
      opt.connector_stiffness = scale;
    } else {
      opt.enforcement = Enforcement::kPenalty;
      opt.penalty_scale = scale;
      opt.connector_stiffness = 0.0;
    }
    try {
      const Vec3 r = solve_monitor(generate_l_shape(opt));
      const double err = (r - r_ref).norm() / r_ref.norm();
      out.table.rows.push_back({scale, r(0), r(1), r(2), err});
      out.errors.push_back(err);
    } catch (const Error&) {
      out.table.rows.push_back({scale, nan, nan, nan, nan});
      out.errors.push_back(nan);
    }
  }
  return out;
}

}  // namespace

SweepResult run_penalty_sweep(const LShapeOptions& base, std::span<const double> scales) {
  return sweep_impl(base, scales, false);
}

SweepResult run_connector_sweep(const LShapeOptions& base, std::span<const double> scales) {
  if (base.offset <= 0.0) throw ModelError("the connector comparison needs a non-zero offset");
  return sweep_impl(base, scales, true);
}

ConvergenceResult run_convergence_study(std::span<const int> n_e_values, int reference_n_e,
                                        Enforcement enforcement) {
  for (const int n : n_e_values)
    if (n > reference_n_e) throw ModelError("reference mesh must be at least as fine as all entries");

  CrossedBeamsOptions ref_opt;
  ref_opt.elements_per_beam = reference_n_e;
  ref_opt.enforcement = enforcement;
  const Model reference = generate_crossed_beams(ref_opt);
  const Vec3 r_ref = solve_monitor(reference);

  ConvergenceResult out;
  out.reference_position = r_ref;
  out.table.header = {"n_e", "parity", "e_rel"};
  std::vector<double> even_x, even_y, odd_x, odd_y;
  for (const int n : n_e_values) {
    CrossedBeamsOptions opt;
    opt.elements_per_beam = n;
    opt.enforcement = enforcement;
    const Vec3 r = solve_monitor(generate_crossed_beams(opt));
    const double e_rel = (r - r_ref).norm() / r_ref.norm();
    const bool odd = n % 2 != 0;
    out.table.rows.push_back({static_cast<double>(n), odd ? 1.0 : 0.0, e_rel});
    if (e_rel > 0.0) {
      (odd ? odd_x : even_x).push_back(n);
      (odd ? odd_y : even_y).push_back(e_rel);
    }
  }
  if (even_x.size() >= 2) out.even_slope = -loglog_slope(even_x, even_y);
  if (odd_x.size() >= 2) out.odd_slope = -loglog_slope(odd_x, odd_y);
  return out;
}

ObjectivityResult run_objectivity_test(const CrossedBeamsOptions& opt, int rotation_steps,
                                       double newton_tol) {
  Model m = generate_crossed_beams(opt);
  m.settings.newton_tol = newton_tol;
  m.settings.newton_max_iter = 40;
  m.build();

  auto schedule = ramp_schedule(m);
  const int load_steps = static_cast<int>(schedule.size());

  // Rotation phase: the clamp triad turns about e1 through the origin while
  // every load co-rotates; the clamp sits on the axis, so its position
  // prescriptions stay zero.
  for (int k = 1; k <= rotation_steps; ++k) {
    StepSpec spec;
    spec.time = 1.0 + static_cast<double>(k) / rotation_steps;
    const Mat3 rot = exp_so3<double>(Vec3(2.0 * M_PI * k / rotation_steps, 0.0, 0.0));
    for (const auto& l : m.loads) {
      PointLoad rotated = l;
      rotated.force = rot * l.force;
      rotated.moment = rot * l.moment;
      spec.loads.push_back(rotated);
    }
    const Mat3 rot_prev =
        exp_so3<double>(Vec3(2.0 * M_PI * (k - 1) / rotation_steps, 0.0, 0.0));
    for (const auto& bc : m.dirichlet) {
      const Vec3 p0 = m.nodes[m.node_index(bc.node)].x;
      spec.bc_du.push_back((rot - rot_prev) * p0);
      spec.bc_dtheta.push_back(Vec3(2.0 * M_PI / rotation_steps, 0.0, 0.0));
    }
    schedule.push_back(spec);
  }

  const auto history = solve_schedule(m, State::reference(m), schedule);

  ObjectivityResult out;
  out.table.header = {"step", "time", "internal_energy", "penalty_energy"};
  for (size_t s = 0; s < history.steps.size(); ++s) {
    const auto& rec = history.steps[s];
    out.table.rows.push_back(
        {static_cast<double>(s + 1), rec.time, rec.energy.internal, rec.energy.penalty});
  }

  out.loading_monotone = true;
  for (int s = 1; s < load_steps; ++s) {
    if (history.steps[s].energy.total() <= history.steps[s - 1].energy.total())
      out.loading_monotone = false;
  }

  const double e_start = history.steps[load_steps - 1].energy.total();
  out.max_energy_drift = 0.0;
  for (size_t s = load_steps; s < history.steps.size(); ++s) {
    out.max_energy_drift = std::max(
        out.max_energy_drift, std::abs(history.steps[s].energy.total() - e_start) / e_start);
  }

  // After the full turn the configuration must match the pre-rotation one.
  const auto& before = history.steps[load_steps - 1].state;
  const auto& after = history.final_state;
  out.rotate_back_error = 0.0;
  for (size_t g = 0; g < before.groups.size(); ++g) {
    out.rotate_back_error =
        std::max(out.rotate_back_error, (after.groups[g].r - before.groups[g].r).norm());
    out.rotate_back_error = std::max(
        out.rotate_back_error, (after.groups[g].triad - before.groups[g].triad).norm());
  }
  return out;
}

CylinderResult run_wire_cylinder(const WireCylinderOptions& opt) {
  const auto cyl = generate_wire_cylinder(opt);
  const auto history = newton_solve(cyl.model);

  CylinderResult out;
  out.table.header = {"u_hat", "F_R"};
  out.completed_steps = static_cast<int>(history.steps.size());
  for (size_t s = 0; s < history.steps.size(); ++s) {
    const auto& rec = history.steps[s];
    const double u_hat = opt.prescribed_displacement * rec.time;
    const Vec3 reaction =
        reaction_force(cyl.model, rec.state, rec.external, cyl.top_nodes);
    const double f_r = -reaction(2);  // positive under compression
    out.table.rows.push_back({u_hat, f_r});
    if (f_r > out.peak_force) {
      out.peak_force = f_r;
      out.peak_index = static_cast<int>(s);
    }
  }
  return out;
}

}  // namespace beamlink
