#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beamlink/model_io.hpp"
#include "beamlink/studies.hpp"

namespace {

using namespace beamlink;

std::string resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("BEAMLINK_OUT_DIR"); env != nullptr && env[0] != '\0')
    return env;
  return ".";
}

std::string out_path(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

Enforcement parse_enforcement(const std::string& s) {
  if (s == "lagrange") return Enforcement::kLagrange;
  if (s == "penalty") return Enforcement::kPenalty;
  throw CLI::ValidationError("--enforcement", "must be 'lagrange' or 'penalty'");
}

void print_position(const char* label, const Vec3& r) {
  std::printf("%s: [%.10f, %.10f, %.10f]\n", label, r(0), r(1), r(2));
}

StudyResult monitor_csv(const Vec3& r) {
  StudyResult res;
  res.header = {"rx", "ry", "rz"};
  res.rows.push_back({r(0), r(1), r(2)});
  return res;
}

int run(int argc, char** argv) {
  CLI::App app{"Beam-to-beam point coupling toolkit for geometrically exact beams"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_flag;
  app.add_option("--out", out_flag, "Output directory (default: $BEAMLINK_OUT_DIR or '.')");

  // --- solve ---
  auto* solve = app.add_subcommand("solve", "Solve a model file");
  std::string model_path;
  double solve_tol = -1.0;
  int solve_steps = -1;
  solve->add_option("model", model_path, "Model document (JSON)")->required();
  solve->add_option("--tol", solve_tol, "Newton tolerance override");
  solve->add_option("--steps", solve_steps, "Load step override");

  // --- scenario ---
  auto* scenario = app.add_subcommand("scenario", "Generate and solve a built-in scenario");
  std::string scenario_name;
  scenario->add_option("name", scenario_name, "l-shape or crossed-beams")->required();
  double offset = 0.0;
  int elements = -1;
  std::string enforcement_str = "lagrange";
  double penalty_scale = 1000.0;
  bool nodal_connection = false;
  double connector_stiffness = 0.0;
  double scen_tol = -1.0;
  int scen_steps = -1;
  scenario->add_option("--offset", offset, "L-shape joint offset a [m]");
  scenario->add_option("--elements", elements, "Elements per beam");
  scenario->add_option("--enforcement", enforcement_str, "lagrange or penalty");
  scenario->add_option("--penalty-scale", penalty_scale, "Penalty scaling factor lambda");
  scenario->add_flag("--nodal-connection", nodal_connection,
                     "Share the joint DOFs instead of coupling (offset 0 only)");
  scenario->add_option("--connector-stiffness", connector_stiffness,
                       "Replace the coupling by a connector beam with E scaled by this factor");
  scenario->add_option("--tol", scen_tol, "Newton tolerance override");
  scenario->add_option("--steps", scen_steps, "Load step override");

  // --- sweep ---
  auto* sweep = app.add_subcommand("sweep", "Penalty (or connector) parameter sweep, L-shape");
  double sweep_offset = 0.0;
  int sweep_elements = 10;
  bool sweep_connector = false;
  std::vector<double> scales;
  sweep->add_option("--offset", sweep_offset, "Joint offset a [m]");
  sweep->add_option("--elements", sweep_elements, "Elements per beam");
  sweep->add_flag("--connector", sweep_connector, "Sweep the connector-beam stiffness instead");
  sweep->add_option("--scales", scales, "Scaling factors lambda")
      ->delimiter(',')
      ->expected(-1);

  // --- convergence ---
  auto* convergence = app.add_subcommand("convergence", "Crossed-beams mesh refinement study");
  int max_k = 7;
  int reference_n_e = 512;
  std::string conv_enforcement = "lagrange";
  convergence->add_option("--max-k", max_k, "Meshes 2^k and 2^k+1 for k = 1..max-k");
  convergence->add_option("--reference", reference_n_e, "Reference elements per beam");
  convergence->add_option("--enforcement", conv_enforcement, "lagrange or penalty");

  // --- objectivity ---
  auto* objectivity = app.add_subcommand("objectivity", "Crossed-beams rigid rotation test");
  int obj_elements = 9;
  int rotation_steps = 50;
  std::string obj_enforcement = "lagrange";
  double obj_scale = 1000.0;
  objectivity->add_option("--elements", obj_elements, "Elements per beam");
  objectivity->add_option("--rotation-steps", rotation_steps, "Rotation increments for 2 pi");
  objectivity->add_option("--enforcement", obj_enforcement, "lagrange or penalty");
  objectivity->add_option("--penalty-scale", obj_scale, "Penalty scaling factor lambda");

  // --- cylinder ---
  auto* cylinder = app.add_subcommand("cylinder", "Wire-wound cylinder compression study");
  WireCylinderOptions cyl;
  std::string cyl_enforcement = "lagrange";
  cylinder->add_option("--n-axi", cyl.n_axi, "Axial fibers (even)");
  cylinder->add_option("--n-circ", cyl.n_circ, "Circumferential rings");
  cylinder->add_option("--elements-ring", cyl.elements_per_ring, "Elements per ring");
  cylinder->add_option("--elements-axial", cyl.elements_per_axial, "Elements per axial fiber");
  cylinder->add_option("--order", cyl.order, "Element order 1..3");
  cylinder->add_option("--steps", cyl.load_steps, "Displacement steps");
  cylinder->add_option("--displacement", cyl.prescribed_displacement, "Total end shortening [m]");
  cylinder->add_option("--enforcement", cyl_enforcement, "lagrange or penalty");
  cylinder->add_option("--penalty-scale", cyl.penalty_scale, "Penalty scaling factor lambda");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  const std::string out_dir = resolve_out_dir(out_flag);

  if (*solve) {
    Model m = load_model_file(model_path);
    if (solve_tol > 0.0) m.settings.newton_tol = solve_tol;
    if (solve_steps > 0) m.settings.load_steps = solve_steps;
    m.build();
    const auto history = newton_solve(m);
    StudyResult displacements;
    displacements.header = {"node", "x", "y", "z"};
    for (const auto& node : m.nodes) {
      const Vec3 r = node_position(m, history.final_state, node.id);
      displacements.rows.push_back({static_cast<double>(node.id), r(0), r(1), r(2)});
    }
    write_csv(displacements, out_path(out_dir, "displacements.csv"));
    const auto energy = energies(m, history.final_state);
    std::printf("steps: %zu, internal energy: %.6e Nm, penalty energy: %.6e Nm\n",
                history.steps.size(), energy.internal, energy.penalty);
    if (m.monitor_node >= 0)
      print_position("monitor position", node_position(m, history.final_state, m.monitor_node));
    return 0;
  }

  if (*scenario) {
    Model m;
    std::string stem;
    if (scenario_name == "l-shape") {
      LShapeOptions opt;
      opt.offset = offset;
      if (elements > 0) opt.elements_per_beam = elements;
      opt.enforcement = parse_enforcement(enforcement_str);
      opt.penalty_scale = penalty_scale;
      opt.nodal_connection = nodal_connection;
      opt.connector_stiffness = connector_stiffness;
      m = generate_l_shape(opt);
      stem = "l_shape";
    } else if (scenario_name == "crossed-beams") {
      CrossedBeamsOptions opt;
      if (elements > 0) opt.elements_per_beam = elements;
      opt.enforcement = parse_enforcement(enforcement_str);
      opt.penalty_scale = penalty_scale;
      m = generate_crossed_beams(opt);
      stem = "crossed_beams";
    } else {
      std::fprintf(stderr, "unknown scenario '%s' (use l-shape or crossed-beams)\n",
                   scenario_name.c_str());
      return 1;
    }
    if (scen_tol > 0.0) m.settings.newton_tol = scen_tol;
    if (scen_steps > 0) m.settings.load_steps = scen_steps;
    m.build();
    save_model_file(m, out_path(out_dir, stem + "_model.json"));
    const auto history = newton_solve(m);
    const Vec3 r = node_position(m, history.final_state, m.monitor_node);
    write_csv(monitor_csv(r), out_path(out_dir, stem + "_result.csv"));
    print_position("r_D", r);
    return 0;
  }

  if (*sweep) {
    if (scales.empty()) scales = {1.0, 10.0, 100.0, 1000.0};
    LShapeOptions base;
    base.offset = sweep_offset;
    base.elements_per_beam = sweep_elements;
    const auto result = sweep_connector ? run_connector_sweep(base, scales)
                                        : run_penalty_sweep(base, scales);
    const std::string name = sweep_connector ? "sweep_connector.csv" : "sweep_penalty.csv";
    write_csv(result.table, out_path(out_dir, name));
    print_position("lagrange reference r_D", result.reference_position);
    return 0;
  }

  if (*convergence) {
    std::vector<int> meshes;
    for (int k = 1; k <= max_k; ++k) {
      meshes.push_back(1 << k);
      meshes.push_back((1 << k) + 1);
    }
    const auto result =
        run_convergence_study(meshes, reference_n_e, parse_enforcement(conv_enforcement));
    write_csv(result.table, out_path(out_dir, "convergence.csv"));
    std::printf("even-mesh slope: %.3f, odd-mesh slope: %.3f\n", result.even_slope,
                result.odd_slope);
    return 0;
  }

  if (*objectivity) {
    CrossedBeamsOptions opt;
    opt.elements_per_beam = obj_elements;
    opt.enforcement = parse_enforcement(obj_enforcement);
    opt.penalty_scale = obj_scale;
    const auto result = run_objectivity_test(opt, rotation_steps);
    const std::string name = opt.enforcement == Enforcement::kLagrange
                                 ? "objectivity_lagrange.csv"
                                 : "objectivity_penalty.csv";
    write_csv(result.table, out_path(out_dir, name));
    std::printf("max relative energy drift during rotation: %.3e\n", result.max_energy_drift);
    return 0;
  }

  if (*cylinder) {
    cyl.enforcement = parse_enforcement(cyl_enforcement);
    const auto result = run_wire_cylinder(cyl);
    write_csv(result.table, out_path(out_dir, "cylinder.csv"));
    std::printf("completed %d steps, peak F_R = %.6e N at step %d\n", result.completed_steps,
                result.peak_force, result.peak_index + 1);
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::ParseError&) {
    return 1;
  } catch (const ModelError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 1;
  } catch (const ProjectionError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return 2;
  }
}
