#pragma once

#include <span>
#include <string>
#include <vector>

#include "beamlink/scenarios.hpp"
#include "beamlink/solver.hpp"

namespace beamlink {

/// Tabular study output, written as CSV with a header row and deterministic
/// number formatting.
struct StudyResult {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string csv() const;
};

void write_csv(const StudyResult& result, const std::string& path);

/// Penalty sweep on the L-shape against a Lagrange reference run.
/// Rows: lambda, rx, ry, rz, err (NaNs mark failed solves).
struct SweepResult {
  StudyResult table;
  Vec3 reference_position = Vec3::Zero();
  std::vector<double> errors;  // aligned with the scales
};

SweepResult run_penalty_sweep(const LShapeOptions& base, std::span<const double> scales);

/// Connector-beam comparison: one elastic element of radius R between B and
/// C with Young's modulus scaled by lambda, against the same Lagrange
/// reference. Requires a non-zero offset.
SweepResult run_connector_sweep(const LShapeOptions& base, std::span<const double> scales);

/// Crossed-beams mesh refinement against a fine reference mesh.
/// Rows: n_e, parity (0 even / 1 odd), e_rel; least-squares log-log slopes
/// reported per parity class.
struct ConvergenceResult {
  StudyResult table;
  double even_slope = 0.0;
  double odd_slope = 0.0;
  Vec3 reference_position = Vec3::Zero();
};

ConvergenceResult run_convergence_study(std::span<const int> n_e_values, int reference_n_e,
                                        Enforcement enforcement = Enforcement::kLagrange);

/// Loads the crossed-beams model in 10 steps, then rotates the clamp about
/// the e1-axis by 2 pi in `rotation_steps` increments with co-rotated
/// loads. Rows: step, time, internal_energy, penalty_energy.
struct ObjectivityResult {
  StudyResult table;
  double max_energy_drift = 0.0;    // relative, during the rotation phase
  bool loading_monotone = false;    // energy grows during the load phase
  double rotate_back_error = 0.0;   // state difference after the full turn
};

ObjectivityResult run_objectivity_test(const CrossedBeamsOptions& opt, int rotation_steps = 50,
                                       double newton_tol = 1e-14);

/// Displacement-controlled compression of the wire-wound cylinder.
/// Rows: u_hat, F_R (axial reaction at the top clamps).
struct CylinderResult {
  StudyResult table;
  int completed_steps = 0;
  double peak_force = 0.0;
  int peak_index = -1;
};

CylinderResult run_wire_cylinder(const WireCylinderOptions& opt);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace beamlink
