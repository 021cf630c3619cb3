#pragma once

#include <array>
#include <functional>

#include "beamlink/element.hpp"
#include "beamlink/section.hpp"
#include "beamlink/so3.hpp"
#include "beamlink/types.hpp"

// Point coupling of two beam cross-sections. Constraints are expressed in
// the cross-section kinematics (centroid position r, triad Lambda) only, so
// they combine with any element providing those plus the maps H/N.
//
// Positional constraint: g_r = r_2 - r_1 - 1/2 (Lambda_1 1R0 + Lambda_2 2R0),
// the symmetrized spatial deformation measure built from the frozen material
// offsets iR0 = Lambda0_i^T (r0_2 - r0_1).
//
// Rotational constraint: g_theta = log((Lambda_2 Lambda0_2^T)(Lambda_1 Lambda0_1^T)^T),
// the rotation vector of the relative effective rotation; well posed for
// |g_theta| < pi.
//
// Generalized forces come from the objective variation of the constraints,
// side 1 carrying the negative sign and side 2 the positive one; the
// constraint rows carry the full variation. All rotational derivative blocks
// are evaluated with forward-mode dual numbers seeded on the two spins.

namespace beamlink {

/// Frozen reference data of one coupling pair.
struct CouplingReference {
  Vec3 R01 = Vec3::Zero();  // material offset in the side-1 frame
  Vec3 R02 = Vec3::Zero();  // material offset in the side-2 frame
  Mat3 Lambda01 = Mat3::Identity();
  Mat3 Lambda02 = Mat3::Identity();

  static CouplingReference from_states(const CrossSectionState& ref1,
                                       const CrossSectionState& ref2) {
    CouplingReference out;
    const Vec3 d = ref2.r - ref1.r;
    out.R01 = ref1.triad.transpose() * d;
    out.R02 = ref2.triad.transpose() * d;
    out.Lambda01 = ref1.triad;
    out.Lambda02 = ref2.triad;
    return out;
  }
};

/// Relative kinematics of a coupled pair; both parts vanish at the
/// reference configuration.
struct GeneralizedDeformation {
  Vec3 g_r = Vec3::Zero();      // [m]
  Vec3 g_theta = Vec3::Zero();  // [rad]
};

/// Constraint forces: lambda_r couples positions [N], lambda_theta
/// orientations [Nm].
struct LagrangeMultipliers {
  Vec3 lambda_r = Vec3::Zero();
  Vec3 lambda_theta = Vec3::Zero();
};

/// Cross-section-level blocks of one constraint (positional or rotational):
///   f_i = Cq{i}l * lambda          generalized force on side i,
///   Cq{i}q{j} = d f_i / d q_j      its linearization,
///   Clq{i}   = d g / d q_i         constraint row.
struct CouplingBlocks {
  Eigen::Matrix<double, 6, 3> Cq1l = Eigen::Matrix<double, 6, 3>::Zero();
  Eigen::Matrix<double, 6, 3> Cq2l = Eigen::Matrix<double, 6, 3>::Zero();
  Eigen::Matrix<double, 6, 6> Cq1q1 = Eigen::Matrix<double, 6, 6>::Zero();
  Eigen::Matrix<double, 6, 6> Cq1q2 = Eigen::Matrix<double, 6, 6>::Zero();
  Eigen::Matrix<double, 6, 6> Cq2q1 = Eigen::Matrix<double, 6, 6>::Zero();
  Eigen::Matrix<double, 6, 6> Cq2q2 = Eigen::Matrix<double, 6, 6>::Zero();
  Eigen::Matrix<double, 3, 6> Clq1 = Eigen::Matrix<double, 3, 6>::Zero();
  Eigen::Matrix<double, 3, 6> Clq2 = Eigen::Matrix<double, 3, 6>::Zero();
};

Vec3 positional_gap(const CrossSectionState& state1, const CrossSectionState& state2,
                    const CouplingReference& ref);

/// Throws SingularConfigurationError for relative rotations at or beyond
/// pi - 1e-6.
Vec3 rotational_gap(const CrossSectionState& state1, const CrossSectionState& state2,
                    const CouplingReference& ref);

CouplingBlocks coupling_blocks_positional(const CrossSectionState& state1,
                                          const CrossSectionState& state2,
                                          const CouplingReference& ref, const Vec3& lambda_r);

CouplingBlocks coupling_blocks_rotational(const CrossSectionState& state1,
                                          const CrossSectionState& state2,
                                          const CouplingReference& ref, const Vec3& lambda_theta);

/// Central-difference evaluation of the rotational blocks, kept as an
/// independent cross-check of the dual-number path.
CouplingBlocks coupling_blocks_rotational_fd(const CrossSectionState& state1,
                                             const CrossSectionState& state2,
                                             const CouplingReference& ref,
                                             const Vec3& lambda_theta, double step = 1e-6);

/// lambda = eps * g, the regularized multiplier.
LagrangeMultipliers penalty_multiplier(const GeneralizedDeformation& gap, double eps_r,
                                       double eps_theta);

/// Rule-of-thumb penalty parameters: eps_r = scale * Ebar * Rbar,
/// eps_theta = scale * Ebar * Rbar^3 with arithmetic means over both sides.
std::pair<double, double> default_penalties(const CrossSectionConstitutive& mat1,
                                            const CrossSectionConstitutive& mat2, double scale);

/// Result of the closest-point projection between two reference centerlines.
struct ProjectionResult {
  double xi_a = 0.0;
  double xi_b = 0.0;
  double distance = 0.0;
  double angle = 0.0;  // interaction angle between the tangents [rad]
};

/// Stationary point of the mutual centerline distance, seeded from an 11x11
/// parameter grid and refined by Newton iteration; the result is clamped to
/// [-1,1]^2. Throws ProjectionError on non-convergence (50 iterations) or if
/// the interaction angle is below 0.1 rad.
ProjectionResult closest_point_projection(const BeamElement& elem_a, const BeamElement& elem_b);

}  // namespace beamlink
