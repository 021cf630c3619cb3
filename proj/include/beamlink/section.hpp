#pragma once

#include <cmath>

#include "beamlink/types.hpp"

namespace beamlink {

/// Constitutive data of one beam cross-section (SI units).
struct CrossSectionConstitutive {
  double E = 0.0;    // Young's modulus [N/m^2]
  double G = 0.0;    // shear modulus [N/m^2]
  double A = 0.0;    // area [m^2]
  double A_s = 0.0;  // effective shear area [m^2]
  double I2 = 0.0;   // bending second moment [m^4]
  double I3 = 0.0;   // bending second moment [m^4]
  double J = 0.0;    // polar moment [m^4]
  double R = 0.0;    // section radius [m]

  /// Circular section from (E, nu, R); G = E / (2 (1 + nu)).
  static CrossSectionConstitutive circular(double E, double nu, double R,
                                           double shear_area_factor = 1.0) {
    CrossSectionConstitutive s;
    s.E = E;
    s.G = E / (2.0 * (1.0 + nu));
    s.R = R;
    s.A = M_PI * R * R;
    s.A_s = shear_area_factor * s.A;
    s.I2 = M_PI * R * R * R * R / 4.0;
    s.I3 = s.I2;
    s.J = 2.0 * s.I2;
    return s;
  }

  /// diag(EA, G A_s, G A_s), conjugate to the material force strain.
  Vec3 force_stiffness() const { return Vec3(E * A, G * A_s, G * A_s); }

  /// diag(GJ, E I2, E I3), conjugate to the material curvature.
  Vec3 moment_stiffness() const { return Vec3(G * J, E * I2, E * I3); }

  void validate() const {
    if (!(E > 0.0 && G > 0.0 && A > 0.0 && A_s > 0.0 && I2 > 0.0 && I3 > 0.0 && J > 0.0 &&
          R > 0.0))
      throw ModelError("cross-section constitutive values must be strictly positive");
  }
};

}  // namespace beamlink
