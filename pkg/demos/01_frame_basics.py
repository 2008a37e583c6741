"""Tour of the rotating-frame machinery.

Builds the three-level Hamiltonian at the pulse peak, prints its exact
eigensystem, then calibrates the drive strength for a pi rotation and
checks the ratio-only scaling law of the calibration.
"""

import math

import numpy as np

from ramansim import (DriveConfig, RotationSpec, eigensystem, rotation_angle,
                      solve_xmax)

CHI = 15.0
DETUNING = 1500.0  # ns^-1, about 1 meV


def main():
    x = solve_xmax(math.pi, CHI)
    print("calibration for a pi rotation at chi = %g" % CHI)
    print("  x_max = Omega_peak / Delta = %.12g" % x)
    print("  accumulated angle = %.12g rad (target pi = %.12g)"
          % (rotation_angle(CHI, x), math.pi))
    print()

    omega = x * DETUNING
    es = eigensystem(omega * math.cos(math.pi / 4),
                     omega * math.sin(math.pi / 4), DETUNING)
    print("eigensystem at the pulse peak (Delta = %g ns^-1):" % DETUNING)
    print("  lambda = %s  (sum = Delta)" % np.array2string(es.values,
                                                           precision=6))
    print("  Omega = %.6g, Z = %.6g, phi = %.6g rad" % (es.omega, es.z,
                                                        es.phi))
    print("  dark state  = %s" % np.array2string(es.vectors[:, 0],
                                                 precision=6))
    print()

    # the calibration depends only on Lambda/chi, so doubling both
    # reproduces the same x_max bit for bit
    pairs = [(math.pi, 10.0), (2.0 * math.pi, 20.0), (4.0 * math.pi, 40.0)]
    print("scaling law x_max(Lambda, chi) = x_max(2 Lambda, 2 chi):")
    for angle, chi in pairs:
        print("  Lambda = %-10.6g chi = %-6g x_max = %.15g"
              % (angle, chi, solve_xmax(angle, chi)))
    print()

    drive = DriveConfig.for_rotation(math.pi, DETUNING, CHI / DETUNING)
    spec = RotationSpec.from_angles(math.pi)
    print("drive window: t in [%.4f, %.4f] ns, tau = %.4f ns"
          % (drive.t_initial, drive.t_final, drive.tau))
    print("target unitary (axis %s):"
          % np.array2string(spec.axis, precision=3, suppress_small=True))
    print(np.array2string(spec.unitary(), precision=6, suppress_small=True))


if __name__ == "__main__":
    main()
