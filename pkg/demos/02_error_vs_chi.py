"""Non-adiabatic gate error versus the adiabaticity parameter chi.

For chi below ~10 the error oscillates as the residual amplitude in the
second adiabatic state interferes with itself; past chi ~15 the decay is
steady and the error drops below 1e-4.
"""

import math

import numpy as np

from ramansim import sweep_error_vs_chi

ANGLES = ((math.pi / 2, "pi/2"), (math.pi, "pi"), (2.0 * math.pi, "2pi"))


def main():
    chis = np.concatenate([np.linspace(2.0, 9.5, 16), np.arange(10.0, 31.0)])
    table = sweep_error_vs_chi([a for a, _ in ANGLES], chis)

    by_angle = {}
    for angle, chi, _x, err, _c, _d, _p in table.rows:
        by_angle.setdefault(angle, []).append((chi, err))

    header = "chi     " + "".join("E(%s)        " % n for _, n in ANGLES)
    print(header)
    print("-" * len(header))
    for i, chi in enumerate(chis):
        cells = "".join("%-13.3e" % by_angle[a][i][1] for a, _ in ANGLES)
        print("%-8.3g%s" % (chi, cells))

    print()
    for angle, name in ANGLES:
        errs = np.array([e for _, e in by_angle[angle]])
        small = errs[chis <= 9.5]
        print("Lambda = %-5s small-chi max %.3e, E(chi=15) = %.3e, "
              "E(chi=30) = %.3e"
              % (name, small.max(), errs[chis == 15.0][0],
                 errs[chis == 30.0][0]))


if __name__ == "__main__":
    main()
