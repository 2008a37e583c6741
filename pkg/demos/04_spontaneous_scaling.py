"""How the spontaneous-emission error scales with gamma and Delta.

Three quick scans at fixed tau = 14 ps (kept just above the chi >= 20
regime guard at Delta = 1 meV):
  1. error vs gamma at Delta = 2 meV, with the linear fit E = E0 + k*gamma
  2. error vs Delta at gamma = 4 ns^-1, showing the 1/Delta law
  3. the exact error over the estimate Lambda*gamma/Delta for both
     dissipator prefactor conventions

Takes ~10 s; every point is a full master-equation run.
"""

import math

from ramansim import ratio_grid, sweep_error_vs_delta, sweep_error_vs_gamma

TAU = 0.014
MEV = 1500.0


def main():
    gammas = [2.0, 4.0, 6.0, 8.0, 10.0]
    table, fits = sweep_error_vs_gamma([2.0 * MEV], gammas, math.pi, TAU)
    print("error vs gamma at Delta = 2 meV (chi = %.3g):" % (2.0 * MEV * TAU))
    for _det, g, err, floor, est, ratio in table.rows:
        print("  gamma = %-4g E = %.4e   estimate = %.4e   ratio = %.3f"
              % (g, err, est, ratio))
    fit = fits[2.0 * MEV]
    print("  fit: E = E0 + k*gamma, k = %.4g, R^2 = %.6f" %
          (fit.coefficient, fit.r_squared))
    print()

    dets = [MEV, 2.0 * MEV, 4.0 * MEV]
    table, fits = sweep_error_vs_delta([4.0], dets, math.pi, TAU)
    print("error vs Delta at gamma = 4 ns^-1 (scaled excess should be flat):")
    for _g, det, err, floor, _est, scaled in table.rows:
        print("  Delta = %-6g E = %.4e   floor = %.2e   (E-E0)*Delta = %.3f"
              % (det, err, floor, scaled))
    print("  inverse fit coefficient c = %.4g (E ~ c/Delta), R^2 = %.6f"
          % (fits[4.0].coefficient, fits[4.0].r_squared))
    print()

    print("exact / estimate with both dissipator conventions:")
    for pf in (0.5, 1.0):
        table = ratio_grid([4.0, 10.0], dets[:2], math.pi, TAU,
                           prefactor=pf)
        cells = "  ".join("%.3f" % row[4] for row in table.rows)
        print("  prefactor %.1f: ratios %s" % (pf, cells))
    print()
    print("the estimate assumes every decay event is fatal; with the "
          "standard prefactor 1/2 about half the weight returns to the "
          "bright state, so those ratios sit below one")


if __name__ == "__main__":
    main()
