"""A pi rotation at Delta = 1500 ns^-1 with tau = 10 ps, traced in time.

Two runs of the same drive starting from |0>: one closed, one with
spontaneous emission out of |X> at gamma0 = gamma1 = 20 ns^-1 (a
deliberately harsh rate so the decay is visible in the populations).
The closed run transfers essentially all population to |1>; the open
run leaks a couple percent back to |0> and the purity dips right where
the pulse peaks.

Pass a directory as the first argument to also dump both traces as CSV.
"""

import math
import os
import sys

from ramansim import (DecayConfig, DriveConfig, estimate_spontaneous_error,
                      gate_error_mixed, records_to_table, trace_run)
from ramansim.cli import write_table

DETUNING = 1500.0
TAU = 0.01
GAMMA = 20.0


def milestones(records, label):
    print(label)
    n = len(records)
    for i in (0, n // 4, n // 2, (3 * n) // 4, n - 1):
        r = records[i]
        print("  t = %+8.4f ns   pop = (%.5f, %.5f, %.2e)   purity = %.6f"
              % (r.t, r.pop0, r.pop1, r.pop_x, r.purity))
    last = records[-1]
    print("  final: rho_00 = %.6f, rho_11 = %.6f, rho_XX = %.3e"
          % (last.pop0, last.pop1, last.pop_x))
    print()


def main():
    drive = DriveConfig.for_rotation(math.pi, DETUNING, TAU)
    print("chi = %.4g, x_max = %.6g, window [%.3f, %.3f] ns"
          % (drive.chi, drive.x_max, drive.t_initial, drive.t_final))
    print()

    closed = trace_run(drive, record_stride=5)
    milestones(closed, "closed system (gamma = 0):")

    decay = DecayConfig(gamma0=GAMMA, gamma1=GAMMA)
    open_records = trace_run(drive, decay, record_stride=5)
    milestones(open_records, "with decay (gamma0 = gamma1 = %g ns^-1):"
               % GAMMA)

    # worst-case gate error over initial states, against the analytic
    # estimate Lambda * gamma / Delta
    mild = DecayConfig(gamma0=5.0, gamma1=5.0)
    err = gate_error_mixed(drive, mild)
    est = estimate_spontaneous_error(math.pi, mild.total, DETUNING)
    print("worst-case error at gamma_total = %g: %.4g" % (mild.total, err))
    print("analytic estimate Lambda*gamma/Delta: %.4g  (ratio %.3f)"
          % (est, err / est))

    if len(sys.argv) > 1:
        outdir = sys.argv[1]
        os.makedirs(outdir, exist_ok=True)
        for name, recs, dec in (("trace_closed.csv", closed, DecayConfig()),
                                ("trace_decay.csv", open_records, decay)):
            path = os.path.join(outdir, name)
            write_table(records_to_table(recs, drive, dec), path)
            print("wrote %s" % path)


if __name__ == "__main__":
    main()
