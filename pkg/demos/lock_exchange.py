"""Lock exchange: two water masses of different density released side by
side in a closed 20 m flume.

The dense water slumps under the light water, forming two gravity-current
fronts: a dense nose running along the bottom and a light front spreading
along the surface in the opposite direction. The script runs the case with
the semi-implicit integrator, tracks both fronts through the 1.5% density
contour, fits their speeds over t in [2, 10] s, and compares them with the
energy-balance estimate V = sqrt(0.25 g h rho).

Usage: python3 demos/lock_exchange.py [output_dir]
"""

import sys

import numpy as np

import mlswe as m
from mlswe.csvio import write_run


def main(out_dir="demo_output/lock_exchange"):
    print("Running the lock exchange (semi-implicit, dt = 0.1 s, 84 s)...")
    res = m.run_case(m.case_lock_exchange())
    r = res.report
    print(f"  verdict {r.verdict}, {r.steps} steps, "
          f"C_cel {r.max_ccel:.2f}, volume drift {r.volume_drift:.1e}")

    t, tops, bots = m.front_positions(res)
    surface, bottom = m.front_speed(res)
    v_theory = m.lock_exchange_theoretical_speed()
    print(f"\nFront speeds fitted over t in [2, 10] s:")
    print(f"  surface front : {surface:.4f} m/s")
    print(f"  bottom front  : {bottom:.4f} m/s")
    print(f"  energy-balance estimate: {v_theory:.4f} m/s")
    print("With a flat initial surface the bottom nose leads during the "
          "early transient (the pressure imbalance of the density step "
          "grows with depth); the two fronts approach a common speed later.")

    print(f"\n{'t (s)':>7} {'surface x (m)':>14} {'bottom x (m)':>13}")
    for k in range(0, len(t), 20):
        print(f"{t[k]:>7.1f} {tops[k]:>14.3f} {bots[k]:>13.3f}")

    out = write_run(res, out_dir)
    print(f"\nSnapshots written to {out}")


if __name__ == "__main__":
    main(*sys.argv[1:2])
