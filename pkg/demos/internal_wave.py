"""Internal gravity wave in a closed stratified basin.

A 2 m long, 0.3 m deep tank holds two water masses separated by a
pycnocline at 0.15 m depth, locally deflected by a Gaussian bump. Releasing
the deflection launches internal waves that travel along the interface far
more slowly than the surface gravity waves, which is exactly the regime the
semi-implicit integrator is built for: the fast surface waves are handled
implicitly, so the step size is limited only by the slow internal dynamics.

The script runs the case with the semi-implicit integrator at several step
sizes, compares each against a small-step explicit reference, and writes
the snapshots of the largest-step run to CSV.

Usage: python3 demos/internal_wave.py [output_dir]
"""

import sys

import mlswe as m
from mlswe.csvio import write_run


def main(out_dir="demo_output/internal_wave"):
    print("Explicit reference run (RK3, celerity Courant number 0.1)...")
    ref = m.run_case(m.case_internal_wave(
        integrator="rk3", dt=None, target_ccel=0.1, t_final=4.8,
        output_interval=4.8))
    print(f"  {ref.report.steps} steps, verdict {ref.report.verdict}")

    print(f"\n{'dt (s)':>8} {'C_cel':>7} {'C_vel':>7} {'Err_u[l2]':>10} "
          f"{'Err_rho[l2]':>12} {'steps':>6}")
    last = None
    for dt in (0.01, 0.02, 0.04):
        res = m.run_case(m.case_internal_wave(dt=dt, t_final=4.8,
                                              output_interval=4.8))
        errs = m.error_norms(res.state_at(4.8), ref.state_at(4.8), ref.grid)
        r = res.report
        print(f"{dt:>8} {r.max_ccel:>7.2f} {r.max_cvel:>7.3f} "
              f"{errs['u_l2']:>10.2e} {errs['rho_l2']:>12.2e} {r.steps:>6}")
        last = res

    out = write_run(last, out_dir)
    print(f"\nSnapshots of the dt=0.04 run written to {out}")
    print("Note: the step sizes above exceed the explicit stability limit "
          "by up to a factor of ten; the semi-implicit solver stays stable "
          "because the fast barotropic waves are treated implicitly.")


if __name__ == "__main__":
    main(*sys.argv[1:2])
