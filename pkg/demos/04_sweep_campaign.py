"""Full coupling-constant campaigns for both built-in case studies.

For each K the sweep reports the iteration at which log10(2*delta) first
reaches -0.3 and the auxiliary-system verdict.  The headline pattern: as K
grows, the slave's error growth slows (the crossing arrives later), because
synchronization ties the two formulation variants to the same drive.

Equivalent CLI:  synclbe sweep --case duffing-lorenz --out results/
Set SYNCLBE_WORKERS (or pass workers=) to parallelize across K.
"""

import os

from synclbe import case_study, run_sweep
from synclbe.csvio import fmt_float, write_sweep_csv

OUT = os.path.join(os.path.dirname(__file__), "output")


def show(result):
    print(f"{'K':>6}  {'crossing':>9}  {'saturated':>9}  {'sync':>5}  {'sup distance':>13}")
    for rec in result.records:
        crossing = "never" if rec.never_crossed else str(rec.crossing_index)
        print(f"{fmt_float(rec.k):>6}  {crossing:>9}  {str(rec.saturated).lower():>9}"
              f"  {str(rec.synchronized).lower():>5}  {rec.sync_metric:13.4e}")


def main():
    os.makedirs(OUT, exist_ok=True)
    for case in ("duffing-lorenz", "rossler-duffing"):
        print(f"\n=== {case} ===")
        result = run_sweep(case_study(case))
        show(result)
        path = os.path.join(OUT, f"sweep_{case}.csv")
        write_sweep_csv(result, path)
        print(f"config hash {result.provenance['config_hash'][:12]}..., wrote {path}")


if __name__ == "__main__":
    main()
