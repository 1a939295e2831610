"""Multi-seed normalized hypervolume table for the synthetic credit setting.

Sweeps both policy scopes over several generator seeds and prints the
seed-averaged nHV per (scope, justice, class) plus the det-to-stoch gain.
Result directories are cached under --out-root, so reruns are cheap.
"""

import argparse
import sys

import numpy as np

from fairfront.experiment import ExperimentConfig, extract_fronts, run_sweep
from fairfront.population import DgmConfig
from fairfront.stakeholders import credit_spec


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10_000)
    ap.add_argument("--seeds", type=int, default=5, help="seeds 0..k-1")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out-root", default="", help="cache sweeps here; empty keeps runs in memory")
    args = ap.parse_args(argv)

    acc = {}
    for scope in ("shared", "group_specific"):
        for seed in range(args.seeds):
            cfg = ExperimentConfig(
                dataset="synthetic_credit",
                stakeholders=credit_spec(),
                dgm=DgmConfig(n=args.n, seed=seed),
                classes=("det", "stoch"),
                scopes=(scope,),
                spaces=("utility",),
                out_dir=args.out_root,
            )
            for cell in extract_fronts(run_sweep(cfg, workers=args.workers)).cells:
                acc.setdefault((scope, cell.justice, cell.klass), []).append(cell.nhv)

    print("scope\tjustice\tnhv_det\tnhv_stoch\tgain")
    for scope in ("shared", "group_specific"):
        for justice in ("egalitarian", "rawlsian"):
            det = float(np.mean(acc[(scope, justice, "det")]))
            stoch = float(np.mean(acc[(scope, justice, "stoch")]))
            print("%s\t%s\t%.4f\t%.4f\t%+.4f" % (scope, justice, det, stoch, stoch - det))
    return 0


if __name__ == "__main__":
    sys.exit(main())
