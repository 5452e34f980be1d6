"""Energy production as a function of u_delta, limit and finite mu, for one datum per model.

    python3 scripts/selection_profiles.py --out-dir profiles

Writes ``<model>.csv`` with columns u_delta, D_limit, D_finite, structure and
prints the selected u_delta with both maxima.
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from shadowwave.backward import DeltaRiemannDatum, production_profile, select
from shadowwave.models import GasModel, State

DATA = {
    "pressureless": (GasModel.pressureless(), State(1.0, 2.0), State(4.0, -1.0)),
    "chaplygin": (GasModel.chaplygin(), State(1.0, 2.0), State(1.5, -2.0)),
    "generalized_0.5": (GasModel.generalized(0.5), State(1.0, 1.5), State(2.0, -1.0)),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="profiles")
    ap.add_argument("--mu", type=float, default=1e-4)
    ap.add_argument("--n", type=int, default=241)
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, (model, left, right) in DATA.items():
        d = DeltaRiemannDatum(left, right, 1.0, args.mu)
        grid = np.linspace(min(left.u, right.u) - 1.0, max(left.u, right.u) + 1.0, args.n)
        lim = production_profile(d, model, grid, "limit")
        fin = production_profile(d, model, grid, "finite")
        with open(out / f"{name}.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["u_delta", "D_limit", "D_finite", "structure"])
            for (u, dl, _), (_, df, lab) in zip(lim, fin):
                w.writerow([repr(u), repr(dl), repr(df), lab])
        rep = select(d, model)
        print(f"{name:16} u*={rep.u_delta_star:+.6f}  D*={rep.d_at_star:+.6f}  "
              f"u*(mu)={rep.u_delta_mu:+.6f}  label={rep.case_label}")


if __name__ == "__main__":
    main()
