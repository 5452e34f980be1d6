"""Interaction times of the three-state approximation against mu, for each pressureless case.

    python3 scripts/tracking_scaling.py

For every case the first and last interaction times are fitted as C mu^p.
The first interaction scales like sqrt(mu). In cases B1 and B3 the second
interaction time tends to a positive limit (the catch-up time of the limit
point mass with the far contact), which is printed for comparison.
"""

import numpy as np

from shadowwave.backward import DeltaRiemannDatum
from shadowwave.models import GasModel, State
from shadowwave.tracker import run

CASES = {
    "A1": (State(1, 0.5), State(2, 1.0), 0.0),
    "A3": (State(1, -1), State(2, 0.0), 0.5),
    "B1": (State(1, 1), State(2, -1), -2.0),
    "B2": (State(1, 1), State(2, -1), 0.0),
    "B3": (State(1, 1), State(2, -1), 2.0),
}
MUS = np.array([1e-2, 1e-3, 1e-4, 1e-5, 1e-6])


def main() -> None:
    P = GasModel.pressureless()
    print(f"{'case':5}{'p(first)':>10}{'p(last)':>10}{'T_last(1e-6)':>14}{'limit':>10}  events")
    for name, (left, right, ud) in CASES.items():
        first, last, n = [], [], set()
        for mu in MUS:
            ts, cl = run(DeltaRiemannDatum(left, right, 1.0, float(mu), ud), P, 5.0)
            first.append(ts.events[0].time)
            last.append(ts.events[-1].time)
            n.add(len(ts.events))
        p1 = np.polyfit(np.log(MUS), np.log(first), 1)[0]
        p2 = np.polyfit(np.log(MUS), np.log(last), 1)[0]
        lim = cl.phases[-1][0] if cl.phases else 0.0
        print(f"{name:5}{p1:10.3f}{p2:10.3f}{last[-1]:14.6g}{lim:10.6g}  {sorted(n)}")


if __name__ == "__main__":
    main()
