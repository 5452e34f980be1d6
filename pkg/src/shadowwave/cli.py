"""``shadowwave`` command line: riemann, select, track, verify, sweep.

Scenario files are strict UTF-8 JSON::

    {
      "model": {"kind": "generalized_chaplygin", "alpha": 0.5},
      "left": {"rho": 1.0, "u": 1.0},
      "right": {"rho": 1.0, "u": -1.0},
      "delta": {"xi_delta": 1.0, "u_delta": 0.0},
      "mu": 1e-6, "epsilon": 1e-4, "t_end": 1.0,
      "eps_schedule": [1e-3, 1e-4, 1e-5],
      "grid": {"lo": -2.0, "hi": 2.0, "n": 201},
      "times": [0.5, 1.0]
    }

Only ``model``, ``left`` and ``right`` are required (``delta`` for select/track).
Sweep files are described in :func:`cmd_sweep`.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import backward, energy, oracles, tracker
from .errors import (
    DomainError,
    ModelError,
    PreconditionError,
    ShadowWaveError,
    UnsupportedInteraction,
)
from .models import GasModel, Kind, State, energy_pair
from .riemann import (
    ContactDiscontinuity,
    DeltaShock,
    RarefactionFan,
    Shock,
    VacuumFan,
    WaveFan,
    solve,
)
from .sampling import Box, overlap_pair, random_state, overlap_row

log = logging.getLogger("shadowwave")

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_UNSUPPORTED = 0, 2, 3, 4


class ScenarioError(ValueError):
    """Malformed scenario; the message is anchored as ``path:line: ...``."""


# ---------------------------------------------------------------------------
# strict parsing


def _line_of(text: str, key: str) -> int:
    idx = text.find(f'"{key}"')
    return text.count("\n", 0, idx) + 1 if idx >= 0 else 1


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ScenarioError(f"duplicate key {k!r}")
        out[k] = v
    return out


class _Reader:
    def __init__(self, text: str, path: str):
        self.text, self.path = text, path

    def fail(self, key: str, msg: str):
        raise ScenarioError(f"{self.path}:{_line_of(self.text, key)}: {msg}")

    def check_keys(self, obj: Any, where: str, allowed: set[str], required: set[str] = frozenset()):
        if not isinstance(obj, dict):
            self.fail(where, f"{where} must be an object")
        for k in obj:
            if k not in allowed:
                self.fail(k, f"unknown field {k!r} in {where}")
        for k in required:
            if k not in obj:
                self.fail(where, f"missing field {k!r} in {where}")

    def number(self, obj: dict, key: str, default: float | None = None, positive: bool = False) -> float | None:
        if key not in obj:
            return default
        v = obj[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            self.fail(key, f"{key} must be a finite number")
        if positive and v <= 0:
            self.fail(key, f"{key} must be positive")
        return float(v)

    def model(self, obj: Any) -> GasModel:
        self.check_keys(obj, "model", {"kind", "alpha"}, {"kind"})
        try:
            return GasModel(Kind(obj["kind"]), self.number(obj, "alpha"))
        except ValueError as exc:
            self.fail("kind" if "alpha" not in obj else "alpha", str(exc))

    def state(self, obj: Any, where: str) -> State:
        self.check_keys(obj, where, {"rho", "u"}, {"rho", "u"})
        try:
            return State(self.number(obj, "rho"), self.number(obj, "u"))
        except DomainError as exc:
            self.fail(where, f"{where}: {exc}")


def _load_json(path: str) -> tuple[str, Any]:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"{path}:1: cannot read scenario ({exc.strerror})") from exc
    try:
        return text, json.loads(text, object_pairs_hook=_no_duplicates, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    except ScenarioError as exc:
        raise ScenarioError(f"{path}:1: {exc}") from exc


def _reject_constant(name: str):
    raise ScenarioError(f"non-finite literal {name} is not allowed")


@dataclass
class Grid:
    lo: float
    hi: float
    n: int = 201

    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)


@dataclass
class Scenario:
    model: GasModel
    left: State
    right: State
    xi_delta: float | None = None
    u_delta: float | None = None
    mu: float = 1e-6
    epsilon: float = 1e-4
    t_end: float = 1.0
    eps_schedule: tuple[float, ...] = (1e-3, 1e-4, 1e-5)
    grid: Grid | None = None
    times: list[float] = field(default_factory=list)

    def datum(self) -> backward.DeltaRiemannDatum:
        if self.xi_delta is None:
            raise ScenarioError("this command needs a 'delta' block with xi_delta")
        return backward.DeltaRiemannDatum(self.left, self.right, self.xi_delta, self.mu, self.u_delta)


_TOP = {"model", "left", "right", "delta", "mu", "epsilon", "t_end", "eps_schedule", "grid", "times"}


def load_scenario(path: str) -> Scenario:
    text, raw = _load_json(path)
    r = _Reader(text, path)
    r.check_keys(raw, "scenario", _TOP, {"model", "left", "right"})
    sc = Scenario(r.model(raw["model"]), r.state(raw["left"], "left"), r.state(raw["right"], "right"))
    if "delta" in raw:
        r.check_keys(raw["delta"], "delta", {"xi_delta", "u_delta"}, {"xi_delta"})
        sc.xi_delta = r.number(raw["delta"], "xi_delta", positive=True)
        sc.u_delta = r.number(raw["delta"], "u_delta")
    sc.mu = r.number(raw, "mu", sc.mu, positive=True)
    sc.epsilon = r.number(raw, "epsilon", sc.epsilon, positive=True)
    sc.t_end = r.number(raw, "t_end", sc.t_end)
    if sc.t_end < 0:
        r.fail("t_end", "t_end must be non-negative")
    if "eps_schedule" in raw:
        es = raw["eps_schedule"]
        if not isinstance(es, list) or len(es) < 3 or not all(
            isinstance(e, (int, float)) and not isinstance(e, bool) and e > 0 for e in es
        ):
            r.fail("eps_schedule", "eps_schedule must list at least three positive numbers")
        if any(b >= a for a, b in zip(es, es[1:])):
            r.fail("eps_schedule", "eps_schedule must be strictly decreasing")
        sc.eps_schedule = tuple(float(e) for e in es)
    if "grid" in raw:
        g = raw["grid"]
        r.check_keys(g, "grid", {"lo", "hi", "n"}, {"lo", "hi"})
        n = g.get("n", 201)
        if isinstance(n, bool) or not isinstance(n, int) or n < 2:
            r.fail("n", "grid.n must be an integer >= 2")
        lo, hi = r.number(g, "lo"), r.number(g, "hi")
        if not hi > lo:
            r.fail("grid", "grid needs hi > lo")
        sc.grid = Grid(lo, hi, n)
    if "times" in raw:
        ts = raw["times"]
        if not isinstance(ts, list) or not all(
            isinstance(t, (int, float)) and not isinstance(t, bool) and t >= 0 for t in ts
        ):
            r.fail("times", "times must be a list of non-negative numbers")
        sc.times = [float(t) for t in ts]
    return sc


# ---------------------------------------------------------------------------
# deterministic output


def _fmt(x: float) -> str:
    if math.isnan(x):
        return "null"
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return "%.17g" % (x + 0.0)


def dumps(obj: Any, indent: int = 0) -> str:
    """JSON with every float printed to 17 significant digits."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        body = ",\n".join(f"{inner}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items())
        return "{\n" + body + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(inner + dumps(v, indent + 1) for v in obj) + "\n" + pad + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _csv(header: list[str], rows: list[list[Any]]) -> str:
    def cell(v):
        if isinstance(v, (float, np.floating)):
            return "%.17g" % float(v)
        return "" if v is None else str(v)

    lines = [",".join(header)] + [",".join(cell(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _state(s: State) -> dict:
    return {"rho": s.rho, "u": s.u}


def _wave(model: GasModel, pair, w) -> dict:
    d: dict[str, Any] = {}
    if isinstance(w, Shock):
        d = {"type": "shock", "family": w.family, "speed": w.speed}
    elif isinstance(w, ContactDiscontinuity):
        d = {"type": "contact", "speed": w.speed}
    elif isinstance(w, RarefactionFan):
        lo, hi = w.speed_range()
        d = {"type": "rarefaction", "family": w.family, "head": lo, "tail": hi}
    elif isinstance(w, VacuumFan):
        d = {"type": "vacuum", "head": w.u_left, "tail": w.u_right}
    elif isinstance(w, DeltaShock):
        d = {
            "type": "delta_shock",
            "speed": float(w.dss.us(0.0)),
            "strength_rate": float(w.dss.kappa),
            "overcompressive": w.overcompressive,
        }
    d["left"], d["right"] = _state(w.left), _state(w.right)
    d["D"] = energy.local_production(model, pair, w, 0.0)
    return d


def _fan(model: GasModel, fan: WaveFan) -> dict:
    pair = energy_pair(model)
    return {
        "label": fan.label,
        "D_total": energy.fan_production(model, pair, fan, 0.0),
        "waves": [_wave(model, pair, w) for w in fan.waves],
    }


def _model(m: GasModel) -> dict:
    out: dict[str, Any] = {"kind": m.kind.value}
    if m.alpha is not None:
        out["alpha"] = m.alpha
    return out


# ---------------------------------------------------------------------------
# commands


def cmd_riemann(sc: Scenario, args) -> str:
    fans = solve(sc.model, sc.left, sc.right)
    chosen = energy.admissible_selection(sc.model, fans) if len(fans) > 1 else fans[0]
    return dumps(
        {
            "model": _model(sc.model),
            "left": _state(sc.left),
            "right": _state(sc.right),
            "fans": [_fan(sc.model, f) for f in fans],
            "selected": fans.index(chosen),
        }
    )


def cmd_select(sc: Scenario, args) -> str:
    d = sc.datum()
    rep = backward.select(d, sc.model)
    if args.profile:
        grid = sc.grid.points() if sc.grid else np.linspace(
            min(sc.left.u, sc.right.u) - 1.0, max(sc.left.u, sc.right.u) + 1.0, 201
        )
        prof = backward.production_profile(d, sc.model, grid, mode="finite")
        _write(args.profile, _csv(["u_delta", "D", "structure"], [[u, v, lab] for u, v, lab in prof]))
    return dumps(
        {
            "model": _model(sc.model),
            "u_delta_star": rep.u_delta_star,
            "D_at_star": rep.d_at_star,
            "case_label": rep.case_label,
            "tie_break_applied": rep.tie_break_applied,
            "u_delta_mu": rep.u_delta_mu,
            "D_mu": rep.d_mu,
            "mu": d.mu,
            "candidates": [{"u_delta": u, "D": v} for u, v in rep.candidates],
        }
    )


def cmd_track(sc: Scenario, args) -> str:
    d = sc.datum()
    if d.u_delta is None:
        d = d.with_u_delta(backward.select(d, sc.model).u_delta_star)
    ts, cl = tracker.run(d, sc.model, sc.t_end, sc.epsilon)
    if args.profile:
        times = sc.times or [sc.t_end]
        grid = sc.grid.points() if sc.grid else np.linspace(-2.0, 2.0, 201)
        rows = []
        for t in times:
            if t > sc.t_end:
                raise PreconditionError(f"profile time {t} is beyond t_end")
            for r in tracker.sample_profile(ts, t, grid):
                rows.append([t, r.x, r.rho, r.u, r.singular_mass, r.front_x])
        _write(args.profile, _csv(["t", "x", "rho", "u", "singular_mass", "front_x"], rows))
    lim = cl.at(sc.t_end)
    payload = {
        "model": _model(sc.model),
        "u_delta": d.u_delta,
        "mu": d.mu,
        "t_end": sc.t_end,
        "events": [
            {
                "time": e.time,
                "position": e.position,
                "kind": e.kind,
                "participants": list(e.participants),
                "xi_delta": e.xi_delta,
                "u_delta": e.u_delta,
            }
            for e in ts.events
        ],
        "fronts": [
            {"kind": f.kind, "position": float(f.position(sc.t_end)), "strength": f.strength(sc.t_end),
             "speed": f.velocity(sc.t_end)}
            for f in ts.fronts
        ],
        "mass_drift": abs(ts.conserved_mass(sc.t_end) - ts.conserved_mass(0.0)),
        "limit": {
            "label": cl.label,
            "case": cl.case,
            "xi_t_end": None if lim is None else float(lim.xi(sc.t_end)),
            "us_t_end": None if lim is None else float(lim.us(sc.t_end)),
            "c_t_end": None if lim is None else float(lim.c(sc.t_end)),
            "note": cl.note,
        },
    }
    return dumps(payload)


def cmd_verify(sc: Scenario, args) -> str:
    fans = solve(sc.model, sc.left, sc.right)
    out = []
    for i, fan in enumerate(fans):
        rep = oracles.weak_residual(sc.model, fan, sc.eps_schedule)
        out.append({"fan": i, "label": fan.label, "eps": rep.eps, "max_residual": rep.max_residual,
                    "order": rep.order, "order_per_equation": rep.order_per_equation})
    return dumps({"model": _model(sc.model), "reports": out})


_SWEEP_KEYS = {"table", "model", "alphas", "samples", "points", "xi_delta", "mu", "mus", "datum", "rho", "u"}


def cmd_sweep(path: str, args) -> str:
    """Tables driven by a sweep file with ``"table"`` set to one of

    * ``select``: rows of the selector over ``points`` (list of {left, right, xi_delta})
      or ``samples`` random data drawn in the ``rho``/``u`` box;
    * ``overlap``: shadow-vs-classical production in the overlap, ``samples`` per alpha;
    * ``mu_scaling``: first interaction time and post-merge (xi, u) over ``mus`` for ``datum``.
    """
    text, raw = _load_json(path)
    r = _Reader(text, path)
    r.check_keys(raw, "sweep", _SWEEP_KEYS, {"table"})
    rng = np.random.default_rng(args.seed)
    table = raw["table"]
    if table == "select":
        model = r.model(raw.get("model", {"kind": "pressureless"}))
        mu = args.mu if args.mu is not None else r.number(raw, "mu", 1e-6, positive=True)
        data = []
        if "points" in raw:
            for p in raw["points"]:
                r.check_keys(p, "points", {"left", "right", "xi_delta", "u_delta"}, {"left", "right", "xi_delta"})
                data.append((r.state(p["left"], "left"), r.state(p["right"], "right"), r.number(p, "xi_delta", positive=True)))
        else:
            box = Box(tuple(raw.get("rho", (0.2, 5.0))), tuple(raw.get("u", (-3.0, 3.0))))
            xi = r.number(raw, "xi_delta", 1.0, positive=True)
            for _ in range(int(raw.get("samples", 10))):
                data.append((random_state(rng, box), random_state(rng, box), xi))
        rows = []
        for left, right, xi in data:
            rep = backward.select(backward.DeltaRiemannDatum(left, right, xi, mu), model)
            rows.append([left.rho, left.u, right.rho, right.u, xi, mu, rep.u_delta_star, rep.d_at_star,
                         rep.case_label, int(rep.tie_break_applied)])
        return _csv(["rho0", "u0", "rho1", "u1", "xi_delta", "mu", "u_delta_star", "D_at_star", "case",
                     "tie_break"], rows)
    if table == "overlap":
        alphas = raw.get("alphas", [0.1 * k for k in range(1, 10)])
        n = int(raw.get("samples", 10))
        rows = []
        for a in alphas:
            model = GasModel.generalized(a)
            for _ in range(n):
                row = overlap_row(model, *overlap_pair(rng, model))
                rows.append(list(row.values()))
        return _csv(["alpha", "rho0", "u0", "rho1", "u1", "D_sdw", "D_cl", "D_sdw_minus_D_cl", "c1", "c", "c2"], rows)
    if table == "mu_scaling":
        model = r.model(raw.get("model", {"kind": "pressureless"}))
        dd = raw.get("datum")
        r.check_keys(dd, "datum", {"left", "right", "xi_delta", "u_delta"}, {"left", "right", "xi_delta", "u_delta"})
        left, right = r.state(dd["left"], "left"), r.state(dd["right"], "right")
        xi, ud = r.number(dd, "xi_delta", positive=True), r.number(dd, "u_delta")
        rows = []
        for mu in raw.get("mus", [1e-2, 1e-3, 1e-4, 1e-5]):
            ts, _ = tracker.run(backward.DeltaRiemannDatum(left, right, xi, float(mu), ud), model, 1.0)
            ev = ts.events[0] if ts.events else None
            last = ts.events[-1] if ts.events else None
            rows.append([float(mu), None if ev is None else ev.time, len(ts.events),
                         None if last is None else last.xi_delta, None if last is None else last.u_delta])
        return _csv(["mu", "T_first", "n_events", "xi_s", "u_s"], rows)
    r.fail("table", f"unknown table {table!r}")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shadowwave", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("riemann", "select", "track", "verify", "sweep"):
        sp = sub.add_parser(name)
        sp.add_argument("--scenario", required=True, help="scenario (or sweep) JSON file")
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--profile", help="CSV file for the select/track profile")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--mu", type=float, help="override mu")
        sp.add_argument("--eps", type=float, help="override epsilon")
    return p


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("SHADOWWAVE_LOG", "WARNING").upper(), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            text = cmd_sweep(args.scenario, args)
        else:
            sc = load_scenario(args.scenario)
            if args.mu is not None:
                if not args.mu > 0:
                    raise ScenarioError(f"{args.scenario}:1: --mu must be positive")
                sc.mu = args.mu
            if args.eps is not None:
                if not args.eps > 0:
                    raise ScenarioError(f"{args.scenario}:1: --eps must be positive")
                sc.epsilon = args.eps
            text = {"riemann": cmd_riemann, "select": cmd_select, "track": cmd_track, "verify": cmd_verify}[
                args.command
            ](sc, args)
            text += "\n"
        _write(args.out, text)
    except UnsupportedInteraction as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (ScenarioError, DomainError, ModelError, PreconditionError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ShadowWaveError, ArithmeticError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
