"""Command-line driver: ``wavedecay {verify,sweep,simulate,rearrange}``.

Exit codes: 0 success, 1 an ordering check failed, 2 configuration error,
3 simulation error (budget exceeded, non-admissible state, no convergence).
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import os
import sys
import tempfile
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ScenarioError, WaveDecayError
from .fronts import evolve, init_approx, default_delta
from .measure import LineMeasure
from .rearrangement import odd_rearrangement
from .scenario import Scenario, load_scenario
from .verify import DecayReport, default_tolerance, minimal_kappa, simulate, sweep_kappa, verify_decay
from .waves import glimm_V, wave_measures

log = logging.getLogger("wavedecay")

EXIT_OK, EXIT_ORDER, EXIT_CONFIG, EXIT_SIM = 0, 1, 2, 3
GRID_POINTS = 65


def fmt(x: float) -> str:
    return f"{x:.17g}"


def atomic_write(path: Path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _parse_floats(text: str, flag: str) -> list[float]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise ScenarioError(f"option '{flag}': {exc}") from exc


def profiles_csv(report: DecayReport) -> str:
    """``t,family,x,w,vhat`` at every breakpoint of either profile plus a uniform grid."""
    buf = io.StringIO()
    buf.write("t,family,x,w,vhat\n")
    for c in report.checks:
        w, v = c.comparison, c.rearranged
        bps = np.concatenate(([0.0], w.xs, v.xs))
        far = max(float(bps.max()), 1e-12) * 1.25
        xs = np.unique(np.concatenate((bps, np.linspace(0.0, far, GRID_POINTS))))
        for x, wx, vx in zip(xs, w.right_value(xs), v.right_value(xs)):
            buf.write(f"{fmt(c.t)},{c.family},{fmt(x)},{fmt(wx)},{fmt(vx)}\n")
    return buf.getvalue()


def q_series_csv(q_series, C0: float) -> str:
    buf = io.StringIO()
    buf.write("t,V,Q,upsilon\n")
    for t, v, q in q_series:
        buf.write(f"{fmt(t)},{fmt(v)},{fmt(q)},{fmt(v + C0 * q)}\n")
    return buf.getvalue()


def _apply_overrides(args, sc: Scenario) -> Scenario:
    times = _parse_floats(args.times, "--times") if getattr(args, "times", None) else None
    return sc.with_overrides(
        kappa=getattr(args, "kappa", None), delta=args.delta, seed=args.seed, times=times
    )


def cmd_verify(args) -> int:
    sc = _apply_overrides(args, load_scenario(args.scenario))
    system = sc.system()
    u0 = sc.initial_data(system)
    traj = simulate(system, u0, sc.times[-1], sc.delta, sample_times=sc.times,
                    max_fronts=sc.max_fronts, max_events=sc.max_events)
    report = verify_decay(system, u0, sc.families, sc.times, sc.kappa, sc.C0,
                          tolerance=sc.tolerance, trajectory=traj)
    body = dumps({"scenario": sc.name, **report.to_json()}) if args.format == "json" else report.to_csv()
    if args.out:
        out = Path(args.out)
        atomic_write(out / f"report.{args.format}", body)
        atomic_write(out / "profiles.csv", profiles_csv(report))
        atomic_write(out / "q_series.csv", q_series_csv(traj.q_series, sc.C0))
    else:
        sys.stdout.write(body)
    for c in report.checks:
        if not c.holds:
            print(f"ordering fails: t={fmt(c.t)} family={c.family} margin={fmt(c.margin)} "
                  f"tolerance={fmt(report.tolerance)}", file=sys.stderr)
    return EXIT_OK if report.all_hold else EXIT_ORDER


def cmd_sweep(args) -> int:
    sc = _apply_overrides(args, load_scenario(args.scenario))
    kappas = _parse_floats(args.kappas, "--kappas") if args.kappas is not None else list(sc.kappa_range)
    if not kappas:
        raise ScenarioError("field 'kappa_range': empty kappa range")
    if any(not k > 0 for k in kappas):
        raise ScenarioError("field 'kappa_range': values must be positive")
    system = sc.system()
    u0 = sc.initial_data(system)
    traj = simulate(system, u0, sc.times[-1], sc.delta, sample_times=sc.times,
                    max_fronts=sc.max_fronts, max_events=sc.max_events)
    rows = sweep_kappa(system, u0, sc.families, sc.times, kappas, sc.C0,
                       tolerance=sc.tolerance, trajectory=traj)
    tol = sc.tolerance
    if tol is None:
        tol = default_tolerance(traj.delta, glimm_V(wave_measures(system, u0)))
    buf = io.StringIO()
    buf.write("kappa,min_margin\n")
    for k, m in rows:
        buf.write(f"{fmt(k)},{fmt(m)}\n")
    if args.out:
        atomic_write(Path(args.out) / "sweep.csv", buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    kmin = minimal_kappa(rows, tol)
    print("minimal kappa: " + ("none in range" if kmin is None else fmt(kmin)), file=sys.stderr)
    return EXIT_OK


def cmd_simulate(args) -> int:
    sc = _apply_overrides(args, load_scenario(args.scenario))
    system = sc.system()
    u0 = sc.initial_data(system)
    delta = sc.delta if sc.delta is not None else default_delta(system, u0)
    lines: list[str] = []

    def record(kind, fs, ev):
        v, q = fs.V(), fs.Q()
        rec = {"kind": kind, "t": fs.time, "state": fs.to_function().to_json(),
               "V": v, "Q": q, "upsilon": v + sc.C0 * q}
        if ev is not None:
            rec.update(x=ev.x, dQ=ev.dQ, families=list(ev.families))
        lines.append(json.dumps(rec, sort_keys=True, allow_nan=False))

    fs0 = init_approx(system, u0, delta)
    evolve(system, fs0, sc.times[-1], observers=[record], sample_times=sc.times, delta=delta,
           max_fronts=sc.max_fronts, max_events=sc.max_events)
    text = "".join(line + "\n" for line in lines)
    if args.out:
        atomic_write(Path(args.out) / "trajectory.jsonl", text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_rearrange(args) -> int:
    path = Path(args.measure)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ScenarioError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    try:
        m = LineMeasure.from_json(obj)
        prof = odd_rearrangement(m)
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"{path}: {exc}") from exc
    body = dumps(prof.to_json()) if args.format == "json" else prof.to_csv()
    if args.out:
        atomic_write(Path(args.out) / f"profile.{args.format}", body)
    else:
        sys.stdout.write(body)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wavedecay", description="Front tracking and decay checks for positive waves.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, kappa=True):
        sp.add_argument("--scenario", required=True, help="scenario file or bundled scenario name")
        sp.add_argument("--out", help="output directory (default: print to stdout)")
        sp.add_argument("--delta", type=float, help="front-tracking resolution")
        sp.add_argument("--times", help='comma-separated output times, e.g. "0.5,1,2"')
        sp.add_argument("--seed", type=int, help="seed for random initial data")
        if kappa:
            sp.add_argument("--kappa", type=float, help="impulse constant")

    sp = sub.add_parser("verify", help="check the ordering at every output time")
    common(sp)
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("sweep", help="minimal margin for a range of kappa")
    common(sp, kappa=False)
    sp.add_argument("--kappas", help='comma-separated kappa values (default: scenario kappa_range)')
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("simulate", help="front-tracking trajectory as JSON lines")
    common(sp, kappa=False)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("rearrange", help="odd rearrangement of a measure")
    sp.add_argument("--measure", required=True, help="JSON file {atoms: [[x, m]...], density: [[a, b, v]...]}")
    sp.add_argument("--out", help="output directory (default: print to stdout)")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.set_defaults(func=cmd_rearrange)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    level = os.environ.get("WAVEDECAY_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except WaveDecayError as exc:
        where = getattr(exc, "time", None)
        suffix = f" (t={fmt(where)})" if where is not None and f"t={fmt(where)}" not in str(exc) else ""
        print(f"simulation error: {exc}{suffix}", file=sys.stderr)
        return EXIT_SIM


if __name__ == "__main__":
    raise SystemExit(main())
