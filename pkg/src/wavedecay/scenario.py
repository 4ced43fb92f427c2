"""Scenario files: JSON descriptions of a system, initial data and run settings.

A scenario looks like::

    {
      "schema_version": 1,
      "name": "p_system_crossing",
      "model": {"system": "p_system", "gamma": 1.4, "k": 1.0, "ref_state": [1.0, 0.0]},
      "initial": {"left_state": [1.0, 0.0],
                  "waves": [{"x": 0.0, "family": 2, "strength": -0.05},
                            {"x": 1.0, "family": 1, "strength": 0.05}]},
      "families": [1, 2],
      "delta": 0.001, "kappa": 20, "C0": 10,
      "times": [0.5, 1, 2]
    }

``initial`` takes one of three forms: explicit ``jumps``/``values``, a
``left_state`` plus elementary ``waves`` laid down left to right, or a
``random`` block drawn from ``seed``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ScenarioError
from .systems import HyperbolicSystem, system_from_json
from .waves import PiecewiseConstantFn

SCHEMA_VERSION = 1

_KNOWN = {
    "schema_version", "name", "description", "model", "initial", "family", "families", "delta",
    "kappa", "C0", "tolerance", "times", "seed", "kappa_range", "max_fronts", "max_events", "outputs",
}


@dataclass(frozen=True)
class Scenario:
    name: str
    model: dict
    initial: dict
    families: tuple[int, ...]
    times: tuple[float, ...]
    delta: float | None = None
    kappa: float = 20.0
    C0: float = 10.0
    tolerance: float | None = None
    seed: int = 0
    kappa_range: tuple[float, ...] = ()
    max_fronts: int = 200_000
    max_events: int = 2_000_000
    outputs: dict = field(default_factory=dict)

    def system(self) -> HyperbolicSystem:
        try:
            return system_from_json(self.model)
        except (ValueError, TypeError) as exc:
            raise ScenarioError(f"field 'model': {exc}") from exc

    def initial_data(self, sys: HyperbolicSystem | None = None) -> PiecewiseConstantFn:
        sys = sys or self.system()
        return build_initial(sys, self.initial, self.seed)

    def with_overrides(self, **kw) -> Scenario:
        kw = {k: v for k, v in kw.items() if v is not None}
        if "times" in kw:
            kw["times"] = _times(kw["times"])
        out = replace(self, **kw)
        _check_ranges(out)
        return out

    def to_json(self) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "model": self.model,
            "initial": self.initial,
            "families": list(self.families),
            "times": list(self.times),
            "kappa": self.kappa,
            "C0": self.C0,
            "seed": self.seed,
            "max_fronts": self.max_fronts,
            "max_events": self.max_events,
        }
        if self.delta is not None:
            out["delta"] = self.delta
        if self.tolerance is not None:
            out["tolerance"] = self.tolerance
        if self.kappa_range:
            out["kappa_range"] = list(self.kappa_range)
        if self.outputs:
            out["outputs"] = self.outputs
        return out


def _times(ts) -> tuple[float, ...]:
    ts = tuple(float(t) for t in ts)
    if not ts:
        raise ScenarioError("field 'times': at least one output time is required")
    if any(not (t > 0 and math.isfinite(t)) for t in ts) or any(b <= a for a, b in zip(ts, ts[1:])):
        raise ScenarioError("field 'times': must be finite, positive and strictly increasing")
    return ts


def _check_ranges(s: Scenario) -> None:
    if s.delta is not None and not (s.delta > 0 and math.isfinite(s.delta)):
        raise ScenarioError("field 'delta': must be positive")
    if not s.kappa > 0:
        raise ScenarioError("field 'kappa': must be positive")
    if not s.C0 > 0:
        raise ScenarioError("field 'C0': must be positive")
    if s.tolerance is not None and not s.tolerance >= 0:
        raise ScenarioError("field 'tolerance': must be nonnegative")
    if s.max_fronts < 1 or s.max_events < 0:
        raise ScenarioError("fields 'max_fronts'/'max_events': must be positive")
    if any(not k > 0 for k in s.kappa_range):
        raise ScenarioError("field 'kappa_range': values must be positive")


def _get(obj: dict, key: str, conv, default=None):
    if key not in obj:
        return default
    try:
        return conv(obj[key])
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"field '{key}': {exc}") from exc


def scenario_from_json(obj: Any) -> Scenario:
    """Validate a parsed scenario object."""
    if not isinstance(obj, dict):
        raise ScenarioError("scenario must be a JSON object")
    version = obj.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ScenarioError(f"field 'schema_version': expected {SCHEMA_VERSION}, got {version!r}")
    unknown = sorted(set(obj) - _KNOWN)
    if unknown:
        raise ScenarioError(f"unknown field '{unknown[0]}'")
    for key in ("model", "initial", "times"):
        if key not in obj:
            raise ScenarioError(f"field '{key}': missing")
    if not isinstance(obj["model"], dict):
        raise ScenarioError("field 'model': must be an object")
    if not isinstance(obj["initial"], dict):
        raise ScenarioError("field 'initial': must be an object")
    if "family" in obj and "families" in obj:
        raise ScenarioError("fields 'family' and 'families' are exclusive")
    if "families" in obj:
        fams = _get(obj, "families", lambda v: tuple(int(i) for i in v))
    else:
        fams = (_get(obj, "family", int, 1),)
    try:
        times = _times(obj["times"])
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"field 'times': {exc}") from exc
    s = Scenario(
        name=str(obj.get("name", "scenario")),
        model=dict(obj["model"]),
        initial=dict(obj["initial"]),
        families=fams,
        times=times,
        delta=_get(obj, "delta", float),
        kappa=_get(obj, "kappa", float, 20.0),
        C0=_get(obj, "C0", float, 10.0),
        tolerance=_get(obj, "tolerance", float),
        seed=_get(obj, "seed", int, 0),
        kappa_range=_get(obj, "kappa_range", lambda v: tuple(float(k) for k in v), ()),
        max_fronts=_get(obj, "max_fronts", int, 200_000),
        max_events=_get(obj, "max_events", int, 2_000_000),
        outputs=dict(obj.get("outputs", {})),
    )
    _check_ranges(s)
    sys = s.system()
    if not fams or any(not 1 <= i <= sys.n for i in fams):
        raise ScenarioError(f"field 'families': each family must lie in 1..{sys.n}")
    s.initial_data(sys)
    return s


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return scenario_from_json(obj)


def bundled_scenarios() -> list[str]:
    root = resources.files("wavedecay") / "data" / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_scenario(ref: str | Path) -> Scenario:
    """Load a scenario from a path, or by name from the bundled corpus."""
    path = Path(ref)
    if path.is_file():
        return parse_scenario(path.read_text(encoding="utf-8"), str(path))
    name = str(ref)
    if name in bundled_scenarios():
        res = resources.files("wavedecay") / "data" / "scenarios" / f"{name}.json"
        return parse_scenario(res.read_text(encoding="utf-8"), name)
    raise ScenarioError(f"no scenario file or bundled scenario named {name!r}")


def build_initial(sys: HyperbolicSystem, initial: dict, seed: int = 0) -> PiecewiseConstantFn:
    """Initial data from the ``initial`` block of a scenario."""
    forms = [k for k in ("values", "waves", "random") if k in initial]
    if len(forms) != 1:
        raise ScenarioError("field 'initial': give exactly one of 'values', 'waves' or 'random'")
    try:
        if forms[0] == "values":
            return PiecewiseConstantFn(np.asarray(initial.get("jumps", []), dtype=float),
                                       np.asarray(initial["values"], dtype=float).reshape(-1, sys.n))
        if forms[0] == "waves":
            return _from_waves(sys, initial)
        return random_initial(sys, np.random.default_rng(seed), **initial["random"])
    except ScenarioError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ScenarioError(f"field 'initial': {exc}") from exc


def _from_waves(sys: HyperbolicSystem, initial: dict) -> PiecewiseConstantFn:
    left = np.asarray(initial.get("left_state", sys.region.ref_state), dtype=float).reshape(sys.n)
    jumps, values = [], [left]
    for w in sorted(initial["waves"], key=lambda w: float(w["x"])):
        u = sys.wave_curve(int(w["family"]), values[-1], float(w["strength"]))
        jumps.append(float(w["x"]))
        values.append(u)
    return PiecewiseConstantFn(np.array(jumps), np.array(values))


def random_initial(
    sys: HyperbolicSystem,
    rng: np.random.Generator,
    jumps: int = 5,
    tv: float = 0.3,
    span: tuple[float, float] = (-1.0, 1.0),
) -> PiecewiseConstantFn:
    """Random step data: ``jumps`` elementary waves of random family and sign
    at uniform positions in ``span``, rescaled to total strength ``tv``."""
    if jumps < 1 or not tv > 0:
        raise ValueError("random initial data needs jumps >= 1 and tv > 0")
    xs = np.sort(rng.uniform(span[0], span[1], int(jumps)))
    fams = rng.integers(1, sys.n + 1, int(jumps))
    raw = rng.normal(size=int(jumps))
    strengths = raw * (tv / np.abs(raw).sum())
    waves = [{"x": float(x), "family": int(f), "strength": float(s)} for x, f, s in zip(xs, fams, strengths)]
    return _from_waves(sys, {"waves": waves})
