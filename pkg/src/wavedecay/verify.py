"""Check the decay estimate for positive waves along a front-tracking run.

For every requested time and family the measure of positive waves is
rearranged into an odd concave profile and compared, at the union of both
breakpoint sets, with the Burgers comparison profile driven by the drops of
the interaction potential.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .burgers import profile_from_measure, solve_impulsive_many
from .errors import WaveDecayError
from .fronts import (
    FrontState,
    Trajectory,
    default_delta,
    evolve,
    front_state_at,
    init_approx,
)
from .measure import POS_TOL, LineMeasure, positive_part
from .rearrangement import OddConcaveProfile, odd_rearrangement, profile_leq
from .systems import HyperbolicSystem
from .waves import PiecewiseConstantFn, glimm_V, wave_measures


def positive_wave_density(fs: FrontState, family: int) -> LineMeasure:
    """Positive ``family``-waves of a front state, spread back into fans.

    A rarefaction front of strength ``s`` born at ``t_b`` stands for the
    centered fan it replaced, which lies left of the front because the
    front carries the fastest characteristic speed of that fan. Its mass is
    spread uniformly over ``[x - W, x)`` with ``W = s (t - t_b)``, capped by
    the distance to the previous front of the same family so that fans
    compressed by later interactions never overlap. On an undisturbed
    centered fan this gives density ``1/t`` exactly. Fronts without room to
    spread stay atoms.
    """
    on = fs.family == family
    x, s, b = fs.x[on], fs.strength[on], fs.birth[on]
    gap = np.concatenate(([np.inf], np.diff(x)))
    sel = s > 0
    x, s, gap = x[sel], s[sel], gap[sel]
    width = np.minimum(s * (fs.time - b[sel]), gap)
    atoms, pieces = [], []
    for xk, sk, wk in zip(x.tolist(), s.tolist(), width.tolist()):
        if wk <= 1e3 * POS_TOL * max(1.0, abs(xk)):
            atoms.append((xk, sk))
        else:
            pieces.append((xk - wk, xk, sk / wk))
    return LineMeasure.from_pieces(atoms, pieces)


@dataclass(frozen=True)
class DecayCheck:
    t: float
    family: int
    margin: float
    holds: bool
    rearranged: OddConcaveProfile
    comparison: OddConcaveProfile


@dataclass
class DecayReport:
    checks: list[DecayCheck]
    kappa_used: float
    C0_used: float
    delta_used: float
    tolerance: float
    q_series: list[tuple[float, float]] = field(default_factory=list)

    @property
    def all_hold(self) -> bool:
        return all(c.holds for c in self.checks)

    @property
    def min_margin(self) -> float:
        return min((c.margin for c in self.checks), default=math.inf)

    def to_json(self) -> dict:
        return {
            "kappa": self.kappa_used,
            "C0": self.C0_used,
            "delta": self.delta_used,
            "tolerance": self.tolerance,
            "all_hold": self.all_hold,
            "per_time": [
                {
                    "t": c.t,
                    "family": c.family,
                    "margin": c.margin,
                    "holds": c.holds,
                    "rearranged": c.rearranged.to_json(),
                    "comparison": c.comparison.to_json(),
                }
                for c in self.checks
            ],
            "q_series": [[t, q] for t, q in self.q_series],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t,family,margin,holds\n")
        for c in self.checks:
            buf.write(f"{c.t:.17g},{c.family},{c.margin:.17g},{int(c.holds)}\n")
        return buf.getvalue()


def default_tolerance(delta: float, tv0: float) -> float:
    """Front tracking is only delta-accurate, so the order is checked up to
    ``1e-8 + 2 delta TV``."""
    return 1e-8 + 2 * delta * tv0


def _families(sys: HyperbolicSystem, families) -> list[int]:
    fams = [families] if isinstance(families, int) else list(families)
    for i in fams:
        if not 1 <= i <= sys.n:
            raise ValueError(f"family {i} outside 1..{sys.n}")
    return fams


def simulate(sys: HyperbolicSystem, u0: PiecewiseConstantFn, T: float, delta: float | None = None,
             sample_times: Sequence[float] = (), **caps) -> Trajectory:
    """Front-tracking run from ``u0`` to ``T``."""
    delta = default_delta(sys, u0) if delta is None else delta
    fs = init_approx(sys, u0, delta)
    traj, _ = evolve(sys, fs, T, sample_times=sample_times, delta=delta, **caps)
    return traj


def verify_decay(
    sys: HyperbolicSystem,
    u0: PiecewiseConstantFn,
    families: int | Sequence[int],
    times: Sequence[float],
    kappa: float = 20.0,
    C0: float = 10.0,
    delta: float | None = None,
    tolerance: float | None = None,
    trajectory: Trajectory | None = None,
) -> DecayReport:
    """Compare the positive ``family``-waves with the Burgers bound at each time.

    Pass ``trajectory`` to reuse an existing run (it must start from ``u0``
    and reach the last requested time).
    """
    times = [float(t) for t in times]
    if not times or any(t <= 0 for t in times) or times != sorted(times):
        raise ValueError("times must be positive and sorted")
    fams = _families(sys, families)
    initial = wave_measures(sys, u0)
    tv0 = glimm_V(initial)
    if trajectory is None:
        trajectory = simulate(sys, u0, times[-1], delta, sample_times=times)
    elif trajectory.T < times[-1]:
        raise WaveDecayError(f"trajectory ends at {trajectory.T}, before {times[-1]}")
    delta = trajectory.delta
    tol = default_tolerance(delta, tv0) if tolerance is None else float(tolerance)

    checks = []
    snaps = {t: front_state_at(trajectory, t) for t in times}
    for i in fams:
        w0 = profile_from_measure(positive_part(initial.family(i)))
        bounds = solve_impulsive_many(w0, trajectory.events, kappa, times)
        for t, w in zip(times, bounds):
            vhat = odd_rearrangement(positive_wave_density(snaps[t], i))
            ok, margin = profile_leq(vhat, w, tol)
            checks.append(DecayCheck(t, i, margin, ok, vhat, w))
    checks.sort(key=lambda c: (c.t, c.family))
    q_series = [(t, q) for t, _, q in trajectory.q_series]
    return DecayReport(checks, float(kappa), float(C0), delta, tol, q_series)


def sweep_kappa(
    sys: HyperbolicSystem,
    u0: PiecewiseConstantFn,
    families,
    times: Sequence[float],
    kappas: Sequence[float],
    C0: float = 10.0,
    delta: float | None = None,
    tolerance: float | None = None,
    trajectory: Trajectory | None = None,
) -> list[tuple[float, float]]:
    """Smallest margin over all checks for each ``kappa``, sharing one run."""
    if not len(kappas):
        raise ValueError("empty kappa range")
    if trajectory is None:
        trajectory = simulate(sys, u0, max(times), delta, sample_times=times)
    out = []
    for k in sorted(float(k) for k in kappas):
        rep = verify_decay(sys, u0, families, times, k, C0, tolerance=tolerance, trajectory=trajectory)
        out.append((k, rep.min_margin))
    return out


def minimal_kappa(sweep: list[tuple[float, float]], tolerance: float) -> float | None:
    """First swept kappa from which every margin clears ``-tolerance``."""
    for k, m in sweep:
        if m >= -tolerance:
            return k
    return None


@dataclass(frozen=True)
class OleinikCheck:
    t: float
    max_density: float
    bound: float
    holds: bool


def max_positive_density(fs: FrontState) -> float:
    """Largest ``strength / gap`` over adjacent rarefaction fronts; the
    strength is that of the right front, whose fan fills the gap."""
    if len(fs) < 2:
        return 0.0
    rare = fs.strength > 0
    both = rare[1:] & rare[:-1]
    gap = np.diff(fs.x)
    ok = both & (gap > 0)
    if not np.any(ok):
        return 0.0
    return float(np.max(fs.strength[1:][ok] / gap[ok]))


def oleinik_check(trajectory: Trajectory, times: Sequence[float], tolerance: float | None = None) -> list[OleinikCheck]:
    """Scalar sanity check of the one-sided bound ``u_x <= 1/t``."""
    if trajectory.system.n != 1:
        raise ValueError("oleinik_check applies to scalar trajectories only")
    tol = 10 * trajectory.delta if tolerance is None else tolerance
    out = []
    for t in times:
        if not t > 0:
            raise ValueError("times must be positive")
        d = max_positive_density(front_state_at(trajectory, t))
        out.append(OleinikCheck(t, d, 1.0 / t, d <= 1.0 / t + tol))
    return out
