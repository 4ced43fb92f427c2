"""Event-driven front tracking for systems with n <= 2.

Between interactions every front moves on a straight line, so the only
approximation is the splitting of rarefactions into fronts of strength at
most ``delta``. Rarefaction fronts travel with the characteristic speed of
their right state, shocks with their exact Rankine-Hugoniot speed.

Each front also remembers a *birth* time: the time at which the rarefaction
it belongs to was created. A rarefaction front of strength ``sigma`` born at
``t_b`` stands for a small centered fan of width ``sigma (t - t_b)`` ending at
the front; :func:`wavedecay.verify.positive_wave_density` uses this to turn
atomic wave measures back into densities.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import BudgetExceeded
from .systems import HyperbolicSystem, riemann_solve
from .waves import PiecewiseConstantFn, WaveDecomposition, front_Q, front_V
from .measure import LineMeasure

log = logging.getLogger(__name__)

#: Waves weaker than this are not turned into fronts.
STRENGTH_TOL = 1e-13
#: Collisions closer in time than this are treated as simultaneous.
TIME_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FrontState:
    """Fronts at one instant, sorted by position.

    ``states[k]`` is the constant state left of front ``k`` and
    ``states[k + 1]`` the one on its right.
    """

    time: float
    x: np.ndarray
    family: np.ndarray
    strength: np.ndarray
    speed: np.ndarray
    birth: np.ndarray
    states: np.ndarray

    def __len__(self) -> int:
        return len(self.x)

    @property
    def left_state(self) -> np.ndarray:
        return self.states[0]

    @property
    def right_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def kinds(self) -> list[str]:
        return ["shock" if s < 0 else "rarefaction" for s in self.strength]

    @property
    def n(self) -> int:
        return self.states.shape[1]

    def to_function(self) -> PiecewiseConstantFn:
        return PiecewiseConstantFn(self.x, self.states)

    def decomposition(self) -> WaveDecomposition:
        """Atomic wave measures read directly off the fronts."""
        return WaveDecomposition(
            tuple(
                LineMeasure(tuple(zip(self.x[self.family == i].tolist(), self.strength[self.family == i].tolist())))
                for i in range(1, self.n + 1)
            )
        )

    def V(self) -> float:
        return front_V(self.strength)

    def Q(self) -> float:
        return front_Q(self.family, self.strength, self.n)

    def composition_residual(self, sys: HyperbolicSystem) -> float:
        """Distance between the stored right state and the one obtained by
        composing all fronts from the left state."""
        u = self.states[0]
        for fam, s in zip(self.family.tolist(), self.strength.tolist()):
            u = sys.wave_curve(fam, u, s)
        return float(np.max(np.abs(u - self.states[-1])))


@dataclass(frozen=True)
class Event:
    """One interaction: time, place, Q drop and the families that met."""

    t: float
    x: float
    dQ: float
    families: tuple[int, ...]
    V_before: float
    V_after: float
    Q_before: float
    Q_after: float

    def d_upsilon(self, C0: float) -> float:
        return (self.V_after - self.V_before) + C0 * (self.Q_after - self.Q_before)


@dataclass
class EventLog:
    events: list[Event] = field(default_factory=list)

    def __iter__(self) -> Iterator[Event]:
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)

    def __getitem__(self, k):
        return self.events[k]

    def append(self, e: Event) -> None:
        self.events.append(e)

    def up_to(self, t: float) -> list[Event]:
        return [e for e in self.events if e.t <= t]


@dataclass
class Trajectory:
    """Complete record of a front-tracking run.

    ``segments`` holds one row per front lifetime: the front sits at
    ``x0 + speed (t - t0)`` for ``t0 <= t < t1``.
    """

    system: HyperbolicSystem
    delta: float
    T: float
    initial: FrontState
    events: EventLog
    segments: dict[str, np.ndarray]
    samples: dict[float, FrontState]
    q_series: list[tuple[float, float, float]]


def _split_wave(sys, family, left, right, sigma, delta):
    """States and strengths of the fronts representing one outgoing wave."""
    if sigma > 0:
        pieces = max(1, math.ceil(sigma / delta * (1 - 1e-9)))
    else:
        pieces = 1
    states = [left]
    for k in range(1, pieces):
        states.append(sys.wave_curve(family, left, sigma * k / pieces))
    states.append(right)
    lam = [sys.char_speed(family, u) for u in states]
    out = []
    for k in range(pieces):
        s = lam[k + 1] - lam[k] if sigma > 0 else sigma
        out.append((s, states[k + 1], sys.wave_speed(family, states[k], states[k + 1], s)))
    return out


def _resolve(sys, ul, ur, delta, inherited_birth, now):
    """Fronts leaving a Riemann problem, left to right."""
    fan = riemann_solve(sys, ul, ur)
    fams, sigs, spds, births, states = [], [], [], [], []
    left = fan.states[0]
    for i, sigma in enumerate(fan.strengths, start=1):
        if abs(sigma) < STRENGTH_TOL:
            continue
        right = fan.states[i]
        b = inherited_birth.get(i, now) if sigma > 0 else now
        for s, u, c in _split_wave(sys, i, left, right, sigma, delta):
            fams.append(i)
            sigs.append(s)
            spds.append(c)
            births.append(b)
            states.append(u)
        left = right
    if states:
        states[-1] = np.asarray(ur, dtype=float)
    return fams, sigs, spds, births, states


def default_delta(sys: HyperbolicSystem, u0: PiecewiseConstantFn) -> float:
    tv = sum(
        sum(abs(s) for s in riemann_solve(sys, u0.values[k], u0.values[k + 1]).strengths)
        for k in range(len(u0.jumps))
    )
    return 1e-2 * tv if tv > 0 else 1e-2


def init_approx(sys: HyperbolicSystem, u0: PiecewiseConstantFn, delta: float, t0: float = 0.0) -> FrontState:
    """Resolve every initial jump and split rarefactions into fronts of strength <= delta."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if u0.n != sys.n:
        raise ValueError(f"initial data has {u0.n} components, system has {sys.n}")
    for u in u0.values:
        sys.region.check(u, "initial state")
    x, fam, sig, spd, birth = [], [], [], [], []
    states = [np.array(u0.values[0], dtype=float)]
    for k, xj in enumerate(u0.jumps):
        f, s, c, b, st = _resolve(sys, states[-1], u0.values[k + 1], delta, {}, t0)
        x += [float(xj)] * len(f)
        fam += f
        sig += s
        spd += c
        birth += b
        if st:
            states += st
        else:
            states[-1] = np.array(u0.values[k + 1], dtype=float)
    fs = FrontState(
        t0,
        np.array(x, dtype=float),
        np.array(fam, dtype=int),
        np.array(sig, dtype=float),
        np.array(spd, dtype=float),
        np.array(birth, dtype=float),
        np.array(states, dtype=float).reshape(len(states), sys.n),
    )
    if fs.V() > sys.region.tv_budget:
        raise BudgetExceeded(f"initial wave strength {fs.V():.6g} exceeds budget {sys.region.tv_budget}", t0)
    return fs


Observer = Callable[[str, FrontState, "Event | None"], None]


def evolve(
    sys: HyperbolicSystem,
    state: FrontState,
    T: float,
    observers: Sequence[Observer] = (),
    sample_times: Iterable[float] = (),
    delta: float | None = None,
    max_fronts: int = 200_000,
    max_events: int = 2_000_000,
) -> tuple[Trajectory, EventLog]:
    """Advance fronts to time ``T``, resolving collisions in time order.

    Simultaneous collisions are handled left to right; fronts meeting at one
    point are resolved as a single Riemann problem across all of them.
    Observers are called with ``("event", state, event)`` after each
    interaction and ``("sample", state, None)`` at each sample time.
    """
    if not T > state.time:
        raise ValueError(f"final time {T} must exceed the current time {state.time}")
    if len(state) > max_fronts:
        raise BudgetExceeded(f"{len(state)} fronts exceed the cap {max_fronts} at t={state.time:.17g}", state.time)
    if delta is None:
        pos = state.strength[state.strength > 0]
        delta = float(pos.max()) if len(pos) else 1e-2
    samples_wanted = sorted(t for t in set(float(s) for s in sample_times) if state.time <= t <= T)

    n = sys.n
    t = state.time
    x0 = state.x.astype(float).copy()
    t0 = np.full(len(x0), t)
    fam = state.family.astype(int).copy()
    sig = state.strength.astype(float).copy()
    spd = state.speed.astype(float).copy()
    birth = state.birth.astype(float).copy()
    seq = np.arange(len(x0))
    next_seq = len(x0)
    states = [np.array(u, dtype=float) for u in state.states]

    seg: dict[str, list] = {k: [] for k in ("seq", "x0", "t0", "t1", "speed", "family", "strength", "birth")}
    seg_left: list[np.ndarray] = []
    seg_right: list[np.ndarray] = []

    def close(idx, t_end):
        for j in idx:
            seg["seq"].append(int(seq[j]))
            seg["x0"].append(float(x0[j]))
            seg["t0"].append(float(t0[j]))
            seg["t1"].append(t_end)
            seg["speed"].append(float(spd[j]))
            seg["family"].append(int(fam[j]))
            seg["strength"].append(float(sig[j]))
            seg["birth"].append(float(birth[j]))
            seg_left.append(states[j])
            seg_right.append(states[j + 1])

    def snapshot(at):
        return FrontState(
            at, x0 + spd * (at - t0), fam.copy(), sig.copy(), spd.copy(), birth.copy(),
            np.array(states, dtype=float).reshape(len(states), n),
        )

    events = EventLog()
    samples: dict[float, FrontState] = {}
    q_now = front_Q(fam, sig, n)
    v_now = front_V(sig)
    q_series = [(t, v_now, q_now)]
    budget = sys.region.tv_budget
    si = 0

    while True:
        N = len(fam)
        dtmin = math.inf
        if N >= 2:
            pos = x0 + spd * (t - t0)
            ds = spd[:-1] - spd[1:]
            gap = np.maximum(pos[1:] - pos[:-1], 0.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                tc = np.where(ds > 0, gap / ds, math.inf)
            dtmin = float(tc.min())
        t_hit = t + dtmin
        while si < len(samples_wanted) and samples_wanted[si] < t_hit:
            ts = samples_wanted[si]
            samples[ts] = snapshot(ts)
            for obs in observers:
                obs("sample", samples[ts], None)
            si += 1
        if t_hit > T:
            break

        k = int(np.argmax(tc <= dtmin + TIME_TOL))
        t = t + float(tc[k])
        pos = x0 + spd * (t - t0)
        xc = 0.5 * (pos[k] + pos[k + 1])
        tolx = 1e-10 * max(1.0, abs(xc))
        lo, hi = k, k + 1
        while lo > 0 and abs(pos[lo - 1] - xc) <= tolx:
            lo -= 1
        while hi < N - 1 and abs(pos[hi + 1] - xc) <= tolx:
            hi += 1

        group = range(lo, hi + 1)
        inherited: dict[int, float] = {}
        for j in group:
            if sig[j] > 0:
                f = int(fam[j])
                inherited[f] = max(inherited.get(f, -math.inf), float(birth[j]))
        f_out, s_out, c_out, b_out, st_out = _resolve(sys, states[lo], states[hi + 1], delta, inherited, t)
        close(group, t)
        m = len(f_out)
        x0 = np.concatenate((x0[:lo], np.full(m, xc), x0[hi + 1:]))
        t0 = np.concatenate((t0[:lo], np.full(m, t), t0[hi + 1:]))
        fam = np.concatenate((fam[:lo], np.array(f_out, dtype=int), fam[hi + 1:]))
        sig = np.concatenate((sig[:lo], np.array(s_out, dtype=float), sig[hi + 1:]))
        spd = np.concatenate((spd[:lo], np.array(c_out, dtype=float), spd[hi + 1:]))
        birth = np.concatenate((birth[:lo], np.array(b_out, dtype=float), birth[hi + 1:]))
        seq = np.concatenate((seq[:lo], np.arange(next_seq, next_seq + m), seq[hi + 1:]))
        next_seq += m
        states = states[: lo + 1] + st_out + states[hi + 2:]

        q_new = front_Q(fam, sig, n)
        v_new = front_V(sig)
        ev = Event(t, xc, q_now - q_new, tuple(sorted({int(fam_j) for fam_j in seg["family"][-len(group):]})),
                   v_now, v_new, q_now, q_new)
        events.append(ev)
        q_now, v_now = q_new, v_new
        q_series.append((t, v_now, q_now))
        if observers:
            snap = snapshot(t)
            for obs in observers:
                obs("event", snap, ev)

        if v_now > budget:
            raise BudgetExceeded(f"total wave strength {v_now:.6g} exceeds budget {budget} at t={t:.17g}", t)
        if len(fam) > max_fronts:
            raise BudgetExceeded(f"{len(fam)} fronts exceed the cap {max_fronts} at t={t:.17g}", t)
        if len(events) > max_events:
            raise BudgetExceeded(f"more than {max_events} interactions by t={t:.17g}", t)

    for ts in samples_wanted[si:]:
        samples[ts] = snapshot(ts)
        for obs in observers:
            obs("sample", samples[ts], None)
    close(range(len(fam)), math.inf)
    log.info("front tracking to T=%g: %d events, %d live fronts", T, len(events), len(fam))

    segments = {k: np.array(v, dtype=int if k in ("seq", "family") else float) for k, v in seg.items()}
    segments["left"] = np.array(seg_left, dtype=float).reshape(len(seg_left), n)
    segments["right"] = np.array(seg_right, dtype=float).reshape(len(seg_right), n)
    traj = Trajectory(sys, float(delta), float(T), state, events, segments, samples, q_series)
    return traj, events


def front_state_at(traj: Trajectory, t: float) -> FrontState:
    """Fronts alive at time ``t``, positioned on their straight trajectories."""
    if not traj.initial.time <= t <= traj.T:
        raise ValueError(f"time {t} outside [{traj.initial.time}, {traj.T}]")
    if t in traj.samples:
        return traj.samples[t]
    s = traj.segments
    alive = (s["t0"] <= t) & (t < s["t1"])
    idx = np.nonzero(alive)[0]
    pos = s["x0"][idx] + s["speed"][idx] * (t - s["t0"][idx])
    order = idx[np.lexsort((s["seq"][idx], pos))]
    pos = s["x0"][order] + s["speed"][order] * (t - s["t0"][order])
    if len(order):
        states = np.vstack((s["left"][order[:1]], s["right"][order]))
    else:
        states = np.asarray(traj.initial.states[:1])
    return FrontState(t, pos, s["family"][order], s["strength"][order], s["speed"][order], s["birth"][order], states)


def solution_at(traj: Trajectory, t: float) -> PiecewiseConstantFn:
    return front_state_at(traj, t).to_function()


# -- weak formulation -------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


@dataclass(frozen=True)
class BumpTest:
    """Test function ``b((t - tc)/wt) * b((x - xc)/wx)`` with ``b(r) = (1 - r**2)**4`` on ``|r| < 1``."""

    tc: float
    xc: float
    wt: float
    wx: float

    def __call__(self, t, x):
        rt = (np.asarray(t) - self.tc) / self.wt
        rx = (np.asarray(x) - self.xc) / self.wx
        return np.where(np.abs(rt) < 1, (1 - rt**2) ** 4, 0.0) * np.where(np.abs(rx) < 1, (1 - rx**2) ** 4, 0.0)

    def support_along(self, x0, t0, speed, ta, tb):
        """Sub-interval of ``[ta, tb]`` where the line ``x0 + speed (t - t0)`` meets the support."""
        lo, hi = max(ta, self.tc - self.wt), min(tb, self.tc + self.wt)
        if speed != 0:
            e1 = t0 + (self.xc - self.wx - x0) / speed
            e2 = t0 + (self.xc + self.wx - x0) / speed
            lo, hi = max(lo, min(e1, e2)), min(hi, max(e1, e2))
        elif abs(x0 - self.xc) >= self.wx:
            return None
        return (lo, hi) if hi > lo else None


def weak_residual(traj: Trajectory, phi: BumpTest) -> float:
    """Residual of the weak formulation against one test function.

    For a piecewise-constant function with straight fronts the Gauss-Green
    theorem turns the space-time integral plus the initial-data term into a
    sum over fronts of ``int phi(t, x(t)) (speed [u] - [f(u)]) dt``. The
    test function must vanish at ``t = T``. Returns the Euclidean norm of the
    vector residual.
    """
    sys = traj.system
    s = traj.segments
    total = np.zeros(sys.n)
    for j in range(len(s["x0"])):
        ta, tb = s["t0"][j], min(s["t1"][j], traj.T)
        span = phi.support_along(s["x0"][j], s["t0"][j], s["speed"][j], ta, tb)
        if span is None:
            continue
        lo, hi = span
        jump = s["right"][j] - s["left"][j]
        defect = s["speed"][j] * jump - (sys.flux(s["right"][j]) - sys.flux(s["left"][j]))
        tt = 0.5 * (hi - lo) * _GL_NODES + 0.5 * (hi + lo)
        xx = s["x0"][j] + s["speed"][j] * (tt - s["t0"][j])
        total += defect * (0.5 * (hi - lo) * float(np.dot(_GL_WEIGHTS, phi(tt, xx))))
    return float(np.linalg.norm(total))
