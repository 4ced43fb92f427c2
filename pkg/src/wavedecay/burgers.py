"""Exact Burgers evolution of odd concave profiles with impulsive sources.

For an odd nondecreasing profile the Burgers flow creates no shocks: every
breakpoint ``(x, v)`` moves along its characteristic to ``(x + t v, v)`` and
the jump at the origin opens into a centered fan of slope ``1/t``. Keeping
profiles as breakpoint lists therefore makes the evolution exact.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .measure import LineMeasure
from .rearrangement import OddConcaveProfile, odd_rearrangement, shift_profile

#: Tolerance for Q increments that should be nonnegative.
DQ_TOL = 1e-12


def profile_from_measure(m: LineMeasure) -> OddConcaveProfile:
    """Initial comparison profile: the odd rearrangement of ``m``."""
    return odd_rearrangement(m)


def burgers_evolve(w: OddConcaveProfile, dt: float) -> OddConcaveProfile:
    """Entropy solution of ``w_t + (w**2/2)_x = 0`` after time ``dt``."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not isinstance(w, OddConcaveProfile):
        raise TypeError("burgers_evolve expects an OddConcaveProfile")
    xs = w.xs + dt * w.vs
    vs = w.vs
    if w.origin_value > 0:
        xs = np.concatenate(([dt * w.origin_value], xs))
        vs = np.concatenate(([w.origin_value], vs))
    return OddConcaveProfile(0.0, xs, vs, w.plateau)


def apply_impulse(w: OddConcaveProfile, dQ: float, kappa: float) -> OddConcaveProfile:
    """Add ``kappa * dQ * sgn(x)`` after a drop ``dQ`` of the interaction potential."""
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    if dQ < -DQ_TOL:
        raise ValueError(f"interaction potential increased by {-dQ}")
    return shift_profile(w, kappa * max(dQ, 0.0))


def _event_pairs(events) -> list[tuple[float, float]]:
    out = []
    for e in events:
        if isinstance(e, tuple):
            out.append((float(e[0]), float(e[1])))
        else:
            out.append((float(e.t), float(e.dQ)))
    return out


def solve_impulsive(w0: OddConcaveProfile, events: Iterable, kappa: float, t: float) -> OddConcaveProfile:
    """Burgers flow from ``w0`` with a ``kappa * dQ`` impulse at every event up to ``t``.

    ``events`` holds objects with ``t`` and ``dQ`` attributes, or
    ``(t, dQ)`` pairs, sorted by time. Impulses at time exactly ``t`` are
    included. Because Q only changes at these events, no time partition
    finer than the event times is needed.
    """
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    w = w0
    now = 0.0
    for te, dq in _event_pairs(events):
        if te < now:
            raise ValueError("events must be sorted by time")
        if te > t:
            break
        if te > now:
            w = burgers_evolve(w, te - now)
            now = te
        w = apply_impulse(w, dq, kappa)
    if t > now:
        w = burgers_evolve(w, t - now)
    return w


def solve_impulsive_many(w0: OddConcaveProfile, events: Iterable, kappa: float, times) -> list[OddConcaveProfile]:
    """:func:`solve_impulsive` at several sorted times in one sweep."""
    pairs = _event_pairs(events)
    out = []
    w, now, k = w0, 0.0, 0
    for t in times:
        if t < now:
            raise ValueError("times must be sorted")
        while k < len(pairs) and pairs[k][0] <= t:
            te, dq = pairs[k]
            if te > now:
                w = burgers_evolve(w, te - now)
                now = te
            w = apply_impulse(w, dq, kappa)
            k += 1
        if t > now:
            w = burgers_evolve(w, t - now)
            now = t
        out.append(w)
    return out
