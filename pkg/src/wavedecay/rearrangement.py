"""Symmetric and odd rearrangements, and the order they induce on positive
measures.

An :class:`OddConcaveProfile` is an odd, nondecreasing function which is
concave and piecewise linear on ``x > 0``, possibly with a jump at the
origin. Profiles are kept as explicit breakpoint lists so that comparing two
of them reduces to finitely many point evaluations.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .measure import MASS_TOL, LineMeasure, density_levels

#: Relative tolerance used when merging collinear segments.
SLOPE_TOL = 1e-12


def _simplify(origin: float, xs: np.ndarray, vs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Drop flat, degenerate and collinear breakpoints."""
    if not len(xs):
        return xs, vs
    px = np.concatenate(([0.0], xs))
    pv = np.concatenate(([origin], vs))
    dx = np.diff(px)
    dv = np.diff(pv)
    if np.any(dx < 0):
        raise ValueError("breakpoints must be increasing")
    jump = (dx <= 0) & (dv > 1e-12 * np.maximum(1.0, np.abs(vs)))
    if np.any(jump):
        raise ValueError(f"profile jumps at x = {xs[np.argmax(jump)]} > 0")
    keep = (dx > 0) & (dv > MASS_TOL * np.maximum(1.0, np.abs(vs)))
    if not np.all(keep):
        xs, vs = xs[keep], vs[keep]
        if not len(xs):
            return xs, vs
        px = np.concatenate(([0.0], xs))
        pv = np.concatenate(([origin], vs))
        dx, dv = np.diff(px), np.diff(pv)
    slope = dv / dx
    # an interior point is redundant when the slopes on both sides agree
    same = np.abs(slope[1:] - slope[:-1]) <= SLOPE_TOL * np.maximum(1.0, np.abs(slope[1:]))
    if np.any(same):
        keep = np.concatenate((~same, [True]))
        xs, vs = xs[keep], vs[keep]
    return xs, vs


@dataclass(frozen=True, eq=False)
class OddConcaveProfile:
    """Odd nondecreasing profile, concave and piecewise linear for x > 0.

    Attributes:
        origin_value: right limit at the origin (half the atomic mass of the
            measure the profile was built from).
        xs, vs: breakpoint abscissae and values on x > 0, both strictly
            increasing; the profile interpolates linearly from
            ``(0, origin_value)`` through them.
        plateau: constant value past the last breakpoint.
    """

    origin_value: float
    xs: np.ndarray
    vs: np.ndarray
    plateau: float

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float).copy()
        vs = np.asarray(self.vs, dtype=float).copy()
        if xs.shape != vs.shape or xs.ndim != 1:
            raise ValueError("breakpoint arrays must be 1-d and of equal length")
        if self.origin_value < -MASS_TOL:
            raise ValueError(f"origin value must be nonnegative, got {self.origin_value}")
        origin = max(float(self.origin_value), 0.0)
        xs, vs = _simplify(origin, xs, vs)
        if len(xs):
            px = np.concatenate(([0.0], xs))
            pv = np.concatenate(([origin], vs))
            if len(px) > 2:
                # each breakpoint must lie on or above the chord of its neighbours
                w = (px[1:-1] - px[:-2]) / (px[2:] - px[:-2])
                chord = pv[:-2] + w * (pv[2:] - pv[:-2])
                if np.any(pv[1:-1] < chord - 1e-12 * np.maximum(1.0, np.abs(pv[1:-1]))):
                    raise ValueError("profile is not concave on x > 0")
            top = float(vs[-1])
            if abs(top - self.plateau) > 1e-9 * max(1.0, abs(top)):
                raise ValueError(f"plateau {self.plateau} disagrees with last breakpoint value {top}")
        else:
            top = origin
            if abs(top - self.plateau) > 1e-9 * max(1.0, abs(top)):
                raise ValueError(f"plateau {self.plateau} disagrees with origin value {origin}")
        xs.setflags(write=False)
        vs.setflags(write=False)
        object.__setattr__(self, "origin_value", origin)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "vs", vs)
        object.__setattr__(self, "plateau", float(top))

    @classmethod
    def from_points(cls, origin_value: float, points) -> OddConcaveProfile:
        points = list(points)
        xs = np.array([p[0] for p in points], dtype=float)
        vs = np.array([p[1] for p in points], dtype=float)
        plateau = float(vs[-1]) if len(points) else float(origin_value)
        return cls(origin_value, xs, vs, plateau)

    @classmethod
    def zero(cls) -> OddConcaveProfile:
        return cls(0.0, np.empty(0), np.empty(0), 0.0)

    @property
    def breakpoints(self) -> list[tuple[float, float]]:
        return list(zip(self.xs.tolist(), self.vs.tolist()))

    def slopes(self) -> np.ndarray:
        if not len(self.xs):
            return np.empty(0)
        return np.diff(np.concatenate(([self.origin_value], self.vs))) / np.diff(
            np.concatenate(([0.0], self.xs))
        )

    def right_value(self, x):
        """Value on x >= 0, using the right limit at the origin."""
        return np.interp(
            x,
            np.concatenate(([0.0], self.xs)),
            np.concatenate(([self.origin_value], self.vs)),
            right=self.plateau,
        )

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.sign(x) * self.right_value(np.abs(x))
        return float(out) if out.ndim == 0 else out

    def __eq__(self, other):
        if not isinstance(other, OddConcaveProfile):
            return NotImplemented
        return (
            self.origin_value == other.origin_value
            and self.plateau == other.plateau
            and np.array_equal(self.xs, other.xs)
            and np.array_equal(self.vs, other.vs)
        )

    def __repr__(self):
        return (
            f"OddConcaveProfile(origin_value={self.origin_value!r}, "
            f"breakpoints={self.breakpoints!r}, plateau={self.plateau!r})"
        )

    def to_json(self) -> dict:
        return {"origin": self.origin_value, "points": [[x, v] for x, v in self.breakpoints], "plateau": self.plateau}

    @classmethod
    def from_json(cls, obj: dict) -> OddConcaveProfile:
        points = obj.get("points", [])
        xs = np.array([p[0] for p in points], dtype=float)
        vs = np.array([p[1] for p in points], dtype=float)
        return cls(float(obj["origin"]), xs, vs, float(obj["plateau"]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("x,value\n")
        buf.write(f"{0.0:.17g},{self.origin_value:.17g}\n")
        for x, v in self.breakpoints:
            buf.write(f"{x:.17g},{v:.17g}\n")
        return buf.getvalue()


def symmetric_rearrange(z: LineMeasure) -> LineMeasure:
    """Even, radially nonincreasing density equimeasurable with ``z``.

    Equal-valued pieces are concatenated; the result only depends on the
    level sets of ``z``.
    """
    if z.atoms:
        raise ValueError("symmetric_rearrange takes a pure density")
    if not z.is_positive():
        raise ValueError("symmetric_rearrange requires a nonnegative density")
    pieces = []
    half = 0.0
    for v, length in density_levels(z):
        nxt = half + length / 2
        pieces.append((-nxt, -half, v))
        pieces.append((half, nxt, v))
        half = nxt
    return LineMeasure((), tuple(pieces))


def odd_rearrangement(m: LineMeasure) -> OddConcaveProfile:
    """Odd rearrangement of the distribution function of a positive measure.

    The value at ``x > 0`` equals half the largest mass ``m`` can place on a
    set of Lebesgue measure ``2x``.
    """
    if not m.is_positive():
        raise ValueError("odd_rearrangement requires a positive measure")
    origin = m.atom_mass() / 2
    levels = density_levels(m)
    lengths = np.array([ell / 2 for _, ell in levels])
    masses = np.array([v * ell / 2 for v, ell in levels])
    xs = np.cumsum(lengths)
    vs = origin + np.cumsum(masses)
    plateau = float(vs[-1]) if len(vs) else origin
    return OddConcaveProfile(origin, xs, vs, plateau)


def profile_to_measure(p: OddConcaveProfile) -> LineMeasure:
    """The derivative measure of a profile: an atom at 0 plus an even density."""
    atoms = ((0.0, 2 * p.origin_value),) if p.origin_value > 0 else ()
    pieces = []
    left = 0.0
    for x, b in zip(p.xs.tolist(), p.slopes().tolist()):
        pieces.append((-x, -left, b))
        pieces.append((left, x, b))
        left = x
    return LineMeasure.from_pieces(atoms, pieces)


def profile_leq(a: OddConcaveProfile, b: OddConcaveProfile, tol: float = 1e-12) -> tuple[bool, float]:
    """Check ``a(x) <= b(x)`` for all ``x > 0``.

    Returns the verdict and the margin ``inf_{x>0} (b - a)``. Both profiles
    are linear between consecutive points of the merged breakpoint set and
    constant past the last one, so the infimum is attained on that set or in
    the limit ``x -> 0+``.
    """
    knots = np.union1d(a.xs, b.xs)
    diffs = b.right_value(knots) - a.right_value(knots)
    margin = b.origin_value - a.origin_value
    if len(diffs):
        margin = min(margin, float(diffs.min()))
    return margin >= -tol, float(margin)


def precedes(m: LineMeasure, m2: LineMeasure, tol: float = 1e-12) -> tuple[bool, float]:
    """Decide ``m ⪯ m2`` by comparing odd rearrangements."""
    return profile_leq(odd_rearrangement(m), odd_rearrangement(m2), tol)


def shift_profile(a: OddConcaveProfile, c: float) -> OddConcaveProfile:
    """Add ``c * sgn(x)``; stays odd, nondecreasing and concave for x > 0."""
    if c < 0:
        raise ValueError(f"shift must be nonnegative, got {c}")
    if c == 0:
        return a
    return OddConcaveProfile(a.origin_value + c, a.xs, a.vs + c, a.plateau + c)
