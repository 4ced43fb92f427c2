"""Wave measures of piecewise-constant states and the Glimm functionals.

For a piecewise-constant state the i-th wave measure is purely atomic: each
jump carries the i-strength of the Riemann problem it defines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measure import POS_TOL, LineMeasure, negative_part, total_variation_measure
from .systems import HyperbolicSystem, riemann_solve


@dataclass(frozen=True, eq=False)
class PiecewiseConstantFn:
    """A vector-valued step function.

    ``values[0]`` holds on ``(-inf, jumps[0])``, ``values[k]`` on
    ``[jumps[k-1], jumps[k])``, ``values[-1]`` on ``[jumps[-1], inf)``.
    Jumps closer than ``POS_TOL`` are fused and only the outer states kept.
    """

    jumps: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        jumps = np.asarray(self.jumps, dtype=float).reshape(-1)
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if len(values) != len(jumps) + 1:
            raise ValueError(f"{len(jumps)} jumps need {len(jumps) + 1} values, got {len(values)}")
        if np.any(np.diff(jumps) < -POS_TOL):
            raise ValueError("jump positions must be nondecreasing")
        keep_j = []
        keep_v = [values[0]]
        for k, x in enumerate(jumps):
            if keep_j and x - keep_j[-1] <= POS_TOL:
                keep_v[-1] = values[k + 1]
            else:
                keep_j.append(float(x))
                keep_v.append(values[k + 1])
        jumps = np.array(keep_j, dtype=float)
        values = np.array(keep_v, dtype=float).reshape(len(keep_v), -1)
        jumps.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "jumps", jumps)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def __call__(self, x):
        idx = np.searchsorted(self.jumps, np.asarray(x, dtype=float), side="right")
        return self.values[idx]

    def __eq__(self, other):
        if not isinstance(other, PiecewiseConstantFn):
            return NotImplemented
        return np.array_equal(self.jumps, other.jumps) and np.array_equal(self.values, other.values)

    def total_variation(self) -> float:
        return float(np.sum(np.linalg.norm(np.diff(self.values, axis=0), axis=1)))

    def to_json(self) -> dict:
        return {"jumps": self.jumps.tolist(), "values": self.values.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> PiecewiseConstantFn:
        return cls(np.array(obj["jumps"], dtype=float), np.array(obj["values"], dtype=float))


@dataclass(frozen=True)
class WaveDecomposition:
    """Signed wave measures, one per characteristic family (index 0 is family 1)."""

    per_family: tuple[LineMeasure, ...]

    def family(self, i: int) -> LineMeasure:
        return self.per_family[i - 1]


def wave_measures(sys: HyperbolicSystem, u: PiecewiseConstantFn) -> WaveDecomposition:
    """Atom ``sigma_i`` at every jump, from the Riemann fan of that jump."""
    atoms: list[list[tuple[float, float]]] = [[] for _ in range(sys.n)]
    for k, x in enumerate(u.jumps):
        fan = riemann_solve(sys, u.values[k], u.values[k + 1])
        for i, s in enumerate(fan.strengths):
            atoms[i].append((float(x), s))
    return WaveDecomposition(tuple(LineMeasure(tuple(a)) for a in atoms))


def glimm_V(d: WaveDecomposition) -> float:
    """Total strength of waves."""
    return math.fsum(m.total_variation() for m in d.per_family)


def glimm_Q(d: WaveDecomposition) -> float:
    """Interaction potential of atomic wave measures.

    Cross-family term: a j-atom strictly left of an i-atom with ``i < j``.
    Same-family term: ordered pairs (negative-part atom, any atom) at
    distinct positions, read literally as a product measure.
    """
    for m in d.per_family:
        if m.density:
            raise ValueError("glimm_Q handles purely atomic wave measures")
    terms = []
    n = len(d.per_family)
    for i in range(n):
        ys = np.array([x for x, _ in d.per_family[i].atoms])
        ws = np.array([abs(m) for _, m in d.per_family[i].atoms])
        for j in range(i + 1, n):
            xs = np.array([x for x, _ in d.per_family[j].atoms])
            ms = np.array([abs(m) for _, m in d.per_family[j].atoms])
            if not len(xs) or not len(ys):
                continue
            order = np.argsort(xs)
            xs, ms = xs[order], ms[order]
            prefix = np.concatenate(([0.0], np.cumsum(ms)))
            # mass of j-atoms at positions strictly below y (beyond the merge tolerance)
            below = prefix[np.searchsorted(xs, ys - POS_TOL, side="left")]
            terms.append(float(np.dot(ws, below)))
        neg = negative_part(d.per_family[i])
        tv = total_variation_measure(d.per_family[i])
        # atoms are merged per position, so the only same-position pairs are self pairs
        terms.append(neg.total_mass() * tv.total_mass() - math.fsum(m * m for _, m in neg.atoms))
    return math.fsum(terms)


def glimm_upsilon(d: WaveDecomposition, C0: float) -> float:
    if not C0 > 0:
        raise ValueError(f"C0 must be positive, got {C0}")
    return glimm_V(d) + C0 * glimm_Q(d)


def front_V(strengths: np.ndarray) -> float:
    return float(np.sum(np.abs(strengths)))


def front_Q(families: np.ndarray, strengths: np.ndarray, n: int) -> float:
    """Interaction potential of an ordered list of fronts.

    Array order stands in for spatial order, which keeps two fronts that are
    about to collide distinct even when their computed positions coincide.
    """
    a = np.abs(strengths)
    total = 0.0
    for i in range(1, n + 1):
        on_i = families == i
        for j in range(i + 1, n + 1):
            aj = np.where(families == j, a, 0.0)
            before = np.cumsum(aj) - aj
            total += float(np.sum(np.where(on_i, a * before, 0.0)))
        neg = np.where(on_i & (strengths < 0), a, 0.0)
        tv = np.where(on_i, a, 0.0)
        total += float(neg.sum() * tv.sum() - np.dot(neg, neg))
    return total
