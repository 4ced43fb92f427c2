"""Finite signed measures on the line: finitely many atoms plus a
piecewise-constant density.

Every wave measure in this package has this form. Atoms model jumps of a
piecewise-constant state, densities model spread-out rarefaction waves and
rearranged profiles. Singular-continuous parts are not representable, which
keeps all operations below exact finite computations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

#: Positions closer than this are treated as the same point.
POS_TOL = 1e-12
#: Masses and density values smaller than this are dropped.
MASS_TOL = 1e-15

Atom = tuple[float, float]
Piece = tuple[float, float, float]


def _cluster(points: Iterable[float]) -> dict[float, float]:
    """Map each point to the smallest point of its POS_TOL cluster."""
    rep: dict[float, float] = {}
    current = None
    for p in sorted(set(points)):
        if current is None or p - current > POS_TOL:
            current = p
        rep[p] = current
    return rep


def _merge_atoms(atoms: Iterable[Atom]) -> tuple[Atom, ...]:
    atoms = sorted((float(x), float(m)) for x, m in atoms)
    out: list[list[float]] = []
    for x, m in atoms:
        if not math.isfinite(x) or not math.isfinite(m):
            raise ValueError(f"non-finite atom ({x}, {m})")
        if out and x - out[-1][0] <= POS_TOL:
            out[-1][1] += m
        else:
            out.append([x, m])
    return tuple((x, m) for x, m in out if abs(m) >= MASS_TOL)


@dataclass(frozen=True)
class Interval:
    """An interval with explicit endpoint closedness; endpoints may be infinite."""

    a: float
    b: float
    closed_left: bool = True
    closed_right: bool = False

    def __post_init__(self):
        if not self.a <= self.b:
            raise ValueError(f"empty interval [{self.a}, {self.b}]")

    def contains_point(self, x: float) -> bool:
        if abs(x - self.a) <= POS_TOL:
            return self.closed_left
        if abs(x - self.b) <= POS_TOL:
            return self.closed_right
        return self.a < x < self.b


@dataclass(frozen=True)
class LineMeasure:
    """Atoms ``(x, mass)`` plus density pieces ``(a, b, value)`` on ``[a, b)``.

    The constructor canonicalizes: atoms are sorted and merged when closer
    than ``POS_TOL``, negligible masses are dropped, density pieces are sorted
    and adjacent pieces with equal value are fused. Overlapping pieces are
    rejected; use :meth:`from_pieces` to sum overlapping contributions.
    """

    atoms: tuple[Atom, ...] = ()
    density: tuple[Piece, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", _merge_atoms(self.atoms))
        pieces = []
        for a, b, v in self.density:
            a, b, v = float(a), float(b), float(v)
            if not (math.isfinite(a) and math.isfinite(b) and math.isfinite(v)):
                raise ValueError(f"density piece ({a}, {b}, {v}) must be bounded")
            if b < a:
                raise ValueError(f"density piece [{a}, {b}) is reversed")
            if b - a <= POS_TOL or abs(v) < MASS_TOL:
                continue
            pieces.append((a, b, v))
        pieces.sort()
        fused: list[Piece] = []
        for a, b, v in pieces:
            if fused:
                pa, pb, pv = fused[-1]
                if a < pb - POS_TOL:
                    raise ValueError(f"density pieces [{pa}, {pb}) and [{a}, {b}) overlap")
                if abs(a - pb) <= POS_TOL:
                    a = pb
                    if v == pv:
                        fused[-1] = (pa, b, v)
                        continue
            fused.append((a, b, v))
        object.__setattr__(self, "density", tuple(fused))

    @classmethod
    def from_pieces(cls, atoms: Iterable[Atom] = (), pieces: Iterable[Piece] = ()) -> LineMeasure:
        """Build a measure from possibly overlapping pieces, summing overlaps."""
        pieces = [(float(a), float(b), float(v)) for a, b, v in pieces if b > a]
        if not pieces:
            return cls(tuple(atoms), ())
        rep = _cluster(p for a, b, _ in pieces for p in (a, b))
        cuts = sorted(set(rep.values()))
        index = {c: k for k, c in enumerate(cuts)}
        # difference array over the common refinement
        diff = [0.0] * (len(cuts) + 1)
        for a, b, v in pieces:
            ia, ib = index[rep[a]], index[rep[b]]
            if ia == ib:
                continue
            diff[ia] += v
            diff[ib] -= v
        out = []
        level = 0.0
        for k in range(len(cuts) - 1):
            level += diff[k]
            out.append((cuts[k], cuts[k + 1], level))
        return cls(tuple(atoms), tuple(out))

    # -- scalar queries -------------------------------------------------

    def atom_mass(self) -> float:
        return math.fsum(m for _, m in self.atoms)

    def density_mass(self) -> float:
        return math.fsum((b - a) * v for a, b, v in self.density)

    def total_mass(self) -> float:
        """m(R)."""
        return self.atom_mass() + self.density_mass()

    def total_variation(self) -> float:
        """|m|(R)."""
        return math.fsum(abs(m) for _, m in self.atoms) + math.fsum(
            (b - a) * abs(v) for a, b, v in self.density
        )

    def is_positive(self) -> bool:
        return all(m >= 0 for _, m in self.atoms) and all(v >= 0 for *_, v in self.density)

    def is_zero(self) -> bool:
        return not self.atoms and not self.density

    def support_length(self) -> float:
        """Lebesgue measure of the density support."""
        return math.fsum(b - a for a, b, _ in self.density)

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other: LineMeasure) -> LineMeasure:
        return LineMeasure.from_pieces(self.atoms + other.atoms, self.density + other.density)

    def __neg__(self) -> LineMeasure:
        return self.scale(-1.0)

    def __sub__(self, other: LineMeasure) -> LineMeasure:
        return self + (-other)

    def scale(self, c: float) -> LineMeasure:
        return LineMeasure(
            tuple((x, c * m) for x, m in self.atoms),
            tuple((a, b, c * v) for a, b, v in self.density),
        )

    def translate(self, dx: float) -> LineMeasure:
        return LineMeasure(
            tuple((x + dx, m) for x, m in self.atoms),
            tuple((a + dx, b + dx, v) for a, b, v in self.density),
        )

    # -- serialization --------------------------------------------------

    def to_json(self) -> dict:
        return {
            "atoms": [[x, m] for x, m in self.atoms],
            "density": [[a, b, v] for a, b, v in self.density],
        }

    @classmethod
    def from_json(cls, obj: dict) -> LineMeasure:
        atoms = tuple((float(x), float(m)) for x, m in obj.get("atoms", []))
        density = tuple((float(a), float(b), float(v)) for a, b, v in obj.get("density", []))
        return cls(atoms, density)


ZERO = LineMeasure()


def positive_part(m: LineMeasure) -> LineMeasure:
    """Jordan positive part."""
    return LineMeasure(
        tuple((x, w) for x, w in m.atoms if w > 0),
        tuple((a, b, v) for a, b, v in m.density if v > 0),
    )


def negative_part(m: LineMeasure) -> LineMeasure:
    """Jordan negative part, returned as a positive measure."""
    return LineMeasure(
        tuple((x, -w) for x, w in m.atoms if w < 0),
        tuple((a, b, -v) for a, b, v in m.density if v < 0),
    )


def total_variation_measure(m: LineMeasure) -> LineMeasure:
    return LineMeasure(
        tuple((x, abs(w)) for x, w in m.atoms),
        tuple((a, b, abs(v)) for a, b, v in m.density),
    )


def restrict(m: LineMeasure, J: Interval | Sequence[Interval]) -> LineMeasure:
    """Restriction of ``m`` to a finite union of disjoint intervals.

    Atoms sitting on an endpoint of ``J`` are kept only if that endpoint is
    closed.
    """
    parts = [J] if isinstance(J, Interval) else list(J)
    atoms = [(x, w) for x, w in m.atoms if any(I.contains_point(x) for I in parts)]
    pieces = []
    for I in parts:
        for a, b, v in m.density:
            lo, hi = max(a, I.a), min(b, I.b)
            if hi > lo:
                pieces.append((lo, hi, v))
    return LineMeasure(tuple(atoms), tuple(pieces))


def density_levels(m: LineMeasure) -> list[tuple[float, float]]:
    """Distinct density values with their total lengths, highest value first."""
    lengths: dict[float, list[float]] = {}
    for a, b, v in m.density:
        lengths.setdefault(v, []).append(b - a)
    return sorted(((v, math.fsum(ls)) for v, ls in lengths.items()), reverse=True)


def sup_mass(m: LineMeasure, s: float) -> float:
    """Supremum of m(A) over Borel sets A of Lebesgue measure at most ``s``.

    Atoms cost no Lebesgue measure, so all of them are taken; the remaining
    budget is spent greedily on the highest density levels.
    """
    if s < 0:
        raise ValueError(f"budget s must be nonnegative, got {s}")
    if not m.is_positive():
        raise ValueError("sup_mass requires a positive measure")
    terms = [m.atom_mass()]
    budget = s
    for v, length in density_levels(m):
        if budget <= 0:
            break
        take = min(length, budget)
        terms.append(v * take)
        budget -= take
    return math.fsum(terms)
