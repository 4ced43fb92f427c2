"""Strictly hyperbolic, genuinely nonlinear systems with n <= 2 and their
Riemann solver.

Eigenvectors are normalized so that ``grad(lambda_i) . r_i = 1`` and
``l_i . r_j = delta_ij``. With that normalization the strength of an i-wave,
``lambda_i(right) - lambda_i(left)``, is positive for rarefactions and
negative for shocks, and it is also the natural parameter of the wave
curves below.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, NonAdmissibleState


@dataclass(frozen=True)
class AdmissibleRegion:
    """Box ``|u - ref|_inf <= radius`` plus a budget on total wave strength."""

    ref_state: tuple[float, ...]
    radius: float = math.inf
    tv_budget: float = math.inf

    def contains(self, u) -> bool:
        u = np.asarray(u, dtype=float)
        return bool(np.all(np.isfinite(u)) and np.max(np.abs(u - np.asarray(self.ref_state))) <= self.radius)

    def check(self, u, what: str = "state") -> None:
        if not self.contains(u):
            raise NonAdmissibleState(f"{what} {np.asarray(u).tolist()} leaves the admissible box "
                                     f"around {list(self.ref_state)} (radius {self.radius})")


@dataclass(frozen=True)
class RiemannFan:
    """Solution of one Riemann problem, family by family.

    ``states[0]`` is the left state and ``states[n]`` the right one. For a
    shock ``speeds[i]`` holds the Rankine-Hugoniot speed twice; for a
    rarefaction it holds the left and right characteristic speeds.
    """

    states: tuple[np.ndarray, ...]
    strengths: tuple[float, ...]
    speeds: tuple[tuple[float, float], ...]
    residual: float = 0.0


class HyperbolicSystem(ABC):
    """A system ``u_t + f(u)_x = 0`` with genuinely nonlinear fields."""

    n: int
    name: str

    def __init__(self, region: AdmissibleRegion):
        self.region = region

    @abstractmethod
    def flux(self, u: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def eigenvalues(self, u: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def eigen(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return ``(lambdas, R, L)`` with ``R[:, i] = r_i`` and ``L[i] = l_i``."""

    @abstractmethod
    def wave_curve(self, family: int, u: np.ndarray, sigma: float) -> np.ndarray:
        """State reached from ``u`` along the forward ``family`` wave curve
        (families are numbered from 1) with signed strength ``sigma``."""

    @abstractmethod
    def shock_speed(self, family: int, left: np.ndarray, right: np.ndarray) -> float: ...

    def char_speed(self, family: int, u: np.ndarray) -> float:
        return float(self.eigenvalues(u)[family - 1])

    def wave_speed(self, family: int, left: np.ndarray, right: np.ndarray, sigma: float) -> float:
        """Front speed: Rankine-Hugoniot for shocks, right characteristic
        speed for rarefaction fronts."""
        if sigma < 0:
            return self.shock_speed(family, left, right)
        return self.char_speed(family, right)

    def to_json(self) -> dict:
        out = {"system": self.name, "ref_state": list(self.region.ref_state)}
        if math.isfinite(self.region.radius):
            out["box_radius"] = self.region.radius
        if math.isfinite(self.region.tv_budget):
            out["tv_budget"] = self.region.tv_budget
        return out


class Burgers(HyperbolicSystem):
    """Inviscid Burgers equation, ``f(u) = u**2 / 2``."""

    n = 1
    name = "burgers"

    def flux(self, u):
        u = np.asarray(u, dtype=float)
        return 0.5 * u * u

    def eigenvalues(self, u):
        return np.asarray(u, dtype=float).reshape(1).copy()

    def eigen(self, u):
        return self.eigenvalues(u), np.ones((1, 1)), np.ones((1, 1))

    def wave_curve(self, family, u, sigma):
        return np.asarray(u, dtype=float) + sigma

    def shock_speed(self, family, left, right):
        return 0.5 * (float(left[0]) + float(right[0]))


class PSystem(HyperbolicSystem):
    """Isentropic gas dynamics in Lagrangian coordinates.

    State ``(v, u)``: specific volume and velocity, with
    ``v_t - u_x = 0``, ``u_t + p(v)_x = 0`` and ``p(v) = k v**(-gamma)``.
    The eigenvalues are ``-c(v) < c(v)`` with ``c = sqrt(-p'(v))``.
    """

    n = 2
    name = "p_system"

    def __init__(self, gamma: float, k: float, region: AdmissibleRegion):
        if not gamma > 1:
            raise ValueError(f"gamma must exceed 1, got {gamma}")
        if not k > 0:
            raise ValueError(f"k must be positive, got {k}")
        super().__init__(region)
        self.gamma = float(gamma)
        self.k = float(k)
        self._C = math.sqrt(self.k * self.gamma)

    def to_json(self):
        return {**super().to_json(), "gamma": self.gamma, "k": self.k}

    def pressure(self, v: float) -> float:
        return self.k * v ** (-self.gamma)

    def sound_speed(self, v: float) -> float:
        return self._C * v ** (-(self.gamma + 1) / 2)

    def _volume_for_speed(self, c: float) -> float:
        return (c / self._C) ** (-2 / (self.gamma + 1))

    def _phi(self, v: float) -> float:
        # antiderivative of -c(v)
        return 2 * self._C / (self.gamma - 1) * v ** (-(self.gamma - 1) / 2)

    def flux(self, u):
        v, vel = float(u[0]), float(u[1])
        return np.array([-vel, self.pressure(v)])

    def eigenvalues(self, u):
        c = self.sound_speed(float(u[0]))
        return np.array([-c, c])

    def eigen(self, u):
        v = float(u[0])
        c = self.sound_speed(v)
        g1 = self.gamma + 1
        R = np.array([[2 * v / (g1 * c), -2 * v / (g1 * c)], [2 * v / g1, 2 * v / g1]])
        return np.array([-c, c]), R, np.linalg.inv(R)

    def _check_volume(self, v: float) -> None:
        if not (v > 0 and math.isfinite(v)):
            raise NonAdmissibleState(f"specific volume {v} is not positive")

    def wave_curve(self, family, u, sigma):
        v0, u0 = float(u[0]), float(u[1])
        self._check_volume(v0)
        c0 = self.sound_speed(v0)
        c1 = c0 - sigma if family == 1 else c0 + sigma
        if not c1 > 0:
            raise NonAdmissibleState(f"strength {sigma} of a {family}-wave from v={v0} reaches vacuum")
        v1 = self._volume_for_speed(c1)
        if sigma >= 0:
            if family == 1:
                u1 = u0 + self._phi(v0) - self._phi(v1)
            else:
                u1 = u0 + self._phi(v1) - self._phi(v0)
        else:
            dp = self.pressure(v1) - self.pressure(v0)
            u1 = u0 - math.sqrt(max(-dp * (v1 - v0), 0.0))
        return np.array([v1, u1])

    def shock_speed(self, family, left, right):
        vl, vr = float(left[0]), float(right[0])
        if vl == vr:
            return self.char_speed(family, left)
        s = math.sqrt(max(-(self.pressure(vr) - self.pressure(vl)) / (vr - vl), 0.0))
        return -s if family == 1 else s


def builtin_burgers(region: AdmissibleRegion | None = None) -> Burgers:
    return Burgers(region or AdmissibleRegion((0.0,)))


def builtin_p_system(
    gamma: float = 1.4,
    k: float = 1.0,
    ref_state=(1.0, 0.0),
    box_radius: float = 0.5,
    tv_budget: float = 0.3,
) -> PSystem:
    if not gamma > 1:
        raise ValueError(f"gamma must exceed 1, got {gamma}")
    if not k > 0:
        raise ValueError(f"k must be positive, got {k}")
    region = AdmissibleRegion(tuple(float(x) for x in ref_state), box_radius, tv_budget)
    return PSystem(gamma, k, region)


def system_from_json(obj: dict) -> HyperbolicSystem:
    """Instantiate a built-in system from its scenario description."""
    name = obj.get("system")
    if name == "burgers":
        ref = tuple(float(x) for x in np.atleast_1d(obj.get("ref_state", [0.0])))
        region = AdmissibleRegion(ref, float(obj.get("box_radius", math.inf)), float(obj.get("tv_budget", math.inf)))
        return builtin_burgers(region)
    if name == "p_system":
        return builtin_p_system(
            gamma=float(obj.get("gamma", 1.4)),
            k=float(obj.get("k", 1.0)),
            ref_state=tuple(obj.get("ref_state", (1.0, 0.0))),
            box_radius=float(obj.get("box_radius", 0.5)),
            tv_budget=float(obj.get("tv_budget", 0.3)),
        )
    raise ValueError(f"unknown system {name!r}")


def _compose(sys: HyperbolicSystem, u: np.ndarray, sigmas) -> list[np.ndarray]:
    states = [u]
    for i, s in enumerate(sigmas, start=1):
        states.append(sys.wave_curve(i, states[-1], s))
    return states


def riemann_solve(
    sys: HyperbolicSystem,
    u_minus,
    u_plus,
    tol: float = 1e-12,
    max_iter: int = 100,
    check: bool = True,
) -> RiemannFan:
    """Solve the Riemann problem with left state ``u_minus`` and right state
    ``u_plus``.

    For n = 1 the single strength is read off directly. For n = 2 Newton's
    method runs on the composed wave-curve map ``sigma -> W2(W1(u-))``,
    starting from the linearized strengths ``l_i(u-) . (u+ - u-)``.
    """
    ul = np.asarray(u_minus, dtype=float).reshape(sys.n)
    ur = np.asarray(u_plus, dtype=float).reshape(sys.n)
    if check:
        sys.region.check(ul, "left state")
        sys.region.check(ur, "right state")

    if sys.n == 1:
        sigma = sys.char_speed(1, ur) - sys.char_speed(1, ul)
        sigmas = [sigma]
        states = [ul, ur]
        residual = 0.0
    else:
        _, _, L = sys.eigen(ul)
        sig = L @ (ur - ul)
        scale = max(1.0, float(np.max(np.abs(ur))))
        residual = math.inf
        for _ in range(max_iter):
            try:
                F = _compose(sys, ul, sig)[-1] - ur
            except NonAdmissibleState:
                sig = 0.5 * sig
                continue
            residual = float(np.max(np.abs(F)))
            if residual <= tol * scale:
                break
            h = 1e-7 * max(1e-3, float(np.max(np.abs(sig))))
            J = np.empty((2, 2))
            for j in range(2):
                e = np.zeros(2)
                e[j] = h
                J[:, j] = (_compose(sys, ul, sig + e)[-1] - _compose(sys, ul, sig - e)[-1]) / (2 * h)
            step = np.linalg.solve(J, -F)
            # backtrack if the full step does not reduce the residual
            lam = 1.0
            while lam > 1e-4:
                trial = sig + lam * step
                try:
                    Ft = _compose(sys, ul, trial)[-1] - ur
                    if float(np.max(np.abs(Ft))) < residual:
                        break
                except NonAdmissibleState:
                    pass
                lam *= 0.5
            sig = sig + lam * step
        else:
            raise NoConvergence(
                f"Riemann solve from {ul.tolist()} to {ur.tolist()} stalled at residual {residual:.3e}"
            )
        sigmas = [float(s) for s in sig]
        states = _compose(sys, ul, sigmas)
        states[-1] = ur.copy()

    speeds = []
    for i, s in enumerate(sigmas, start=1):
        a, b = states[i - 1], states[i]
        if s < 0:
            c = sys.shock_speed(i, a, b)
            speeds.append((c, c))
        else:
            speeds.append((sys.char_speed(i, a), sys.char_speed(i, b)))
    if check:
        for w in states[1:-1]:
            sys.region.check(w, "intermediate state")
    return RiemannFan(tuple(states), tuple(float(s) for s in sigmas), tuple(speeds), residual)


def check_normalization(sys: HyperbolicSystem, states, h: float = 1e-6) -> float:
    """Largest violation of the eigenvector normalization over ``states``.

    Gradients of the eigenvalues are taken by central differences.
    """
    worst = 0.0
    for u in states:
        u = np.asarray(u, dtype=float).reshape(sys.n)
        _, R, L = sys.eigen(u)
        worst = max(worst, float(np.max(np.abs(L @ R - np.eye(sys.n)))))
        for i in range(sys.n):
            grad = np.empty(sys.n)
            for j in range(sys.n):
                e = np.zeros(sys.n)
                e[j] = h
                grad[j] = (sys.eigenvalues(u + e)[i] - sys.eigenvalues(u - e)[i]) / (2 * h)
            worst = max(worst, abs(float(grad @ R[:, i]) - 1.0))
    return worst


def spectral_gap(sys: HyperbolicSystem, states) -> float:
    """Smallest distance between consecutive eigenvalues over ``states``."""
    if sys.n == 1:
        return math.inf
    return min(float(np.min(np.diff(sys.eigenvalues(np.asarray(u, dtype=float))))) for u in states)
