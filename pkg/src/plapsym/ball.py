"""Radial minimizers of the truncated p-energy on balls.

For a zero ``rho`` of f whose primitive dominates F below it, the energy

    I_r(u) = int_{B_r} (1/p |grad u|^p + F_rho(u)),   F_rho(t) = int_t^rho f~,

with f~ equal to f(0) below 0, f on [0, rho] and 0 above rho, is minimized
over nonnegative radial profiles vanishing at r.  The solver works in
``w = rho - u`` so that the gap ``rho - max u`` stays resolvable when it is
far below the resolution of ``u`` itself; a zero gap (a core where u equals
rho) is reported as such.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import diags

from . import _polyalg as pa
from ._descent import NonConvergenceError, projected_newton
from .nonlinearity import NonlinearitySpec, eval_F, eval_df, eval_f, isolate_zeros, MATCH_TOL

__all__ = [
    "HypothesisError",
    "NonConvergenceError",
    "TruncatedNonlinearity",
    "RadialSolution",
    "truncate",
    "unit_ball_volume",
    "radial_energy",
    "minimize_radial",
    "sup_norm_scan",
]

GRAD_FLOOR = 1e-12


class HypothesisError(ValueError):
    """The nonlinearity violates a precondition; ``witness`` names the offending value."""

    def __init__(self, msg: str, witness=None):
        super().__init__(msg)
        self.witness = witness


def unit_ball_volume(N: int) -> float:
    """omega_N, the volume of the unit ball in R^N."""
    return math.pi ** (N / 2.0) / math.gamma(N / 2.0 + 1.0)


class TruncatedNonlinearity:
    """f~ and F~_rho for a zero ``rho`` of f.

    ``G(w) = F~_rho(rho - w)`` and its derivatives are what the radial
    energy consumes; near ``w = 0`` G comes from the exact Taylor expansion
    of f at rho, so that tiny gaps keep full relative accuracy.
    """

    def __init__(self, f: NonlinearitySpec, rho: float):
        self.f, self.rho = f, float(rho)
        self.F_rho = float(eval_F(f, self.rho))
        self.f0 = float(eval_f(f, 0.0))
        bps = f._cache()["bps_exact"]
        R = Fraction(self.rho)
        k = 0
        while k < f.n_pieces - 1 and R > bps[k + 1]:
            k += 1
        tay = pa.taylor_shift(list(f.exact_pieces[k]), R - bps[k])
        # G(rho - w) = sum_i tay_i (-1)^i w^(i+1) / (i+1) on this piece
        self._top = np.array([0.0] + [float(c) * (-1) ** i / (i + 1) for i, c in enumerate(tay)])
        self._top_rev = self._top[::-1]
        self._w_max = float(R - bps[k])

    def f_tilde(self, t):
        t = np.asarray(t, dtype=float)
        inside = np.clip(t, 0.0, self.rho)
        val = eval_f(self.f, inside)
        return np.where(t < 0, self.f0, np.where(t > self.rho, 0.0, val))

    def F_tilde(self, t):
        """``int_t^rho f~``: linear below 0, zero above rho."""
        t = np.asarray(t, dtype=float)
        inside = np.clip(t, 0.0, self.rho)
        val = self.F_rho - eval_F(self.f, inside)
        val = np.where(t < 0, self.F_rho - self.f0 * t, val)
        return np.where(t > self.rho, 0.0, val)

    def G(self, w):
        w = np.clip(np.asarray(w, dtype=float), 0.0, self.rho)
        near = w <= self._w_max
        out = np.polyval(self._top_rev, np.where(near, w, 0.0))
        if not np.all(near):
            out = np.where(near, out, self.F_rho - eval_F(self.f, self.rho - np.where(near, 0.0, w)))
        return out

    def dG(self, w):
        w = np.clip(np.asarray(w, dtype=float), 0.0, self.rho)
        return eval_f(self.f, self.rho - w)

    def d2G(self, w):
        w = np.clip(np.asarray(w, dtype=float), 0.0, self.rho)
        return -eval_df(self.f, self.rho - w)


def truncate(f: NonlinearitySpec, rho: float) -> TruncatedNonlinearity:
    """Truncate f at the zero ``rho``; refuses when F~_rho fails to be positive on [0, rho)."""
    rho = float(rho)
    if not 0 < rho <= f.cap:
        raise HypothesisError(f"rho = {rho!r} outside (0, cap = {f.cap!r}]", rho)
    f0 = float(eval_f(f, 0.0))
    if f0 < 0:
        raise HypothesisError(f"f(0) = {f0!r} < 0: truncation needs f(0) >= 0", 0.0)
    zeros = isolate_zeros(f)
    tol = MATCH_TOL * max(1.0, rho)
    at = [z for z in zeros if z.enclosure[0] - tol <= rho <= z.enclosure[1] + tol]
    if not at:
        raise HypothesisError(f"f(rho) != 0 at rho = {rho!r}", rho)
    zr = at[0]
    level = f.F_exact(zr.z)
    if not level > 0:
        raise HypothesisError(f"F_rho(0) = F(rho) = {float(level)!r} is not positive", 0.0)
    for z in zeros:
        if 0 < z.z < zr.z and not f.F_exact(z.z) < level:
            raise HypothesisError(
                f"F_rho vanishes or turns negative at t = {z.z!r} below rho", z.z)
    if zr.order_left is None or (zr.lead_left * (-1) ** zr.order_left) <= 0:
        raise HypothesisError(f"f is not positive just below rho = {rho!r}", rho)
    return TruncatedNonlinearity(f, zr.z)


@dataclass(frozen=True)
class RadialSolution:
    r: float
    N: int
    p: float
    rho: float
    grid: np.ndarray
    u: np.ndarray
    energy: float
    sup_norm: float
    gap: float
    iterations: int
    start: str
    start_energies: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {"r": self.r, "N": self.N, "p": self.p, "rho": self.rho, "J": int(self.grid.size - 1),
                "energy": self.energy, "sup_norm": self.sup_norm, "gap": self.gap,
                "iterations": self.iterations, "start": self.start}


class _RadialEnergy:
    """Discrete I_r on the uniform radial grid, as a function of w_0..w_{J-1}."""

    def __init__(self, tr: TruncatedNonlinearity, p: float, N: int, r: float, J: int):
        self.tr, self.p, self.N = tr, float(p), int(N)
        self.h = r / J
        s = np.linspace(0.0, r, J + 1)
        self.s = s
        area = N * unit_ball_volume(N)
        mid = 0.5 * (s[1:] + s[:-1])
        self.a = area * mid ** (N - 1)
        tw = np.full(J + 1, 1.0)
        tw[0] = tw[-1] = 0.5
        self.b = area * tw * s ** (N - 1) * self.h
        self.rho = tr.rho

    def full(self, w):
        return np.concatenate([w, [self.rho]])

    def energy(self, w):
        wf = self.full(w)
        d = np.diff(wf) / self.h
        return float(np.sum(self.a * self.h / self.p * np.abs(d) ** self.p)
                     + np.sum(self.b * self.tr.G(wf)))

    def grad(self, w):
        wf = self.full(w)
        d = np.diff(wf) / self.h
        with np.errstate(divide="ignore", invalid="ignore"):
            flux = np.where(d == 0, 0.0, self.a * np.abs(d) ** (self.p - 2.0) * d)
        g = self.b * self.tr.dG(wf)
        g[:-1] -= flux
        g[1:] += flux
        return g[:-1]

    def hess(self, w):
        wf = self.full(w)
        d = np.maximum(np.abs(np.diff(wf) / self.h), GRAD_FLOOR)
        k = self.a * (self.p - 1.0) * d ** (self.p - 2.0) / self.h
        main = self.b * np.maximum(self.tr.d2G(wf), 0.0)
        main[:-1] += k
        main[1:] += k
        n = w.size
        return diags([-k[:n - 1], main[:n], -k[:n - 1]], [-1, 0, 1], format="csc")


def radial_energy(tr: TruncatedNonlinearity, p: float, N: int, r: float, u: np.ndarray) -> float:
    """Discrete I_r of nodal values ``u`` (with ``u[-1] = 0``)."""
    u = np.asarray(u, dtype=float)
    E = _RadialEnergy(tr, p, N, r, u.size - 1)
    return E.energy(tr.rho - u[:-1])


def plateau_start(rho: float, s: np.ndarray, r: float) -> np.ndarray:
    """The test function equal to rho inside B_{r-1}, falling linearly to 0 on the last unit."""
    return rho * np.clip(r - s, 0.0, 1.0)


def _monotone(w):
    # u nonincreasing in the radius <=> w nondecreasing
    return np.maximum.accumulate(w)


def minimize_radial(f: NonlinearitySpec, p: float, N: int, rho: float, r: float, J: int,
                    max_iter: int = 2000) -> RadialSolution:
    """Minimize the discrete truncated energy over radial nodal vectors with u(r) = 0.

    Two starts are run (u = 0 and the plateau test function) and the lower
    energy wins.
    """
    if not p > 1:
        raise ValueError(f"p must exceed 1, got {p!r}")
    if N < 1:
        raise ValueError(f"dimension N must be positive, got {N!r}")
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r!r}")
    if J < 128:
        raise ValueError(f"need J >= 128 radial cells, got {J}")
    tr = truncate(f, rho)
    E = _RadialEnergy(tr, p, N, r, J)
    starts = {"zero": np.full(J, tr.rho),
              "plateau": tr.rho - plateau_start(tr.rho, E.s, r)[:-1]}
    results = {}
    for name, w0 in starts.items():
        results[name] = projected_newton(E.energy, E.grad, E.hess, w0, 0.0, tr.rho,
                                         project=_monotone, max_iter=max_iter)
    best = min(results, key=lambda k: (results[k].energy, k))
    res = results[best]
    w = np.clip(res.x, 0.0, tr.rho)
    u = np.concatenate([tr.rho - w, [0.0]])
    gap = float(w[0])
    return RadialSolution(r=float(r), N=int(N), p=float(p), rho=tr.rho, grid=E.s, u=u,
                          energy=res.energy, sup_norm=float(np.max(u)), gap=gap,
                          iterations=res.iterations, start=best,
                          start_energies={k: v.energy for k, v in results.items()})


def sup_norm_scan(f: NonlinearitySpec, p: float, N: int, rho: float, eps: float,
                  r_list: Sequence[float], J: int = 1024) -> Tuple[float, List[dict]]:
    """Least listed radius whose minimizer reaches ``rho - eps``, plus the full table."""
    r_list = [float(r) for r in r_list]
    if any(b <= a for a, b in zip(r_list, r_list[1:])):
        raise ValueError("r_list must be strictly ascending")
    table = []
    R0 = None
    for r in r_list:
        sol = minimize_radial(f, p, N, rho, r, J)
        table.append({"r": r, "J": J, "sup_norm": sol.sup_norm, "energy": sol.energy,
                      "gap": sol.gap})
        if R0 is None and sol.sup_norm >= sol.rho - eps:
            R0 = r
    if R0 is None:
        raise ValueError(f"no listed radius reaches rho - eps = {rho - eps!r}; "
                         f"largest sup norm {max(t['sup_norm'] for t in table)!r}")
    return R0, table
