"""Realize catalog entries as sampled profiles.

The increasing and periodic profiles are given implicitly by the
time-of-level map

    T(v) = ((p-1)/p)^(1/p) * int_0^v ds / (F(rho) - F(s))^(1/p),

so ``u(t)`` is the level ``v`` with ``T(v) = t``.  The integrand blows up at
the ends of [0, rho] whenever ``G(s) = F(rho) - F(s)`` vanishes there; both
ends are handled by a change of variables chosen from the exact vanishing
order of G, so that the transformed integrand is bounded and smooth:

* ``G ~ c w^k`` with ``k < p`` (integrable): ``w = omega^(p/(p-k))``.
* ``G ~ c w^k`` with ``k >= p`` (the level is never reached): ``w = exp(-y)``.

Derivatives are never differenced: ``u'`` follows from the conserved
quantity ``(p-1)/p |u'|^p + F(u) = F(rho)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np
from scipy import integrate

from . import _polyalg as pa
from .classification import (
    INCREASING,
    PERIODIC,
    TRIVIAL,
    ProfileEntry,
    special_zero_sets,
)
from .nonlinearity import NonlinearitySpec, eval_F, eval_f, isolate_zeros, MATCH_TOL

__all__ = [
    "DivergenceError",
    "ConsistencyError",
    "Profile",
    "TimeMap",
    "time_of_level",
    "build_profile",
    "profile_values",
    "first_integral_residual",
    "ode_residual",
    "oracle_integrate",
    "write_profile_csv",
    "read_profile_csv",
]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)
_GL_X10, _GL_W10 = np.polynomial.legendre.leggauss(10)


class DivergenceError(ValueError):
    """The requested level is never reached (T diverges)."""


class ConsistencyError(RuntimeError):
    """F(s) >= F(rho) inside the range: the entry is not a valid profile."""


def _gl(fun, a, b, x=_GL_X, w=_GL_W):
    """Gauss-Legendre on each row of the (broadcast) intervals [a, b]."""
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    half = 0.5 * (b - a)
    nodes = a + half * (x + 1.0)
    return np.sum(fun(nodes) * w, axis=-1) * half[..., 0]


class TimeMap:
    """Level <-> time map of one profile, in singularity-free coordinates.

    The level range [0, rho] is split at ``rho/2``.  Below, the coordinate is
    ``s`` itself or ``sigma = s^(1/q0)``; above, it is ``omega = w^(1/q1)`` or
    ``y = -log w`` with ``w = rho - s``.  ``xi`` glues the two into one
    increasing coordinate starting at 0.
    """

    def __init__(self, f: NonlinearitySpec, p: float, rho: float, kind: str,
                 zero_level: bool, order_at_rho: int):
        if not p > 1:
            raise ValueError(f"p must exceed 1, got {p!r}")
        if not 0 < rho <= f.cap:
            raise ValueError(f"rho = {rho!r} outside (0, {f.cap!r}]")
        self.f, self.p, self.rho, self.kind = f, float(p), float(rho), kind
        self.cp = ((p - 1.0) / p) ** (1.0 / p)
        self.zero_level = zero_level
        d = f._cache()
        bps = d["bps_exact"]
        R = Fraction(rho)
        self.F_rho = 0.0 if zero_level else float(f.F_exact(R))

        # vanishing order of G at each end
        self.k0 = 1 if zero_level else 0
        if zero_level and not float(f.exact_pieces[0][0]) < 0:
            raise ConsistencyError("zero-level profile needs f(0) < 0")
        self.k1 = order_at_rho + 1
        self.q0 = p / (p - 1.0) if self.k0 == 1 else 1.0
        self.log_top = self.k1 >= p
        self.q1 = None if self.log_top else p / (p - self.k1)

        # G(s) = s * R0(s) on the first piece (zero-level case)
        a0 = list(f.exact_pieces[0])
        self.R0 = np.array([-float(a / (i + 1)) for i, a in enumerate(a0)])
        self.s0_max = float(bps[1])
        # G(rho - w) = w^k1 * R1(w) on the piece left of rho
        kl = 0
        while kl < f.n_pieces - 1 and R > bps[kl + 1]:
            kl += 1
        tay = pa.taylor_shift(list(f.exact_pieces[kl]), R - bps[kl])
        m = self.k1 - 1
        self.R1 = np.array([float(tay[i]) * (-1) ** i / (i + 1) for i in range(m, len(tay))]
                           or [0.0])
        self.w1_max = float(R - bps[kl])
        if not self.R1[0] > 0:
            raise ConsistencyError(
                f"F(s) >= F(rho) just below rho = {rho!r}: not a valid profile level")

        # coordinate layout
        self.s_mid = 0.5 * self.rho
        self.xi_mid = self._lower_coord(self.s_mid)
        w_mid = self.rho - self.s_mid
        if self.log_top:
            self.top_mid = -math.log(w_mid)
            self.xi_end = math.inf
        else:
            self.top_mid = w_mid ** (1.0 / self.q1)
            self.xi_end = self.xi_mid + self.top_mid
        self._build_table()

    # coordinates ---------------------------------------------------------

    def _lower_coord(self, s):
        return s ** (1.0 / self.q0) if self.k0 == 1 else s

    def xi_of_level(self, v: float) -> float:
        if v <= self.s_mid:
            return float(self._lower_coord(v))
        w = self.rho - v
        if self.log_top:
            if w <= 0:
                return math.inf
            return self.xi_mid + (-math.log(w) - self.top_mid)
        return self.xi_mid + (self.top_mid - w ** (1.0 / self.q1))

    def level_of_xi(self, xi):
        """Return ``(s, w)`` with ``w = rho - s`` kept accurate near the top."""
        xi = np.asarray(xi, dtype=float)
        lower = xi <= self.xi_mid
        s = np.empty_like(xi)
        w = np.empty_like(xi)
        xl = np.where(lower, xi, 0.0)
        s_l = xl ** self.q0 if self.k0 == 1 else xl
        d = np.where(lower, 0.0, xi - self.xi_mid)
        if self.log_top:
            w_u = np.exp(-(self.top_mid + d))
        else:
            om = np.maximum(self.top_mid - d, 0.0)
            w_u = om ** self.q1
        s[:] = np.where(lower, s_l, self.rho - w_u)
        w[:] = np.where(lower, self.rho - s_l, w_u)
        return s, w

    # the gap G = F(rho) - F(s) --------------------------------------------

    def gap(self, s, w):
        s = np.asarray(s, dtype=float)
        w = np.asarray(w, dtype=float)
        use_top = (w <= self.w1_max) & (s >= self.s_mid)
        use_bot = (self.k0 == 1) & (s <= self.s0_max) & ~use_top
        out = np.empty(np.shape(s))
        if np.any(use_top):
            wt = w[use_top]
            out[use_top] = wt ** self.k1 * np.polyval(self.R1[::-1], wt)
        if np.any(use_bot):
            sb = s[use_bot]
            out[use_bot] = sb * np.polyval(self.R0[::-1], sb)
        rest = ~(use_top | use_bot)
        if np.any(rest):
            sr = np.clip(s[rest], 0.0, self.f.cap)
            out[rest] = self.F_rho - eval_F(self.f, sr)
        return out

    def integrand(self, xi):
        """dT/dxi, bounded on every finite xi range."""
        xi = np.asarray(xi, dtype=float)
        s, w = self.level_of_xi(xi)
        p = self.p
        out = np.empty(np.shape(xi))
        lower = xi <= self.xi_mid
        if np.any(lower):
            sl, wl = s[lower], w[lower]
            if self.k0 == 1:
                sig = xi[lower]
                near = sl <= self.s0_max
                val = np.empty(np.shape(sl))
                # G = s R0(s) and ds = q0 sigma^(q0-1) dsigma cancel exactly
                val[near] = self.q0 * np.polyval(self.R0[::-1], sl[near]) ** (-1.0 / p)
                far = ~near
                if np.any(far):
                    val[far] = (self.q0 * sig[far] ** (self.q0 - 1.0)
                                * self.gap(sl[far], wl[far]) ** (-1.0 / p))
            else:
                val = self.gap(sl, wl) ** (-1.0 / p)
            out[lower] = val
        upper = ~lower
        if np.any(upper):
            su, wu = s[upper], w[upper]
            near = wu <= self.w1_max
            val = np.empty(np.shape(su))
            r1 = np.polyval(self.R1[::-1], wu[near])
            if self.log_top:
                val[near] = wu[near] ** (1.0 - self.k1 / p) * r1 ** (-1.0 / p)
                if np.any(~near):
                    val[~near] = wu[~near] * self.gap(su[~near], wu[~near]) ** (-1.0 / p)
            else:
                val[near] = self.q1 * r1 ** (-1.0 / p)
                if np.any(~near):
                    om = wu[~near] ** (1.0 / self.q1)
                    val[~near] = (self.q1 * om ** (self.q1 - 1.0)
                                  * self.gap(su[~near], wu[~near]) ** (-1.0 / p))
            out[upper] = val
        if not np.all(np.isfinite(out)):
            raise ConsistencyError("F(s) >= F(rho) inside (0, rho): not a valid profile")
        return self.cp * out

    # tabulation and inversion ---------------------------------------------

    def _segment_edges(self, xi_hi: float):
        edges = {0.0, self.xi_mid}
        for b in self.f.breakpoints[1:-1]:
            if 0 < b < self.rho:
                edges.add(self.xi_of_level(b))
        if not self.log_top:
            edges.add(self.xi_end)
        edges = sorted(e for e in edges if e <= xi_hi)
        if edges[-1] < xi_hi:
            edges.append(xi_hi)
        return np.array(edges)

    def _adaptive_cells(self, a: np.ndarray, b: np.ndarray, tol=1e-15):
        done_a, done_b, done_v = [], [], []
        for _ in range(40):
            whole = _gl(self.integrand, a, b)
            m = 0.5 * (a + b)
            halves = _gl(self.integrand, a, m) + _gl(self.integrand, m, b)
            ok = np.abs(whole - halves) <= tol * np.maximum(1.0, np.abs(halves))
            done_a.append(a[ok]); done_b.append(b[ok]); done_v.append(halves[ok])
            if np.all(ok):
                break
            a, b = np.concatenate([a[~ok], m[~ok]]), np.concatenate([m[~ok], b[~ok]])
        else:
            raise ConsistencyError("time-of-level quadrature failed to converge")
        a = np.concatenate(done_a); b = np.concatenate(done_b); v = np.concatenate(done_v)
        order = np.argsort(a)
        return a[order], b[order], v[order]

    def _cells_for(self, lo: float, hi: float, per_unit: int = 64):
        edges = self._segment_edges(hi)
        edges = edges[edges >= lo]
        if edges[0] > lo:
            edges = np.concatenate([[lo], edges])
        pieces = []
        for x0, x1 in zip(edges[:-1], edges[1:]):
            n = max(8, int(math.ceil((x1 - x0) * per_unit)))
            n = min(n, 4096)
            pieces.append(np.linspace(x0, x1, n + 1)[:-1])
        starts = np.concatenate(pieces)
        ends = np.concatenate([starts[1:], [edges[-1]]])
        return self._adaptive_cells(starts, ends)

    def _build_table(self):
        if self.log_top:
            hi = self.xi_mid + 8.0
        else:
            hi = self.xi_end
        a, b, v = self._cells_for(0.0, hi)
        self._a, self._b = a, b
        self._T = np.concatenate([[0.0], np.cumsum(v)])

    def _extend_to(self, t: float):
        while self.log_top and self._T[-1] < t:
            lo = self._b[-1]
            span = max(8.0, lo - self.xi_mid)
            a, b, v = self._cells_for(lo, lo + span)
            self._a = np.concatenate([self._a, a])
            self._b = np.concatenate([self._b, b])
            self._T = np.concatenate([self._T, self._T[-1] + np.cumsum(v)])
            if lo + span > self.xi_mid + 745.0:
                # w underflows: the profile has numerically reached rho
                break

    @property
    def top_time(self) -> float:
        """T(rho); infinite when the top level is never reached."""
        return math.inf if self.log_top else float(self._T[-1])

    def xi_of_time(self, t):
        """Coordinate of the level reached at time(s) ``t`` (Newton in table cells)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t < 0):
            raise ValueError("times must be nonnegative")
        tmax = float(np.max(t)) if t.size else 0.0
        self._extend_to(tmax)
        T = self._T
        out = np.empty_like(t)
        capped = t >= T[-1]
        out[capped] = self._b[-1]
        idx = np.clip(np.searchsorted(T, t[~capped], side="right") - 1, 0, len(self._a) - 1)
        lo = self._a[idx].copy()
        hi = self._b[idx].copy()
        tau = t[~capped] - T[idx]
        base = self._a[idx]
        x = lo + tau / self.integrand(lo) if np.all(np.isfinite(lo)) else lo
        x = np.clip(x, lo, hi)
        for _ in range(60):
            resid = _gl(self.integrand, base, x) - tau
            scale = 1e-15 * (1.0 + t[~capped])
            pos = resid > 0
            hi = np.where(pos, np.minimum(hi, x), hi)
            lo = np.where(~pos, np.maximum(lo, x), lo)
            step = resid / self.integrand(x)
            xn = x - step
            bad = (xn <= lo) | (xn >= hi) | ~np.isfinite(xn)
            xn = np.where(bad, 0.5 * (lo + hi), xn)
            conv = (np.abs(resid) <= scale) | (np.abs(xn - x) <= 1e-15 * np.maximum(1.0, np.abs(x)))
            x = xn
            if np.all(conv):
                break
        out[~capped] = x
        return out

    def levels_at(self, t):
        """``(u, w)`` at times ``t`` along the rising branch, with ``w = rho - u``."""
        xi = self.xi_of_time(t)
        s, w = self.level_of_xi(xi)
        if not self.log_top:
            top = np.asarray(t) >= self.top_time
            s = np.where(top, self.rho, s)
            w = np.where(top, 0.0, w)
        return np.clip(s, 0.0, self.rho), np.clip(w, 0.0, self.rho)

    def time_at_level(self, v: float, epsabs: float = 1e-12) -> float:
        """Adaptive quadrature of T(v) in the transformed coordinate."""
        if v < 0 or v > self.rho:
            raise ValueError(f"level {v!r} outside [0, rho = {self.rho!r}]")
        if v == 0:
            return 0.0
        if v == self.rho and self.log_top:
            raise DivergenceError(
                f"T(rho) diverges at rho = {self.rho!r}: the level is approached, never reached")
        x_end = self.xi_of_level(v)
        edges = self._segment_edges(x_end)
        total = 0.0
        for x0, x1 in zip(edges[:-1], edges[1:]):
            if x1 <= x0:
                continue
            val, _ = integrate.quad(lambda x: float(self.integrand(np.array([x]))[0]),
                                    x0, x1, epsabs=epsabs, epsrel=1e-13, limit=400)
            total += val
        return total


def _order_at_rho(f: NonlinearitySpec, rho: float) -> int:
    """Left vanishing order of f at rho (0 when f(rho) != 0)."""
    for zi in isolate_zeros(f):
        tol = MATCH_TOL * max(1.0, abs(rho))
        if zi.enclosure[0] - tol <= rho <= zi.enclosure[1] + tol:
            if zi.order_left is None:
                raise ConsistencyError(f"f vanishes identically left of rho = {rho!r}")
            return zi.order_left
    return 0


def _kind_of(f: NonlinearitySpec, p: float, rho: float) -> Tuple[str, bool]:
    zs = special_zero_sets(f, p)
    tol = 1e-12 * max(1.0, abs(rho))
    if zs.pf is not None and abs(zs.pf - rho) <= tol:
        return PERIODIC, True
    if zs.zf0 is not None and abs(zs.zf0 - rho) <= tol:
        return INCREASING, True
    return INCREASING, False


def time_map(f: NonlinearitySpec, p: float, entry: ProfileEntry) -> TimeMap:
    if entry.kind == TRIVIAL:
        raise ValueError("the trivial entry has no time map")
    zero_level = entry.kind == PERIODIC or entry.slope0 == 0.0
    return TimeMap(f, p, entry.rho, entry.kind, zero_level, _order_at_rho(f, entry.rho))


def time_of_level(f: NonlinearitySpec, p: float, rho, v: float) -> float:
    """Time for the profile saturating (or turning) at ``rho`` to reach level ``v``.

    ``rho`` may be a float or a ``ProfileEntry``.  Raises ``DivergenceError``
    for ``v = rho`` on an increasing profile whose top level is never reached.
    """
    if isinstance(rho, ProfileEntry):
        tm = time_map(f, p, rho)
    else:
        kind, zero_level = _kind_of(f, p, float(rho))
        tm = TimeMap(f, p, float(rho), kind, zero_level, _order_at_rho(f, float(rho)))
    return tm.time_at_level(float(v))


@dataclass(frozen=True)
class Profile:
    entry: ProfileEntry
    t: np.ndarray
    u: np.ndarray
    du: np.ndarray
    max_first_integral_residual: float
    max_ode_residual: float

    def metadata(self) -> dict:
        return {"entry": self.entry.to_dict(), "n": int(self.t.size),
                "t_max": float(self.t[-1]),
                "max_first_integral_residual": self.max_first_integral_residual,
                "max_ode_residual": self.max_ode_residual}


def _slope_from_gap(p: float, G):
    return (p / (p - 1.0) * np.maximum(G, 0.0)) ** (1.0 / p)


def profile_values(f: NonlinearitySpec, p: float, entry: ProfileEntry, t,
                   tm: Optional[TimeMap] = None):
    """``(u, du)`` of a catalog entry at arbitrary times ``t >= 0``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if entry.kind == TRIVIAL:
        return np.zeros_like(t), np.zeros_like(t)
    tm = time_map(f, p, entry) if tm is None else tm
    if entry.kind == PERIODIC:
        ts = tm.top_time
        period = 2.0 * ts
        tau = t - period * np.floor(t / period)
        falling = tau > ts
        tau = np.where(falling, period - tau, tau)
        sign = np.where(falling, -1.0, 1.0)
    else:
        tau = t
        sign = np.ones_like(t)
    u, w = tm.levels_at(tau)
    start = tau == 0
    u = np.where(start, 0.0, u)
    w = np.where(start, tm.rho, w)
    G = tm.gap(u, w)
    du = sign * _slope_from_gap(p, G)
    return u, du


def build_profile(f: NonlinearitySpec, p: float, entry: ProfileEntry,
                  t_max: float, n: int) -> Profile:
    """Sample a catalog entry on ``n`` uniform times in ``[0, t_max]``."""
    if not t_max > 0:
        raise ValueError(f"t_max must be positive, got {t_max!r}")
    if n < 257:
        raise ValueError(f"need n >= 257 samples, got {n}")
    if entry.kind == PERIODIC and not entry.half_period:
        raise ValueError("periodic entry lacks its half period")
    tm = None
    if entry.kind != TRIVIAL:
        tm = time_map(f, p, entry)
        if entry.kind == PERIODIC and abs(tm.top_time - entry.half_period) > 1e-8 * entry.half_period:
            raise ValueError("entry half period does not match (f, p): catalog mismatch")
        if entry.kind == INCREASING and abs(_slope_from_gap(p, tm.gap(0.0, entry.rho)) -
                                            entry.slope0) > 1e-8 * max(1.0, entry.slope0):
            raise ValueError("entry slope does not match (f, p): catalog mismatch")
    t = np.linspace(0.0, float(t_max), int(n))
    u, du = profile_values(f, p, entry, t, tm)
    prof = Profile(entry, t, u, du, 0.0, 0.0)
    return Profile(entry, t, u, du,
                   first_integral_residual(prof, f, p), ode_residual(prof, f, p))


def first_integral_residual(prof: Profile, f: NonlinearitySpec, p: float) -> float:
    """``sup |(p-1)/p |u'|^p + F(u) - F(rho)|`` over the samples."""
    rho = prof.entry.rho
    F_rho = float(eval_F(f, rho)) if rho > 0 else 0.0
    r = (p - 1.0) / p * np.abs(prof.du) ** p + eval_F(f, np.clip(prof.u, 0.0, f.cap)) - F_rho
    return float(np.max(np.abs(r)))


def ode_residual(prof: Profile, f: NonlinearitySpec, p: float) -> float:
    """``sup |(p-1)|u'|^(p-2) u'' + f(u)|`` at interior nodes with ``|u'| > 1e-6``.

    ``u''`` is the centered second difference.
    """
    t, u, du = prof.t, prof.u, prof.du
    if t.size < 3:
        return 0.0
    h = t[1] - t[0]
    upp = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / h**2
    d = du[1:-1]
    mask = np.abs(d) > 1e-6
    if not np.any(mask):
        return 0.0
    r = (p - 1.0) * np.abs(d[mask]) ** (p - 2.0) * upp[mask] + eval_f(f, np.clip(u[1:-1][mask], 0.0, f.cap))
    return float(np.max(np.abs(r)))


# ---------------------------------------------------------------------------
# independent oracle: explicit RK4 on u' = ((p/(p-1)) G(u))^(1/p)


class _OracleRHS:
    """G(u) = int_u^rho f by Gauss-Legendre on f itself (no primitive used)."""

    def __init__(self, f: NonlinearitySpec, p: float, rho: float):
        self.f, self.p, self.rho = f, p, rho
        self.x, self.w = np.polynomial.legendre.leggauss(16)
        # (left edge, right edge, reversed coefficients) of each piece below rho
        self.segs = []
        for k in range(f.n_pieces):
            a, b = float(f.breakpoints[k]), min(float(f.breakpoints[k + 1]), rho)
            if a < b:
                self.segs.append((a, b, np.array(f.pieces[k], dtype=float)[::-1]))

    def gap(self, u: float) -> float:
        total = 0.0
        for a, b, c in self.segs:
            if b <= u:
                continue
            lo = max(a, u)
            half = 0.5 * (b - lo)
            nodes = lo + half * (self.x + 1.0) - a
            total += half * float(np.dot(self.w, np.polyval(c, nodes)))
        return total

    def speed(self, u: float) -> float:
        g = self.gap(min(max(u, 0.0), self.rho))
        return (self.p / (self.p - 1.0) * max(g, 0.0)) ** (1.0 / self.p)


def _rk4_step(rhs: _OracleRHS, u: float, direction: float, h: float) -> float:
    k1 = direction * rhs.speed(u)
    k2 = direction * rhs.speed(u + 0.5 * h * k1)
    k3 = direction * rhs.speed(u + 0.5 * h * k2)
    k4 = direction * rhs.speed(u + h * k3)
    return u + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0


def _rk4_run(rhs: _OracleRHS, u0: float, direction: float, h: float,
             t_stop: float, stop_level: Optional[float], tol: float = 1e-11,
             stop_gap: float = 1e-9):
    """March u' = direction * speed(u) with step-doubling error control.

    With ``stop_level`` set, the march ends once the level is within
    ``stop_gap`` of it; the caller closes the remaining distance analytically.
    Returns times, levels and the arrival time (None if not stopped).
    """
    ts, us = [0.0], [u0]
    t, u = 0.0, u0
    step = h
    arrival = None
    while t < t_stop - 1e-15:
        step = min(step, h, t_stop - t)
        full = _rk4_step(rhs, u, direction, step)
        half = _rk4_step(rhs, _rk4_step(rhs, u, direction, 0.5 * step), direction, 0.5 * step)
        overshoot = stop_level is not None and (stop_level - half) * direction < 0
        if (abs(full - half) > tol or overshoot) and step > 1e-14:
            step *= 0.5
            continue
        t += step
        u = half + (half - full) / 15.0
        if stop_level is not None and (stop_level - u) * direction < 0:
            u = stop_level
        ts.append(t)
        us.append(u)
        if stop_level is not None and abs(stop_level - u) <= stop_gap:
            arrival = t
            break
        if abs(full - half) < tol / 64:
            step *= 2.0
    return np.array(ts), np.array(us), arrival


def _finish_time(rhs: _OracleRHS, level: float, target: float, slope_coef: float) -> float:
    """Remaining time to cover ``|target - level|`` when speed ~ (c |w|)^(1/p)."""
    w = abs(target - level)
    p = rhs.p
    c = (p / (p - 1.0) * abs(slope_coef)) ** (1.0 / p)
    if w <= 0 or c == 0:
        return 0.0
    return w ** (1.0 - 1.0 / p) / (c * (1.0 - 1.0 / p))


def oracle_integrate(f: NonlinearitySpec, p: float, rho: float, kind: str,
                     t_max: float, n: int) -> Profile:
    """Profile from an explicit RK4 march on the first-order ODE.

    Shares no code with the quadrature inversion.  Degenerate starts
    (``u'(0) = 0``) begin at the level of fastest motion and march both ways.
    """
    if n < 257:
        raise ValueError(f"need n >= 257 samples, got {n}")
    if not t_max > 0:
        raise ValueError(f"t_max must be positive, got {t_max!r}")
    rhs = _OracleRHS(f, p, rho)
    grid = np.linspace(0.0, t_max, n)
    h = min(grid[1] - grid[0], 5e-2)
    from scipy.interpolate import CubicHermiteSpline

    def dense(ts, us, sgn):
        dus = np.array([sgn * rhs.speed(x) for x in us])
        return ts, us, dus

    start_speed = rhs.speed(0.0)
    if kind == INCREASING and start_speed > 1e-10:
        ts, us, _ = _rk4_run(rhs, 0.0, 1.0, h, t_max, None)
        ts, us, dus = dense(ts, us, 1.0)
        spline = CubicHermiteSpline(ts, us, dus)
        u = spline(grid)
        du = np.array([rhs.speed(x) for x in u])
        entry = ProfileEntry(INCREASING, rho, start_speed, None)
    else:
        # level of fastest motion
        levels = np.linspace(0.0, rho, 2001)[1:-1]
        gaps = np.array([rhs.gap(x) for x in levels])
        um = float(levels[np.argmax(gaps)])
        f0 = float(eval_f(f, 0.0))
        tb, ub, arr_b = _rk4_run(rhs, um, -1.0, h, 1e6, 0.0)
        t_down = (arr_b if arr_b is not None else tb[-1]) + _finish_time(rhs, ub[-1], 0.0, f0)
        if kind == PERIODIC:
            fr = float(eval_f(f, rho))
            tf, uf, arr_f = _rk4_run(rhs, um, 1.0, h, 1e6, rho)
            t_up = (arr_f if arr_f is not None else tf[-1]) + _finish_time(rhs, uf[-1], rho, fr)
            ts_half = t_down + t_up
            tt = np.concatenate([t_down - tb[::-1], [t_down], t_down + tf[1:], [ts_half]])
            uu = np.concatenate([ub[::-1], [um], uf[1:], [rho]])
            tt[0], uu[0] = 0.0, 0.0
        else:
            tf, uf, _ = _rk4_run(rhs, um, 1.0, h, max(t_max - t_down, h), None)
            tt = np.concatenate([t_down - tb[::-1], t_down + tf[1:]])
            uu = np.concatenate([ub[::-1], uf[1:]])
            tt[0], uu[0] = 0.0, 0.0
            ts_half = None
        keep = np.concatenate([[True], np.diff(tt) > 1e-14])
        tt, uu = tt[keep], uu[keep]
        dus = np.array([rhs.speed(x) for x in uu])
        spline = CubicHermiteSpline(tt, uu, dus)
        if kind == PERIODIC:
            period = 2.0 * ts_half
            tau = grid - period * np.floor(grid / period)
            falling = tau > ts_half
            tau = np.where(falling, period - tau, tau)
            u = spline(np.clip(tau, 0.0, ts_half))
            du = np.where(falling, -1.0, 1.0) * np.array([rhs.speed(x) for x in u])
        else:
            u = spline(np.minimum(grid, tt[-1]))
            du = np.array([rhs.speed(x) for x in u])
        entry = ProfileEntry(kind, rho, 0.0, ts_half)
    u = np.clip(u, 0.0, rho)
    prof = Profile(entry, grid, u, du, 0.0, 0.0)
    return Profile(entry, grid, u, du, first_integral_residual(prof, f, p),
                   ode_residual(prof, f, p))


# ---------------------------------------------------------------------------
# export


def _fmt(x: float) -> str:
    return "%.17g" % x


def write_profile_csv(prof: Profile, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("t,u,du\n")
        for a, b, c in zip(prof.t, prof.u, prof.du):
            fh.write(f"{_fmt(a)},{_fmt(b)},{_fmt(c)}\n")


def read_profile_csv(path) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1], data[:, 2]


def write_profile_metadata(prof: Profile, path) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(prof.metadata(), fh, indent=2, sort_keys=True)
        fh.write("\n")
