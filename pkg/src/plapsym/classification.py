"""Which bounded nonnegative solutions of the 1-D problem exist for (p, f).

Solutions of ``-(|u'|^{p-2} u')' = f(u)`` on (0, inf) with ``u(0) = 0`` come
in three kinds: the trivial one, increasing profiles that saturate at a zero
``rho`` of f whose primitive strictly dominates ``F`` below it, and (only when
``f(0) < 0``) a single periodic profile oscillating between 0 and the first
positive level where ``F`` returns to zero with ``f > 0``.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

from . import _polyalg as pa
from .nonlinearity import (
    NonlinearitySpec,
    ZeroContinuumError,
    ZeroInfo,
    ROOT_WIDTH,
    MATCH_TOL,
    check_smp,
    eval_F,
    isolate_zeros,
)

__all__ = [
    "TRIVIAL",
    "INCREASING",
    "PERIODIC",
    "OUTSIDE_HYPOTHESES",
    "ZeroSetReport",
    "ProfileEntry",
    "Classification",
    "special_zero_sets",
    "boundary_slope",
    "half_period",
    "catalog",
    "classify",
]

TRIVIAL = "Trivial"
INCREASING = "Increasing"
PERIODIC = "Periodic"
OUTSIDE_HYPOTHESES = "outside-hypotheses"


@dataclass(frozen=True)
class ZeroSetReport:
    zf: List[ZeroInfo]
    zf_star: List[float]
    zf0: Optional[float]
    pf: Optional[float]
    smp_all: bool
    smp: List[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "zf": [{"z": zi.z, "order_right": zi.order_right, "lead_right": zi.lead_right,
                    "order_left": zi.order_left, "lead_left": zi.lead_left,
                    "isolated": zi.isolated, "exact": zi.exact,
                    "enclosure": list(zi.enclosure)} for zi in self.zf],
            "zf_star": list(self.zf_star),
            "zf0": self.zf0,
            "pf": self.pf,
            "smp_all": self.smp_all,
            "smp": self.smp,
        }


@dataclass(frozen=True)
class ProfileEntry:
    kind: str
    rho: float
    slope0: float
    half_period: Optional[float] = None

    def to_dict(self) -> dict:
        return {"kind": self.kind, "rho": self.rho, "slope0": self.slope0,
                "half_period": self.half_period}


@dataclass(frozen=True)
class Classification:
    p: float
    zero_sets: ZeroSetReport
    entries: List[ProfileEntry]
    flags: List[str]

    def to_dict(self) -> dict:
        return {"p": self.p, "flags": list(self.flags),
                "zero_sets": self.zero_sets.to_dict(),
                "catalog": [e.to_dict() for e in self.entries]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _left_sign(zi: ZeroInfo) -> int:
    """Sign of f just left of the zero."""
    if zi.order_left is None:
        return 0
    s = zi.lead_left * (-1) ** zi.order_left
    return (s > 0) - (s < 0)


def _dominates(f: NonlinearitySpec, zeros: List[ZeroInfo], z: ZeroInfo) -> bool:
    """``F(t) < F(z)`` for every t in [0, z); ties fail."""
    level = f.F_exact(z.z)
    if not level > 0:
        return False
    if _left_sign(z) <= 0:
        return False
    # interior maxima of F sit at zeros of f
    return all(f.F_exact(y.z) < level for y in zeros if 0 < y.z < z.z)


def _first_positive_root_of_F(f: NonlinearitySpec):
    """First t > 0 with F(t) = 0, as (location, f-vanishes-there) or None."""
    d = f._cache()
    bps = d["bps_exact"]
    for k, P in enumerate(d["F_pieces_exact"]):
        if k > 0 and (not P or P[0] == 0):
            return bps[k], f.exact_pieces[k][0] == 0
        if not P:
            continue
        h = bps[k + 1] - bps[k]
        best = None
        for g, mult in pa.sqf_list(P):
            roots = pa.isolate(g, 0, h)
            if not roots:
                continue
            r = roots[0]
            if isinstance(r, Fraction):
                loc = r
            else:
                exact = pa.small_rational_root(g, *r)
                loc = exact if exact is not None else pa.refine(g, r[0], r[1], ROOT_WIDTH)
                if not isinstance(loc, Fraction):
                    loc = (loc[0] + loc[1]) / 2
            if best is None or loc < best[0]:
                best = (loc, mult >= 2)
        if best is not None:
            return bps[k] + best[0], best[1]
    last = d["F_pieces_exact"][-1]
    if pa.peval(last, bps[-1] - bps[-2]) == 0:
        x = bps[-1]
        return x, f.f_exact(x) == 0
    return None


def special_zero_sets(f: NonlinearitySpec, p: float) -> ZeroSetReport:
    """Z_f, its dominating subset, the zero-level zero and the periodic level.

    Raises ``ZeroContinuumError`` when f vanishes on an interval.
    """
    if not p > 1:
        raise ValueError(f"p must exceed 1, got {p!r}")
    zeros = isolate_zeros(f)
    for zi in zeros:
        if not zi.isolated:
            raise ZeroContinuumError(
                f"f vanishes identically on [{zi.z!r}, {zi.upper!r}]; classification refused")

    smp = []
    for zi in zeros:
        v = check_smp(f, p, zi)
        smp.append({"z": zi.z, **v})
    smp_all = all(v["holds_right"] and v["holds_left"] for v in smp)

    star = [zi.z for zi in zeros if zi.z > 0 and _dominates(f, zeros, zi)]

    zf0 = pf = None
    if f.f_exact(0) < 0:
        hit = _first_positive_root_of_F(f)
        if hit is not None:
            loc, f_vanishes = hit
            if f_vanishes:
                zi = _match(zeros, float(loc))
                zf0 = zi.z if zi is not None else float(loc)
            else:
                pf = float(loc)
    if zf0 is not None and zf0 not in star:
        star.append(zf0)
    star.sort()
    return ZeroSetReport(zf=zeros, zf_star=star, zf0=zf0, pf=pf, smp_all=smp_all, smp=smp)


def _match(zeros: List[ZeroInfo], x: float) -> Optional[ZeroInfo]:
    for zi in zeros:
        tol = MATCH_TOL * max(1.0, abs(x))
        if zi.enclosure[0] - tol <= x <= zi.enclosure[1] + tol:
            return zi
    return None


def boundary_slope(f: NonlinearitySpec, p: float, rho: float) -> float:
    """``u'(0) = ((p/(p-1)) F(rho))^(1/p)`` for the increasing profile at rho."""
    F_rho = eval_F(f, rho)
    if F_rho < 0:
        raise ValueError(f"F(rho) = {F_rho!r} < 0 at rho = {rho!r}: no admissible increasing profile")
    return (p / (p - 1) * F_rho) ** (1.0 / p)


def half_period(f: NonlinearitySpec, p: float, rho: float) -> float:
    """Rise time from 0 to rho of the periodic profile."""
    zs = special_zero_sets(f, p)
    if zs.pf is None or abs(zs.pf - rho) > 1e-9 * max(1.0, abs(rho)):
        raise ValueError(f"rho = {rho!r} is not the periodic level (P_f = {zs.pf!r})")
    from .profile import time_of_level
    entry = ProfileEntry(PERIODIC, zs.pf, 0.0, None)
    return time_of_level(f, p, entry, zs.pf)


def _entries(f: NonlinearitySpec, p: float, zs: ZeroSetReport) -> List[ProfileEntry]:
    out = [ProfileEntry(TRIVIAL, 0.0, 0.0, None)]
    for rho in zs.zf_star:
        slope = 0.0 if rho == zs.zf0 else boundary_slope(f, p, rho)
        out.append(ProfileEntry(INCREASING, rho, slope, None))
    if zs.pf is not None:
        from .profile import time_of_level
        probe = ProfileEntry(PERIODIC, zs.pf, 0.0, None)
        out.append(ProfileEntry(PERIODIC, zs.pf, 0.0, time_of_level(f, p, probe, zs.pf)))
    return out


def catalog(f: NonlinearitySpec, p: float) -> List[ProfileEntry]:
    """Every solution u != 0 of the 1-D problem, plus the trivial one.

    Order: Trivial, Increasing by ascending rho, Periodic.  Warns when the
    one-sided growth condition fails at some zero of f.
    """
    return classify(f, p).entries


def classify(f: NonlinearitySpec, p: float) -> Classification:
    zs = special_zero_sets(f, p)
    flags = []
    if not zs.smp_all:
        flags.append(OUTSIDE_HYPOTHESES)
        bad = [s["z"] for s in zs.smp if not (s["holds_right"] and s["holds_left"])]
        warnings.warn(f"growth condition fails at zeros {bad}; catalog is {OUTSIDE_HYPOTHESES}",
                      stacklevel=2)
    return Classification(p=p, zero_sets=zs, entries=_entries(f, p, zs), flags=flags)
