"""Piecewise-polynomial nonlinearities and the hypothesis checks on them.

A nonlinearity ``f`` lives on ``[0, M]``.  Piece ``k`` is a polynomial in
the shifted variable ``t - b_k`` valid on ``[b_k, b_{k+1}]``.  Continuity is
exact: the constant coefficient of piece ``k + 1`` is *defined* as the exact
rational value of piece ``k`` at ``b_{k+1}``.  Supplied constant terms are
only checked against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import _polyalg as pa

__all__ = [
    "DomainError",
    "ZeroContinuumError",
    "NonlinearitySpec",
    "ZeroInfo",
    "Verdict",
    "HypothesisReport",
    "eval_f",
    "eval_F",
    "isolate_zeros",
    "check_smp",
    "check_no_zero_left_of",
    "check_thm13",
    "leading_order_at_zero",
    "HOLDS",
    "FAILS",
    "NOT_APPLICABLE",
]

HOLDS = "holds"
FAILS = "fails"
NOT_APPLICABLE = "not-applicable"

# absolute enclosure width used for irrational zeros
ROOT_WIDTH = Fraction(1, 2**50)
# tolerance used when a caller hands us a float that should be a zero of f
MATCH_TOL = 1e-12


class DomainError(ValueError):
    """Argument outside the analysis window [0, M]."""


class ZeroContinuumError(ValueError):
    """f vanishes identically on a subinterval; classification refuses it."""


@dataclass(frozen=True)
class NonlinearitySpec:
    breakpoints: Tuple[float, ...]
    pieces: Tuple[Tuple[float, ...], ...]
    cap: float
    exact_pieces: Tuple[Tuple[Fraction, ...], ...] = field(repr=False, compare=False,
                                                           default=())

    def __post_init__(self):
        bps = tuple(float(b) for b in self.breakpoints)
        if len(bps) < 2:
            raise ValueError("need at least two breakpoints (K >= 1 pieces)")
        if bps[0] != 0.0:
            raise ValueError(f"first breakpoint must be 0, got {bps[0]!r}")
        if any(not math.isfinite(b) for b in bps):
            raise ValueError("breakpoints must be finite")
        if any(b1 <= b0 for b0, b1 in zip(bps, bps[1:])):
            raise ValueError(f"breakpoints must be strictly ascending: {bps}")
        cap = float(self.cap)
        if not cap > 0:
            raise ValueError(f"cap M must be positive, got {cap!r}")
        if bps[-1] != cap:
            raise ValueError(f"last breakpoint {bps[-1]!r} must equal cap {cap!r}")
        if len(self.pieces) != len(bps) - 1:
            raise ValueError(f"{len(bps) - 1} intervals but {len(self.pieces)} pieces")

        exact = []
        for k, raw in enumerate(self.pieces):
            if len(raw) == 0:
                raw = (0.0,)
            coeffs = [Fraction(float(a)) for a in raw]
            if k > 0:
                h = Fraction(bps[k]) - Fraction(bps[k - 1])
                left_val = pa.peval(exact[k - 1], h)
                scale = 1.0 + sum(abs(float(a)) for a in coeffs) \
                    + sum(abs(float(a)) for a in exact[k - 1])
                if abs(float(left_val) - float(coeffs[0])) > 1e-9 * scale:
                    raise ValueError(
                        f"pieces {k - 1} and {k} disagree at breakpoint {bps[k]!r}: "
                        f"{float(left_val)!r} vs {float(coeffs[0])!r}")
                coeffs[0] = left_val
            exact.append(coeffs)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "cap", cap)
        object.__setattr__(self, "exact_pieces", tuple(tuple(c) for c in exact))
        object.__setattr__(self, "pieces",
                           tuple(tuple(float(a) for a in c) for c in exact))
        object.__setattr__(self, "_derived", _derive(self))

    # constructors ---------------------------------------------------------

    @classmethod
    def polynomial(cls, coeffs: Sequence[float], cap: float) -> "NonlinearitySpec":
        """Single polynomial piece ``sum coeffs[i] t**i`` on ``[0, cap]``."""
        return cls((0.0, cap), (tuple(coeffs),), cap)

    @classmethod
    def from_dict(cls, doc: dict) -> "NonlinearitySpec":
        def num(x):
            return float(x)
        try:
            bps = [num(b) for b in doc["breakpoints"]]
            pieces = [[num(a) for a in piece] for piece in doc["pieces"]]
            cap = num(doc.get("cap", bps[-1]))
        except KeyError as exc:
            raise ValueError(f"nonlinearity document lacks field {exc.args[0]!r}") from None
        return cls(tuple(bps), tuple(tuple(p) for p in pieces), cap)

    def to_dict(self) -> dict:
        return {"breakpoints": list(self.breakpoints),
                "pieces": [list(p) for p in self.pieces],
                "cap": self.cap}

    # cached derived data --------------------------------------------------

    @property
    def n_pieces(self) -> int:
        return len(self.pieces)

    def _cache(self) -> dict:
        return self.__dict__["_derived"]

    def piece_index(self, t):
        """Index of the piece used to evaluate at ``t`` (right piece at breakpoints)."""
        bps = np.asarray(self.breakpoints)
        k = np.searchsorted(bps, t, side="right") - 1
        return np.clip(k, 0, self.n_pieces - 1)

    def scale_hint(self) -> float:
        return max(1.0, max(abs(a) for p in self.pieces for a in p))

    def F_exact(self, t) -> Fraction:
        """Exact primitive at a rational (or float) point."""
        t = Fraction(t)
        if t < 0 or t > Fraction(self.cap):
            raise DomainError(f"t={float(t)!r} outside [0, {self.cap!r}]")
        d = self._cache()
        k = int(self.piece_index(float(t)))
        # float rounding in piece_index can be off by one at exact breakpoints
        bps = d["bps_exact"]
        while k > 0 and t < bps[k]:
            k -= 1
        while k < self.n_pieces - 1 and t > bps[k + 1]:
            k += 1
        return pa.peval(d["F_pieces_exact"][k], t - bps[k])

    def f_exact(self, t) -> Fraction:
        t = Fraction(t)
        if t < 0 or t > Fraction(self.cap):
            raise DomainError(f"t={float(t)!r} outside [0, {self.cap!r}]")
        d = self._cache()
        bps = d["bps_exact"]
        k = int(self.piece_index(float(t)))
        while k > 0 and t < bps[k]:
            k -= 1
        while k < self.n_pieces - 1 and t >= bps[k + 1]:
            k += 1
        return pa.peval(self.exact_pieces[k], t - bps[k])

    def scaled(self, lam: float) -> "NonlinearitySpec":
        """``lam * f`` on the same window."""
        return NonlinearitySpec(self.breakpoints,
                                tuple(tuple(lam * a for a in p) for p in self.pieces),
                                self.cap)


def _derive(f: NonlinearitySpec) -> dict:
    bps_exact = [Fraction(b) for b in f.breakpoints]
    F_pieces = []
    acc = Fraction(0)
    for k, c in enumerate(f.exact_pieces):
        P = pa.integ(list(c), acc)
        F_pieces.append(P)
        acc = pa.peval(P, bps_exact[k + 1] - bps_exact[k])
    deg = max(len(c) for c in f.exact_pieces)
    fmat = np.zeros((f.n_pieces, deg))
    dfmat = np.zeros((f.n_pieces, max(deg - 1, 1)))
    Fmat = np.zeros((f.n_pieces, deg + 1))
    for k, c in enumerate(f.exact_pieces):
        fmat[k, :len(c)] = pa.to_floats(c)
        dc = pa.deriv(list(c))
        dfmat[k, :len(dc)] = pa.to_floats(dc)
        Fmat[k, :len(F_pieces[k])] = pa.to_floats(F_pieces[k])
    return {"bps_exact": bps_exact, "F_pieces_exact": F_pieces,
            "fmat": fmat, "dfmat": dfmat, "Fmat": Fmat,
            "bps": np.asarray(f.breakpoints)}


def _horner(mat: np.ndarray, k, s):
    acc = np.zeros(np.shape(s))
    for j in range(mat.shape[1] - 1, -1, -1):
        acc = acc * s + mat[k, j]
    return acc


def _check_domain(f: NonlinearitySpec, t):
    t_arr = np.asarray(t, dtype=float)
    bad = (t_arr < 0) | (t_arr > f.cap) | ~np.isfinite(t_arr)
    if np.any(bad):
        first = t_arr[bad].flat[0] if t_arr.ndim else t_arr
        raise DomainError(f"t={float(first)!r} outside [0, {f.cap!r}]")
    return t_arr


def _piecewise(f: NonlinearitySpec, t, key: str):
    t_arr = _check_domain(f, t)
    d = f._cache()
    k = f.piece_index(t_arr)
    out = _horner(d[key], k, t_arr - d["bps"][k])
    return float(out) if np.ndim(out) == 0 else out


def eval_f(f: NonlinearitySpec, t):
    """Evaluate ``f`` (Horner per piece); accepts scalars or arrays."""
    return _piecewise(f, t, "fmat")


def eval_df(f: NonlinearitySpec, t):
    """Right derivative of ``f`` (one-sided at breakpoints)."""
    return _piecewise(f, t, "dfmat")


def eval_F(f: NonlinearitySpec, t):
    """Primitive ``F(t) = int_0^t f`` with ``F(0) = 0``."""
    return _piecewise(f, t, "Fmat")


# ---------------------------------------------------------------------------
# zeros


@dataclass(frozen=True)
class ZeroInfo:
    """A zero of f with one-sided leading-order data.

    ``f(t) ~ lead_right * (t - z)**order_right`` as t -> z+ and
    ``f(t) ~ lead_left * (t - z)**order_left`` as t -> z-.  A side is ``None``
    at a window endpoint, or when f vanishes identically there (order
    infinite).  Zero continua set ``isolated=False`` and ``upper`` to the
    right end of the interval on which f vanishes.
    """

    z: float
    order_right: Optional[int]
    lead_right: Optional[float]
    order_left: Optional[int]
    lead_left: Optional[float]
    isolated: bool = True
    upper: Optional[float] = None
    enclosure: Tuple[float, float] = (0.0, 0.0)
    exact: bool = True

    @property
    def hi(self) -> float:
        return self.z if self.upper is None else self.upper


def _leading(c: Sequence[Fraction], start: int = 0):
    for i in range(start, len(c)):
        if c[i] != 0:
            return i, c[i]
    return None, None


def _float_down(x: Fraction) -> float:
    v = float(x)
    return v if Fraction(v) <= x else math.nextafter(v, -math.inf)


def _float_up(x: Fraction) -> float:
    v = float(x)
    return v if Fraction(v) >= x else math.nextafter(v, math.inf)


def _taylor_at(c: Sequence[Fraction], x) -> List[Fraction]:
    return pa.taylor_shift(list(c), x)


def isolate_zeros(f: NonlinearitySpec) -> List[ZeroInfo]:
    """All zeros of ``f`` in ``[0, M]``, ascending, each exactly once."""
    d = f._cache()
    bps = d["bps_exact"]
    K = f.n_pieces
    pieces = [list(c) for c in f.exact_pieces]
    raw: List[tuple] = []  # (location Fraction | bracket, piece index, kind)

    for k in range(K):
        c = pa.strip(pieces[k])
        h = bps[k + 1] - bps[k]
        if not c:
            raw.append(("continuum", k))
            continue
        # breakpoint value at the left end of this piece
        if c[0] == 0:
            raw.append(("point", bps[k], k))
        for g, mult in pa.sqf_list(c):
            for r in pa.isolate(g, 0, h):
                if isinstance(r, Fraction):
                    raw.append(("point", bps[k] + r, k))
                    continue
                a, b = r
                exact = pa.small_rational_root(g, a, b)
                if exact is not None:
                    raw.append(("point", bps[k] + exact, k))
                    continue
                ref = pa.refine(g, a, b, ROOT_WIDTH)
                if isinstance(ref, Fraction):
                    raw.append(("point", bps[k] + ref, k))
                else:
                    raw.append(("bracket", (bps[k] + ref[0], bps[k] + ref[1]), k, mult))
    # zero at the cap
    last = pieces[-1]
    if pa.strip(last) and pa.peval(last, bps[-1] - bps[-2]) == 0:
        raw.append(("point", bps[-1], K))

    def locate(x: Fraction) -> int:
        k = 0
        while k < K - 1 and x >= bps[k + 1]:
            k += 1
        return k

    out: List[ZeroInfo] = []
    # merge continua with adjacent continua and their endpoint zeros
    spans: List[Tuple[Fraction, Fraction]] = []
    for item in raw:
        if item[0] == "continuum":
            k = item[1]
            lo, hi = bps[k], bps[k + 1]
            if spans and spans[-1][1] == lo:
                spans[-1] = (spans[-1][0], hi)
            else:
                spans.append((lo, hi))
    for lo, hi in spans:
        out.append(ZeroInfo(z=float(lo), order_right=None, lead_right=0.0,
                            order_left=None, lead_left=None, isolated=False,
                            upper=float(hi), enclosure=(float(lo), float(hi))))

    def in_span(x: Fraction) -> bool:
        return any(lo <= x <= hi for lo, hi in spans)

    seen = set()
    for item in raw:
        if item[0] == "continuum":
            continue
        if item[0] == "point":
            x = item[1]
            if x in seen or in_span(x):
                continue
            seen.add(x)
            out.append(_point_zero(f, x, (float(x), float(x)), exact=True))
        else:
            a, b = item[1]
            mid = (a + b) / 2
            out.append(_point_zero(f, mid, (_float_down(a), _float_up(b)), exact=False,
                                   mult=item[3]))
    out.sort(key=lambda zi: zi.z)
    return out


def _side_data(coeffs: Sequence[Fraction]):
    """Order and float lead coefficient of a Taylor expansion, ignoring c0."""
    c = pa.strip(coeffs)
    if not c:
        return None, 0.0
    m, lead = _leading(c, 1)
    return m, float(lead)


def _point_zero(f: NonlinearitySpec, x: Fraction, enc, exact: bool,
                mult: int = 1) -> ZeroInfo:
    d = f._cache()
    bps = d["bps_exact"]
    K = f.n_pieces
    # piece to the right / left of x
    right_k = None
    left_k = None
    for k in range(K):
        if bps[k] <= x < bps[k + 1]:
            right_k = k
        if bps[k] < x <= bps[k + 1]:
            left_k = k
    order_r = lead_r = order_l = lead_l = None
    if right_k is not None:
        tay = _taylor_at(f.exact_pieces[right_k], x - bps[right_k])
        tay = [Fraction(0)] + list(tay[1:])
        order_r, lead_r = _side_data(tay)
    if left_k is not None:
        tay = _taylor_at(f.exact_pieces[left_k], x - bps[left_k])
        tay = [Fraction(0)] + list(tay[1:])
        order_l, lead_l = _side_data(tay)
    if not exact:
        # at an enclosure midpoint the low-order Taylor terms are tiny rather
        # than zero; the order is the square-free multiplicity instead
        k = right_k if right_k is not None else left_k
        tay = _taylor_at(f.exact_pieces[k], x - bps[k])
        lead = float(tay[mult]) if mult < len(tay) else 0.0
        order_r = order_l = mult
        lead_r = lead_l = lead
        if right_k is None:
            order_r = lead_r = None
        if left_k is None:
            order_l = lead_l = None
    return ZeroInfo(z=float(x), order_right=order_r, lead_right=lead_r,
                    order_left=order_l, lead_left=lead_l, isolated=True,
                    upper=None, enclosure=enc, exact=exact)


def _find_zero(f: NonlinearitySpec, z: float, zeros=None) -> ZeroInfo:
    zeros = isolate_zeros(f) if zeros is None else zeros
    for zi in zeros:
        lo = zi.enclosure[0] - MATCH_TOL * max(1.0, abs(zi.z))
        hi = max(zi.enclosure[1], zi.hi) + MATCH_TOL * max(1.0, abs(zi.z))
        if lo <= z <= hi:
            return zi
    raise ValueError(f"{z!r} is not a zero of f in [0, {f.cap!r}]")


# ---------------------------------------------------------------------------
# hypothesis checks


def check_smp(f: NonlinearitySpec, p: float, z: ZeroInfo) -> Dict[str, bool]:
    """Leading-order decision rule for the one-sided growth condition at a zero.

    Right side: ``liminf f(t)/(t-z)^(p-1) > -inf`` iff ``m+ >= p-1`` or ``c+ > 0``.
    Left side: ``limsup f(t)/(z-t)^(p-1) < +inf`` iff ``m- >= p-1`` or
    ``c- (-1)^m- < 0``.  Sides at window endpoints count as holding.
    """
    if not p > 1:
        raise ValueError(f"p must exceed 1, got {p!r}")
    if not z.isolated:
        raise ZeroContinuumError(
            f"zero continuum [{z.z!r}, {z.upper!r}]: no one-sided order to test")
    if z.order_right is None:
        right = True
    else:
        right = z.order_right >= p - 1 or z.lead_right > 0
    if z.order_left is None:
        left = True
    else:
        left = z.order_left >= p - 1 or z.lead_left * (-1) ** z.order_left < 0
    return {"holds_right": bool(right), "holds_left": bool(left)}


def check_no_zero_left_of(f: NonlinearitySpec, rho: float) -> Dict[str, object]:
    zeros = isolate_zeros(f)
    target = _find_zero(f, rho, zeros)
    if not target.isolated:
        return {"holds": False, "epsilon": 0.0}
    below = [zi for zi in zeros if zi.hi < target.z]
    if not below:
        return {"holds": True, "epsilon": float(target.z)}
    nearest = max(below, key=lambda zi: zi.hi)
    return {"holds": True, "epsilon": float(target.z - nearest.hi)}


@dataclass(frozen=True)
class Verdict:
    status: str
    witness: str = ""

    def to_dict(self) -> dict:
        return {"status": self.status, "witness": self.witness}


@dataclass(frozen=True)
class HypothesisReport:
    verdicts: Dict[str, Verdict]
    gamma: Optional[float]
    leading_order_at_zero: Tuple[int, float]
    rho: Optional[float] = None

    def to_dict(self) -> dict:
        return {"verdicts": {k: v.to_dict() for k, v in sorted(self.verdicts.items())},
                "gamma": self.gamma,
                "leading_order_at_zero": {"order": self.leading_order_at_zero[0],
                                          "coefficient": self.leading_order_at_zero[1]},
                "rho": self.rho}


def leading_order_at_zero(f: NonlinearitySpec) -> Tuple[int, float]:
    """``(m, c)`` with ``f(t) ~ c t^m`` as t -> 0+; ``(-1, 0.0)`` if f == 0 near 0."""
    c = pa.strip(f.exact_pieces[0])
    m, lead = _leading(c)
    if m is None:
        return -1, 0.0
    return m, float(lead)


def _sign_between(f: NonlinearitySpec, a: float, b: float) -> int:
    v = eval_f(f, 0.5 * (a + b))
    return (v > 0) - (v < 0)


def check_thm13(f: NonlinearitySpec, p: float, N: int) -> HypothesisReport:
    """Hypotheses of the half-space rigidity result for ``-Delta_p u = f(u)``."""
    if not p > 1:
        raise ValueError(f"p must exceed 1, got {p!r}")
    if N < 2:
        raise ValueError(f"N must be at least 2, got {N!r}")
    verdicts: Dict[str, Verdict] = {}
    zeros = isolate_zeros(f)
    m0, c0 = leading_order_at_zero(f)

    gamma = None
    if N > p + 1:
        gamma = (p - 1) * (N - 1) / (N - p - 1)
        dim = N * (p - 2) + 2
        verdicts["dimension"] = Verdict(HOLDS if dim >= 0 else FAILS,
                                        f"N(p-2)+2 = {dim:g}")
    else:
        verdicts["dimension"] = Verdict(NOT_APPLICABLE, f"N = {N} <= p+1 = {p + 1:g}")

    # sign pattern
    continua = [zi for zi in zeros if not zi.isolated]
    positive = [zi for zi in zeros if zi.z > 0 or not zi.isolated]
    rho = None
    if continua:
        zi = continua[0]
        verdicts["sign_pattern"] = Verdict(
            FAILS, f"f vanishes on [{zi.z:.17g}, {zi.upper:.17g}]")
    elif not positive:
        verdicts["sign_pattern"] = Verdict(FAILS, "f has no positive zero in the window")
    else:
        rho = positive[0].z
        pts = [0.0] + [zi.z for zi in zeros if zi.z > 0] + [f.cap]
        bad = None
        for a, b in zip(pts, pts[1:]):
            if b <= a:
                continue
            s = _sign_between(f, a, b)
            want = 1 if b <= rho else -1
            if s != want:
                bad = (a, b, s)
                break
        if bad is None:
            verdicts["sign_pattern"] = Verdict(HOLDS, f"rho = {rho:.17g}")
        else:
            a, b, s = bad
            verdicts["sign_pattern"] = Verdict(
                FAILS, f"f has sign {s:+d} on ({a:.17g}, {b:.17g}); rho = {rho:.17g}")

    # one-sided growth at rho
    if rho is None:
        verdicts["smp_at_rho"] = Verdict(NOT_APPLICABLE, "no positive zero")
    else:
        sm = check_smp(f, p, positive[0])
        ok = sm["holds_right"] and sm["holds_left"]
        verdicts["smp_at_rho"] = Verdict(
            HOLDS if ok else FAILS,
            f"right={sm['holds_right']}, left={sm['holds_left']} at rho = {rho:.17g}")

    # growth at zero
    if m0 < 0:
        verdicts["growth_at_zero"] = Verdict(FAILS, "f vanishes identically near 0")
    elif c0 <= 0:
        verdicts["growth_at_zero"] = Verdict(FAILS, f"f ~ {c0:g} t^{m0} with c <= 0")
    elif gamma is None:
        verdicts["growth_at_zero"] = Verdict(
            HOLDS, f"f ~ {c0:g} t^{m0}; any gamma >= max(1, {m0}) works")
    elif m0 <= gamma:
        verdicts["growth_at_zero"] = Verdict(HOLDS, f"m = {m0} <= gamma = {gamma:.17g}")
    else:
        verdicts["growth_at_zero"] = Verdict(FAILS, f"m = {m0} > gamma = {gamma:.17g}")

    # extra condition for p >= 2
    if p < 2:
        verdicts["p_ge_2_limit"] = Verdict(NOT_APPLICABLE, f"p = {p:g} < 2")
    elif m0 < 0:
        verdicts["p_ge_2_limit"] = Verdict(HOLDS, "f == 0 near 0: limit is 0")
    elif m0 > p - 1:
        verdicts["p_ge_2_limit"] = Verdict(HOLDS, f"m = {m0} > p-1: limit is 0")
    elif c0 > 0:
        branch = "+inf" if m0 < p - 1 else f"{c0:g}"
        verdicts["p_ge_2_limit"] = Verdict(HOLDS, f"liminf = {branch} > 0")
    else:
        verdicts["p_ge_2_limit"] = Verdict(FAILS, f"m = {m0} <= p-1 with c = {c0:g} <= 0")

    return HypothesisReport(verdicts=verdicts, gamma=gamma,
                            leading_order_at_zero=(m0, c0), rho=rho)
