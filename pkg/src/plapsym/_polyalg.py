"""Exact univariate polynomial arithmetic over the rationals.

Coefficient lists are in ascending degree and hold ``fractions.Fraction``
values.  Trailing zeros are stripped, so the zero polynomial is ``[]``.
Everything here is exact; floats only appear when a caller converts a
result for reporting.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple, Union

Poly = List[Fraction]
Root = Union[Fraction, Tuple[Fraction, Fraction]]


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float) and not math.isfinite(x):
        raise ValueError(f"non-finite coefficient {x!r}")
    return Fraction(x)


def strip(c: Iterable) -> Poly:
    out = [frac(a) for a in c]
    while out and out[-1] == 0:
        out.pop()
    return out


def degree(c: Sequence[Fraction]) -> int:
    return len(c) - 1


def peval(c: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for a in reversed(c):
        acc = acc * x + a
    return acc


def sign_at(c: Sequence[Fraction], x: Fraction) -> int:
    v = peval(c, x)
    return (v > 0) - (v < 0)


def add(a: Sequence[Fraction], b: Sequence[Fraction]) -> Poly:
    n = max(len(a), len(b))
    return strip((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                 for i in range(n))


def scale(c: Sequence[Fraction], k) -> Poly:
    k = frac(k)
    return strip(a * k for a in c)


def mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> Poly:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return strip(out)


def deriv(c: Sequence[Fraction]) -> Poly:
    return strip(i * c[i] for i in range(1, len(c)))


def integ(c: Sequence[Fraction], const=0) -> Poly:
    return strip([frac(const)] + [c[i] / (i + 1) for i in range(len(c))])


def taylor_shift(c: Sequence[Fraction], a) -> Poly:
    """Coefficients of ``c(x + a)``."""
    a = frac(a)
    out = list(c)
    n = len(out)
    if a == 0:
        return strip(out)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            out[j] += a * out[j + 1]
    return strip(out)


def compose_affine(c: Sequence[Fraction], a, b) -> Poly:
    """Coefficients of ``c(a + b x)``."""
    b = frac(b)
    shifted = taylor_shift(c, a)
    pw = Fraction(1)
    out = []
    for coef in shifted:
        out.append(coef * pw)
        pw *= b
    return strip(out)


def divmod_(a: Sequence[Fraction], b: Sequence[Fraction]) -> Tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(rem) >= len(b) and rem:
        k = len(rem) - len(b)
        coef = rem[-1] / lead
        q[k] = coef
        for i, bi in enumerate(b):
            rem[i + k] -= coef * bi
        rem = strip(rem)
    return strip(q), rem


def monic(c: Sequence[Fraction]) -> Poly:
    if not c:
        return []
    lead = c[-1]
    return [a / lead for a in c]


def gcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> Poly:
    a, b = strip(a), strip(b)
    while b:
        _, r = divmod_(a, b)
        a, b = b, r
    return monic(a)


def sqf_list(c: Sequence[Fraction]) -> List[Tuple[Poly, int]]:
    """Yun's square-free decomposition ``c = lc * prod(g_i ** i)``.

    Only factors of positive degree are returned.
    """
    c = strip(c)
    if len(c) <= 1:
        return []
    out = []
    dc = deriv(c)
    a = gcd(c, dc)
    b = divmod_(c, a)[0]
    cc = divmod_(dc, a)[0]
    d = add(cc, scale(deriv(b), -1))
    i = 1
    while len(b) > 1:
        a = gcd(b, d)
        if len(a) > 1:
            out.append((monic(a), i))
        b = divmod_(b, a)[0]
        cc = divmod_(d, a)[0]
        d = add(cc, scale(deriv(b), -1))
        i += 1
    return out


def _variations(c: Sequence[Fraction]) -> int:
    signs = [a > 0 for a in c if a != 0]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def _descartes_01(c: Sequence[Fraction]) -> int:
    """Sign-variation bound for the roots of ``c`` inside (0, 1)."""
    # roots of c in (0,1) <-> positive roots of (1+y)^n c(1/(1+y))
    rev = list(reversed(c))
    return _variations(taylor_shift(rev, 1))


def isolate(c: Sequence[Fraction], lo, hi) -> List[Root]:
    """Isolate the roots of a square-free ``c`` in the open interval (lo, hi).

    Returns exact roots as ``Fraction`` and the rest as disjoint open
    brackets ``(a, b)`` with a sign change and exactly one root each, in
    ascending order.
    """
    c = strip(c)
    lo, hi = frac(lo), frac(hi)
    if len(c) <= 1 or lo >= hi:
        return []
    found: List[Root] = []
    stack = [(lo, hi)]
    while stack:
        a, b = stack.pop()
        local = compose_affine(c, a, b - a)
        v = _descartes_01(local)
        if v == 0:
            continue
        if v == 1:
            found.append((a, b))
            continue
        m = (a + b) / 2
        if peval(c, m) == 0:
            found.append(m)
        stack.append((m, b))
        stack.append((a, m))
    found.sort(key=lambda r: r if isinstance(r, Fraction) else r[0])
    return found


def refine(c: Sequence[Fraction], a: Fraction, b: Fraction, width) -> Root:
    """Bisect a sign-change bracket down to ``b - a <= width``.

    May return an exact root if a midpoint lands on it.
    """
    width = frac(width)
    sa = sign_at(c, a)
    sb = sign_at(c, b)
    # an open bracket may end on a neighbouring root; shrink it by root count
    while sa == 0 or sb == 0:
        m = (a + b) / 2
        if peval(c, m) == 0:
            return m
        if _descartes_01(compose_affine(c, a, m - a)) == 1:
            b = m
        else:
            a = m
        sa, sb = sign_at(c, a), sign_at(c, b)
    if sa == sb:
        raise ValueError("bracket does not contain a sign change")
    while b - a > width:
        m = (a + b) / 2
        sm = sign_at(c, m)
        if sm == 0:
            return m
        if sm == sa:
            a = m
        else:
            b = m
    return a, b


def small_rational_root(c: Sequence[Fraction], a: Fraction, b: Fraction,
                        max_den: int = 10**6):
    """Return a low-height rational root inside the open isolating bracket (a, b), if any.

    The bracket is first narrowed by bisection so that the best rational
    approximation of bounded denominator inside it is a meaningful candidate.
    """
    a, b = frac(a), frac(b)
    narrow = refine(c, a, b, Fraction(1, 2**64))
    if isinstance(narrow, Fraction):
        return narrow
    a, b = narrow
    mid = (a + b) / 2
    for cand in (mid.limit_denominator(max_den), Fraction(round(float(mid), 12))):
        if a <= cand <= b and peval(c, cand) == 0:
            return cand
    return None


def to_floats(c: Sequence[Fraction]) -> List[float]:
    return [float(a) for a in c]
