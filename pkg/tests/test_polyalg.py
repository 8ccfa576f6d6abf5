from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings, strategies as st

from plapsym import _polyalg as pa


def test_taylor_shift_and_compose():
    c = pa.strip([1, 2, 3])  # 1 + 2x + 3x^2
    assert pa.taylor_shift(c, 1) == [6, 8, 3]
    assert pa.compose_affine(c, 1, 2) == [6, 16, 12]


def test_divmod_and_gcd():
    a = pa.mul(pa.strip([-1, 1]), pa.strip([-2, 1]))
    q, r = pa.divmod_(a, pa.strip([-1, 1]))
    assert q == [-2, 1] and r == []
    assert pa.gcd(a, pa.strip([-1, 1])) == [-1, 1]


def test_sqf_list_multiplicities():
    # (x-1)^3 (x+2)
    c = pa.mul(pa.mul(pa.mul(pa.strip([-1, 1]), pa.strip([-1, 1])), pa.strip([-1, 1])),
               pa.strip([2, 1]))
    out = dict((tuple(g), m) for g, m in pa.sqf_list(c))
    assert out == {(Fr(-1), Fr(1)): 3, (Fr(2), Fr(1)): 1}


def test_isolate_sqrt2():
    roots = pa.isolate(pa.strip([-2, 0, 1]), 0, 2)
    assert len(roots) == 1
    a, b = pa.refine(pa.strip([-2, 0, 1]), *roots[0], Fr(1, 2**50))
    assert float(a) <= 2**0.5 <= float(b)
    assert b - a <= Fr(1, 2**50)


def test_refine_bracket_ending_on_neighbour_root():
    # roots at 0 and 0.999 share the bracket (0, 1)
    c = pa.strip([0, Fr(-999, 1000), Fr(1999, 1000), -1])
    g = pa.divmod_(c, pa.strip([0, 1]))[0]
    res = pa.refine(g, Fr(0), Fr(1), Fr(1, 2**50))
    lo = res if isinstance(res, Fr) else res[0]
    assert abs(float(lo) - 0.999) < 1e-12


def test_small_rational_root_found():
    c = pa.strip([Fr(-1, 3), 1])
    assert pa.small_rational_root(c, Fr(0), Fr(1)) == Fr(1, 3)
    assert pa.small_rational_root(pa.strip([-2, 0, 1]), Fr(1), Fr(2)) is None


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=1, max_size=5))
def test_isolate_finds_every_integer_root(roots):
    c = [Fr(1)]
    for r in roots:
        c = pa.mul(c, pa.strip([-r, 1]))
    found = []
    for g, _ in pa.sqf_list(c):
        for item in pa.isolate(g, -7, 7):
            if isinstance(item, Fr):
                found.append(item)
            else:
                found.append(pa.small_rational_root(g, *item))
    assert sorted(found) == sorted(set(Fr(r) for r in roots))
