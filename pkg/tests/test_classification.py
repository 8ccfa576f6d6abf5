import json
import math
import warnings

import numpy as np
import pytest

from plapsym.classification import (
    INCREASING,
    OUTSIDE_HYPOTHESES,
    PERIODIC,
    TRIVIAL,
    boundary_slope,
    catalog,
    classify,
    half_period,
    special_zero_sets,
)
from plapsym.nonlinearity import NonlinearitySpec, ZeroContinuumError, eval_F

P = NonlinearitySpec.polynomial


def test_periodic_case_sets():
    zs = special_zero_sets(P([-1, 1], 3), 2)
    assert zs.zf_star == [] and zs.zf0 is None and zs.pf == 2.0


def test_heteroclinic_case_sets():
    zs = special_zero_sets(P([0, 1, 0, -1], 2), 2)
    assert zs.zf_star == [1.0] and zs.zf0 is None and zs.pf is None


def test_no_zeros():
    zs = special_zero_sets(P([-1.0], 1), 2)
    assert zs.zf == [] and zs.zf_star == [] and zs.zf0 is None and zs.pf is None


def test_zero_level_case():
    # f = (t-1)(1-3t): F = -t (t-1)^2 vanishes at 1 together with f
    zs = special_zero_sets(P([-1, 4, -3], 2), 2)
    assert zs.zf0 == 1.0 and zs.pf is None and zs.zf_star == [1.0]
    entries = catalog(P([-1, 4, -3], 2), 2)
    assert [e.kind for e in entries] == [TRIVIAL, INCREASING]
    assert entries[1].slope0 == 0.0


def test_tie_is_excluded():
    # f = -4(t-1/2)(t-1)(t-3/2): F has equal local maxima at 1/2 and 3/2
    zs = special_zero_sets(P([3, -11, 12, -4], 2), 2)
    assert zs.zf_star == [0.5]
    # F(1) = F(0) = 0 for f = F' with F = t^2 (1-t)^2: level 0 never dominates
    zs = special_zero_sets(P([0, 2, -6, 4], 1.5), 2)
    assert zs.zf_star == [0.5]


def test_boundary_slope_examples():
    assert boundary_slope(P([0, 1, 0, -1], 2), 2, 1.0) == pytest.approx(2**-0.5, abs=1e-15)
    assert boundary_slope(P([0, 1, -1], 2), 2, 1.0) == pytest.approx(math.sqrt(1 / 3), abs=1e-15)
    assert boundary_slope(P([-1, 4, -3], 2), 2, 1.0) == 0.0
    with pytest.raises(ValueError):
        boundary_slope(P([-1, 1], 3), 2, 1.0)


def test_half_period_examples():
    assert half_period(P([-1, 1], 3), 2, 2.0) == pytest.approx(math.pi, abs=1e-8)
    assert half_period(P([-4, 4], 3), 2, 2.0) == pytest.approx(math.pi / 2, abs=1e-8)
    with pytest.raises(ValueError):
        half_period(P([-1, 1], 3), 2, 1.5)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_doubling_f_scales_half_period(p):
    t1 = half_period(P([-1, 1], 3), p, 2.0)
    t2 = half_period(P([-2, 2], 3), p, 2.0)
    assert t2 == pytest.approx(t1 * 2 ** (-1 / p), rel=1e-10)


def test_catalog_examples():
    entries = catalog(P([0, 1, 0, -1], 2), 2)
    assert [e.kind for e in entries] == [TRIVIAL, INCREASING]
    assert entries[1].rho == 1.0 and entries[1].slope0 == pytest.approx(0.70710678, abs=1e-8)
    entries = catalog(P([-1, 1], 3), 2)
    assert [e.kind for e in entries] == [TRIVIAL, PERIODIC]
    assert entries[1].half_period == pytest.approx(math.pi, abs=1e-8)
    assert [e.kind for e in catalog(P([1, 1], 2), 2)] == [TRIVIAL]


def test_outside_hypotheses_flag():
    with pytest.warns(UserWarning):
        cls = classify(P([0, 1, -1], 2), 3)
    assert OUTSIDE_HYPOTHESES in cls.flags
    assert [e.kind for e in cls.entries] == [TRIVIAL, INCREASING]


def test_continuum_refused():
    f = NonlinearitySpec((0.0, 1.0, 2.0), ((0.0, 1.0, -1.0), (0.0,)), 2.0)
    with pytest.raises(ZeroContinuumError):
        special_zero_sets(f, 2)


def test_report_json_is_deterministic():
    a = classify(P([-1, 1], 3), 2).to_json()
    b = classify(P([-1, 1], 3), 2).to_json()
    assert a == b
    doc = json.loads(a)
    assert doc["zero_sets"]["pf"] == 2.0


def test_increasing_entries_dominate():
    f = NonlinearitySpec((0.0, 1.0, 2.5), ((0.0, 2.0, -2.0), (0.0, -1.0, 1.0)), 2.5)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        entries = catalog(f, 2)
    for e in entries:
        if e.kind == INCREASING:
            t = np.linspace(0, e.rho, 201)[:-1]
            assert np.all(eval_F(f, t) < eval_F(f, e.rho))


@pytest.mark.parametrize("lam", [0.5, 2.0, 3.0])
@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_state_rescaling(lam, p):
    base_inc = catalog(P([0, 1, 0, -1], 2), p)[1]
    scaled_inc = catalog(P(list(np.array([0, 1, 0, -1]) * lam**p), 2), p)[1]
    assert scaled_inc.slope0 == pytest.approx(lam * base_inc.slope0, rel=1e-12)
    base_per = catalog(P([-1, 1], 3), p)[1]
    scaled_per = catalog(P([-lam**p, lam**p], 3), p)[1]
    assert scaled_per.half_period == pytest.approx(base_per.half_period / lam, rel=1e-9)
