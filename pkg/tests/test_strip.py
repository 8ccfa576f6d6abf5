import math

import numpy as np
import pytest

from oracles import tanh_field
from plapsym.nonlinearity import NonlinearitySpec
from plapsym.profile import build_profile
from plapsym.classification import catalog, INCREASING
from plapsym.strip import (
    GridSolution,
    NoProfileError,
    StripEnergy,
    compare_to_profile,
    solve_strip,
    symmetry_deviation,
    write_field_csv,
)

AC = NonlinearitySpec.polynomial([0, 1, 0, -1], 2)


def _field(u, W=8.0, H=12.0):
    nx, ny = u.shape
    return GridSolution(W=W, H=H, nx=nx, ny=ny, u=u, energy=0.0, iterations=0,
                        symmetry_deviation=0.0, profile_mismatch=0.0)


@pytest.fixture(scope="module")
def acceptance_run():
    return solve_strip(AC, 2.0, 1.0, 8.0, 12.0, 65, 129, init="perturbed-profile")


@pytest.fixture(scope="module")
def tanh_profile():
    entry = [e for e in catalog(AC, 2.0) if e.kind == INCREASING][0]
    return build_profile(AC, 2.0, entry, 12.0, 1025)


def test_symmetry_deviation_examples():
    y = np.linspace(0, 1, 40)
    assert symmetry_deviation(_field(np.tile(y, (36, 1)))) == 0.0
    h, delta = 0.1, 0.0375
    i, j = np.meshgrid(np.arange(36), np.arange(40), indexing="ij")
    assert symmetry_deviation(_field(j * h + delta * (i % 2))) == pytest.approx(delta, abs=1e-15)


def test_compare_to_profile_examples(tanh_profile):
    tab = np.tile(np.interp(np.linspace(0, 12, 129), tanh_profile.t, tanh_profile.u), (65, 1))
    assert compare_to_profile(_field(tab), tanh_profile) <= 1e-6
    zero = compare_to_profile(_field(np.zeros((65, 129))), tanh_profile)
    assert zero == pytest.approx(math.tanh(12 / math.sqrt(2)), abs=1e-6)
    with pytest.raises(ValueError):
        compare_to_profile(_field(np.zeros((65, 129)), H=20.0), tanh_profile)


def test_acceptance_run(acceptance_run):
    sol = acceptance_run
    assert sol.symmetry_deviation <= 1e-4
    assert sol.profile_mismatch <= 1e-3
    assert np.all(np.diff(sol.u, axis=1) >= -1e-10)
    assert np.all(sol.u[:, 0] == 0.0) and np.all(sol.u[:, -1] == sol.top_value)
    assert np.all((sol.u >= 0) & (sol.u <= 1.0))
    assert np.all(np.diff(sol.trace) <= 64 * np.finfo(float).eps * (1 + abs(sol.energy)))


def test_zero_start_reaches_same_basin(acceptance_run):
    sol = solve_strip(AC, 2.0, 1.0, 8.0, 12.0, 65, 129, init="zero")
    assert np.max(np.abs(sol.u - acceptance_run.u)) <= 1e-3


def test_exact_front_is_nearly_stationary():
    # the decrease scales like hy^4; at hy = 12/512 it is about 2e-9
    nx, ny = 33, 513
    u0 = tanh_field(8.0, 12.0, nx, ny)
    sol = solve_strip(AC, 2.0, 1.0, 8.0, 12.0, nx, ny, init=u0)
    assert sol.trace[0] - sol.trace[1] <= 1e-8


def test_shift_equivariance():
    a = solve_strip(AC, 2.0, 1.0, 8.0, 12.0, 33, 65, init="perturbed-profile")
    b = solve_strip(AC, 2.0, 1.0, 8.0, 12.0, 33, 65, init="perturbed-profile", shift=1)
    assert np.max(np.abs(np.roll(a.u, 1, axis=0) - b.u)) <= 1e-10


def test_taller_strip_saturates_toward_rho():
    gaps = []
    for H in (4.0, 8.0):
        sol = solve_strip(AC, 2.0, 1.0, 4.0, H, 33, 65, init="perturbed-profile")
        gaps.append(1.0 - float(np.max(sol.u[:, -2])))
    assert gaps[1] < gaps[0]


def test_random_start_is_deterministic():
    a = solve_strip(AC, 2.0, 1.0, 4.0, 6.0, 33, 49, init="random", seed=7)
    b = solve_strip(AC, 2.0, 1.0, 4.0, 6.0, 33, 49, init="random", seed=7)
    assert np.array_equal(a.u, b.u)
    assert a.symmetry_deviation <= 1e-4


def test_gradient_matches_finite_differences():
    E = StripEnergy(AC, 2.5, 4.0, 3.0, 8, 6, 0.9)
    rng = np.random.default_rng(3)
    v = rng.uniform(0.1, 0.9, E.free_idx.size)
    g = E.grad(v)
    for k in rng.choice(v.size, 6, replace=False):
        e = np.zeros_like(v)
        e[k] = 1e-6
        fd = (E.energy(v + e) - E.energy(v - e)) / 2e-6
        assert g[k] == pytest.approx(fd, rel=1e-5, abs=1e-9)


def test_refusals():
    with pytest.raises(NoProfileError):
        solve_strip(NonlinearitySpec.polynomial([-1, 1], 3), 2.0, None, 8, 12, 33, 33)
    with pytest.raises(ValueError):
        solve_strip(AC, 2.0, 1.0, 8, 12, 32, 65)
    with pytest.raises(ValueError):
        solve_strip(AC, 1.0, 1.0, 8, 12, 33, 65)


def test_field_csv(tmp_path, acceptance_run):
    path = tmp_path / "field.csv"
    write_field_csv(acceptance_run, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "i,j,x,y,u"
    assert len(lines) == 1 + 65 * 129
    i, j, x, y, u = lines[1 + 129 + 5].split(",")
    assert (int(i), int(j)) == (1, 5)
    assert float(u) == acceptance_run.u[1, 5]
