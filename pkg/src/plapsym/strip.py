"""Two-dimensional strip solves for the half-space problem.

The half plane {y > 0} is truncated to the periodic strip
[0, W) x [0, H] with u = 0 at the bottom and u equal to the catalog profile
value u_rho(H) at the top.  The discrete energy

    sum_cells (1/p) |grad_h u|^p hx hy  -  sum_nodes F(u) hx hy

is minimized over nodal fields in [0, rho].  A converged field that does
not depend on x and matches u_rho(y) is consistent with one-dimensional
symmetry; it says nothing about other domains or grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np
from scipy.sparse import coo_matrix

from ._descent import NonConvergenceError, projected_newton
from .classification import INCREASING, ProfileEntry, catalog
from .nonlinearity import NonlinearitySpec, eval_F, eval_df, eval_f
from .profile import Profile, build_profile, profile_values

__all__ = [
    "GridSolution",
    "NonConvergenceError",
    "NoProfileError",
    "StripEnergy",
    "solve_strip",
    "symmetry_deviation",
    "compare_to_profile",
    "write_field_csv",
]

GRAD_FLOOR = 1e-12
INITS = ("perturbed-profile", "random", "zero")


class NoProfileError(ValueError):
    """The catalog for (f, p) has no increasing entry at the requested level."""


@dataclass(frozen=True)
class GridSolution:
    W: float
    H: float
    nx: int
    ny: int
    u: np.ndarray  # shape (nx, ny), u[i, j] at x = i*hx, y = j*hy
    energy: float
    iterations: int
    symmetry_deviation: float
    profile_mismatch: float
    p: float = 2.0
    rho: float = 1.0
    top_value: float = 0.0
    init: str = ""
    trace: List[float] = field(default_factory=list)

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.nx) * (self.W / self.nx)

    @property
    def y(self) -> np.ndarray:
        return np.linspace(0.0, self.H, self.ny)

    def summary(self) -> dict:
        return {"W": self.W, "H": self.H, "nx": self.nx, "ny": self.ny, "p": self.p,
                "rho": self.rho, "top_value": self.top_value, "init": self.init,
                "energy": self.energy, "iterations": self.iterations,
                "symmetry_deviation": self.symmetry_deviation,
                "profile_mismatch": self.profile_mismatch,
                "top_truncation_gap": self.rho - self.top_value}


class StripEnergy:
    """Discrete strip energy over the interior rows, flattened row-major in (i, j)."""

    def __init__(self, f: NonlinearitySpec, p: float, W: float, H: float,
                 nx: int, ny: int, top: float):
        self.f, self.p = f, float(p)
        self.nx, self.ny = int(nx), int(ny)
        self.hx, self.hy = W / nx, H / (ny - 1)
        self.top = float(top)
        self.area = self.hx * self.hy
        # cell corners: (i, j), (i+1, j), (i, j+1), (i+1, j+1), periodic in i
        i = np.arange(nx)
        j = np.arange(ny - 1)
        I, Jc = np.meshgrid(i, j, indexing="ij")
        ip = (I + 1) % nx
        self.corner = np.stack([I * ny + Jc, ip * ny + Jc, I * ny + Jc + 1, ip * ny + Jc + 1],
                               axis=-1).reshape(-1, 4)
        # four edge differences per cell, each a row over the 4 corners
        D = np.array([[-1, 1, 0, 0], [0, 0, -1, 1], [-1, 0, 1, 0], [0, -1, 0, 1]], dtype=float)
        scale = np.array([1 / self.hx, 1 / self.hx, 1 / self.hy, 1 / self.hy])
        self.D = D * scale[:, None]
        self.c = np.full(4, 0.5)
        self.M = (self.D.T * self.c) @ self.D  # q = g^T M g
        self.free = np.ones((nx, ny), dtype=bool)
        self.free[:, 0] = False
        self.free[:, -1] = False
        self.free_idx = np.flatnonzero(self.free.ravel())
        self.pos = -np.ones(nx * ny, dtype=int)
        self.pos[self.free_idx] = np.arange(self.free_idx.size)
        tw = np.ones(ny)
        tw[0] = tw[-1] = 0.5
        self.node_w = np.tile(tw, nx) * self.area

    def full(self, v: np.ndarray) -> np.ndarray:
        u = np.zeros(self.nx * self.ny)
        u[self.free_idx] = v
        u.reshape(self.nx, self.ny)[:, -1] = self.top
        return u

    def _q(self, u):
        g = u[self.corner]
        Mg = g @ self.M
        return g, Mg, np.maximum(np.einsum("ck,ck->c", g, Mg), 0.0)

    def energy(self, v):
        u = self.full(v)
        _, _, q = self._q(u)
        return float(np.sum(self.area / self.p * q ** (self.p / 2.0))
                     - np.sum(self.node_w * eval_F(self.f, u)))

    def grad(self, v):
        u = self.full(v)
        g, Mg, q = self._q(u)
        with np.errstate(divide="ignore"):
            coef = np.where(q > 0, q ** (self.p / 2.0 - 1.0), 0.0)
        contrib = self.area * coef[:, None] * Mg
        out = np.bincount(self.corner.ravel(), weights=contrib.ravel(), minlength=u.size)
        out -= self.node_w * eval_f(self.f, u)
        return out[self.free_idx]

    def hess(self, v):
        u = self.full(v)
        g, Mg, q = self._q(u)
        qf = np.maximum(q, GRAD_FLOOR ** 2)
        a = self.area * qf ** (self.p / 2.0 - 1.0)
        b = self.area * (self.p - 2.0) * qf ** (self.p / 2.0 - 2.0)
        # per-cell 4x4 blocks: a M + b (M g)(M g)^T
        blocks = a[:, None, None] * self.M[None] + b[:, None, None] * Mg[:, :, None] * Mg[:, None, :]
        rows = np.repeat(self.corner, 4, axis=1).ravel()
        cols = np.tile(self.corner, (1, 4)).ravel()
        vals = blocks.reshape(-1)
        pr, pc = self.pos[rows], self.pos[cols]
        keep = (pr >= 0) & (pc >= 0)
        n = self.free_idx.size
        H = coo_matrix((vals[keep], (pr[keep], pc[keep])), shape=(n, n)).tocsc()
        pot = -self.node_w * eval_df(self.f, u)
        H = H + coo_matrix((np.maximum(pot[self.free_idx], 0.0), (np.arange(n), np.arange(n))),
                           shape=(n, n)).tocsc()
        return H


def _increasing_entry(f: NonlinearitySpec, p: float, rho: Optional[float]) -> ProfileEntry:
    entries = [e for e in catalog(f, p) if e.kind == INCREASING]
    if rho is not None:
        entries = [e for e in entries if abs(e.rho - rho) <= 1e-12 * max(1.0, abs(rho))]
    if not entries:
        raise NoProfileError(f"no increasing catalog entry for p = {p!r} at rho = {rho!r}")
    return entries[-1]


def initial_field(kind: str, x: np.ndarray, y: np.ndarray, W: float, H: float, rho: float,
                  top: float, profile_u: Optional[np.ndarray] = None,
                  seed: Optional[int] = None, amplitude: float = 0.1,
                  shift: int = 0) -> np.ndarray:
    """Starting field of shape (nx, ny); ``shift`` rotates the perturbation by whole cells."""
    X, Y = np.meshgrid(x, y, indexing="ij")
    if kind == "perturbed-profile":
        if profile_u is None:
            raise ValueError("perturbed-profile start needs the profile samples")
        pert = amplitude * np.sin(2 * math.pi * X / W) * np.sin(math.pi * Y / H)
        u = profile_u[None, :] + np.roll(pert, shift, axis=0)
    elif kind == "random":
        rng = np.random.default_rng(seed)
        u = rng.uniform(0.0, rho, size=X.shape)
    elif kind == "zero":
        u = np.zeros_like(X)
    else:
        raise ValueError(f"unknown init {kind!r}; expected one of {INITS}")
    u = np.clip(u, 0.0, rho)
    u[:, 0] = 0.0
    u[:, -1] = top
    return u


def solve_strip(f: NonlinearitySpec, p: float, rho: Optional[float], W: float, H: float,
                nx: int, ny: int, init: Union[str, np.ndarray] = "perturbed-profile",
                seed: Optional[int] = None, max_iter: int = 500, shift: int = 0) -> GridSolution:
    """Minimize the strip energy with u = 0 below and u = u_rho(H) on top.

    ``init`` is one of ``perturbed-profile``, ``random`` (uses ``seed``),
    ``zero``, or an explicit (nx, ny) array.
    """
    if not p > 1:
        raise ValueError(f"p must exceed 1, got {p!r}")
    if nx < 33 or ny < 33:
        raise ValueError(f"need nx, ny >= 33, got {nx} x {ny}")
    if not (W > 0 and H > 0):
        raise ValueError(f"strip sides must be positive, got W = {W!r}, H = {H!r}")
    entry = _increasing_entry(f, p, rho)
    rho = entry.rho
    if rho > f.cap:
        raise ValueError(f"rho = {rho!r} exceeds the analysis cap {f.cap!r}")
    refine = max(1, math.ceil(256 / (ny - 1)))
    prof = build_profile(f, p, entry, H, (ny - 1) * refine + 1)
    prof_rows = prof.u[::refine]
    top = float(prof_rows[-1])
    x = np.arange(nx) * (W / nx)
    y = np.linspace(0.0, H, ny)
    if isinstance(init, str):
        u0 = initial_field(init, x, y, W, H, rho, top, prof_rows, seed, shift=shift)
        label = init if init != "random" else f"random({seed})"
    else:
        u0 = np.array(init, dtype=float)
        if u0.shape != (nx, ny):
            raise ValueError(f"init array has shape {u0.shape}, expected {(nx, ny)}")
        label = "array"
    E = StripEnergy(f, p, W, H, nx, ny, top)
    res = projected_newton(E.energy, E.grad, E.hess, u0.ravel()[E.free_idx], 0.0, rho,
                           max_iter=max_iter)
    u = E.full(res.x).reshape(nx, ny)
    sol = GridSolution(W=float(W), H=float(H), nx=int(nx), ny=int(ny), u=u, energy=res.energy,
                       iterations=res.iterations, symmetry_deviation=0.0, profile_mismatch=0.0,
                       p=float(p), rho=rho, top_value=top, init=label, trace=res.trace)
    return GridSolution(**{**sol.__dict__, "symmetry_deviation": symmetry_deviation(sol),
                           "profile_mismatch": compare_to_profile(sol, prof)})


def symmetry_deviation(sol) -> float:
    """Largest lateral oscillation ``max_j (max_i u - min_i u)``."""
    u = sol.u if hasattr(sol, "u") else np.asarray(sol)
    return float(np.max(np.max(u, axis=0) - np.min(u, axis=0)))


def compare_to_profile(sol: GridSolution, prof: Profile) -> float:
    """``sup |u(i, j) - u_rho(y_j)|`` with the profile interpolated linearly."""
    if prof.t[0] > 0 or prof.t[-1] < sol.H * (1 - 1e-12):
        raise ValueError(f"profile covers [{prof.t[0]!r}, {prof.t[-1]!r}], strip needs [0, {sol.H!r}]")
    ref = np.interp(sol.y, prof.t, prof.u)
    return float(np.max(np.abs(sol.u - ref[None, :])))


def write_field_csv(sol: GridSolution, path) -> None:
    x, y = sol.x, sol.y
    with open(path, "w", newline="\n") as fh:
        fh.write("i,j,x,y,u\n")
        for i in range(sol.nx):
            for j in range(sol.ny):
                fh.write(f"{i},{j},{x[i]:.17g},{y[j]:.17g},{sol.u[i, j]:.17g}\n")
