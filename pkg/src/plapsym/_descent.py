"""Box-constrained projected Newton descent with Armijo backtracking.

Shared by the ball and strip solvers.  The caller supplies the energy, its
gradient and a sparse positive semidefinite Hessian model; the model need
not be the true Hessian (the p-energy is only C^1 at zero gradient for
p < 2), since every step is accepted only if it lowers the energy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
from scipy.sparse import csc_matrix, diags
from scipy.sparse.linalg import splu


class NonConvergenceError(RuntimeError):
    """Descent hit its iteration cap; carries the last iterate and energy trace."""

    def __init__(self, msg: str, x: np.ndarray, trace: List[float]):
        super().__init__(msg)
        self.x = x
        self.trace = trace


@dataclass
class DescentResult:
    x: np.ndarray
    energy: float
    iterations: int
    trace: List[float] = field(default_factory=list)


def _newton_direction(H, g, free):
    d = np.zeros_like(g)
    if not np.any(free):
        return d
    Hf = csc_matrix(H[free][:, free])
    try:
        d[free] = -splu(Hf).solve(g[free])
    except RuntimeError:
        d[free] = np.nan
    return d


def projected_newton(fun: Callable, grad: Callable, hess: Callable, x0: np.ndarray,
                     lo: float, hi: float, project: Optional[Callable] = None,
                     max_iter: int = 500, rtol: float = 1e-12, polish: int = 8,
                     armijo: float = 1e-4) -> DescentResult:
    """Minimize ``fun`` over the box ``[lo, hi]^n``.

    Stops when the energy decrease of a step falls below
    ``rtol * (1 + |E|)``, then takes up to ``polish`` full Newton steps
    while the projected gradient keeps shrinking.  Polish steps may raise
    the energy by rounding noise (64 ulp of ``1 + |E|``) and no more.  ``project`` maps a clipped point back onto any
    extra constraint set (it must preserve the box).
    """

    def proj(x):
        x = np.clip(x, lo, hi)
        return project(x) if project is not None else x

    def pgrad(x, g):
        # projected gradient: zero where a bound blocks descent
        tight = 1e-14 * max(1.0, abs(hi - lo))
        active = ((x <= lo + tight) & (g > 0)) | ((x >= hi - tight) & (g < 0))
        return active, np.where(active, 0.0, g)

    x = proj(np.asarray(x0, dtype=float).copy())
    E = fun(x)
    trace = [E]
    converged = False
    for it in range(1, max_iter + 1):
        g = grad(x)
        active, pg = pgrad(x, g)
        H = hess(x)
        d = _newton_direction(H, g, ~active)
        if not np.all(np.isfinite(d)) or np.dot(g, d) >= 0:
            diag = np.asarray(H.diagonal()).copy()
            diag = np.where(diag > 0, diag, 1.0)
            d = np.where(active, 0.0, -g / diag)
        step = 1.0
        accepted = False
        while step > 1e-20:
            xn = proj(x + step * d)
            En = fun(xn)
            if En <= E + armijo * np.dot(g, xn - x):
                accepted = True
                break
            step *= 0.5
        if not accepted or En > E:
            converged = True
            break
        dec = E - En
        x, E = xn, En
        trace.append(E)
        if dec < rtol * (1.0 + abs(E)):
            converged = True
            break
    if converged:
        x, E = _polish(fun, grad, hess, x, E, proj, pgrad, polish, trace)
    if not converged:
        raise NonConvergenceError(
            f"descent did not converge in {max_iter} steps (last energy {E!r})", x, trace)
    return DescentResult(x=x, energy=E, iterations=len(trace) - 1, trace=trace)


def _polish(fun, grad, hess, x, E, proj, pgrad, steps, trace):
    """Full Newton steps kept while the projected gradient keeps shrinking.

    Past the energy plateau a field error e changes the energy by O(e^2),
    which drowns in rounding long before e reaches 1e-10; the gradient
    still resolves it.
    """
    slack = 64 * np.finfo(float).eps * (1.0 + abs(E))
    g = grad(x)
    active, pg = pgrad(x, g)
    gn = float(np.max(np.abs(pg), initial=0.0))
    for _ in range(steps):
        if gn == 0.0:
            break
        d = _newton_direction(hess(x), g, ~active)
        if not np.all(np.isfinite(d)):
            break
        xn = proj(x + d)
        En = fun(xn)
        gnew = grad(xn)
        an, pn = pgrad(xn, gnew)
        gnn = float(np.max(np.abs(pn), initial=0.0))
        if En > E + slack or not gnn < gn:
            break
        x, E, g, active, gn = xn, En, gnew, an, gnn
        trace.append(E)
    return x, E


def tridiag(lower: np.ndarray, main: np.ndarray, upper: np.ndarray):
    return diags([lower, main, upper], [-1, 0, 1], format="csc")
