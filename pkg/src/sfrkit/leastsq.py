"""Small damped Gauss-Newton (Levenberg-Marquardt) solver.

Both fits in this package are two-parameter problems with analytic Jacobians
and box bounds, so a dependency-free solver is enough. Bounds are enforced by
clipping the iterate after each step. The iteration schedule is fixed and has
no randomized restarts, so identical inputs give bitwise-identical results.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["FitResult", "levenberg_marquardt"]

_LAMBDA0 = 1e-3       # initial damping
_LAMBDA_FACTOR = 10.0  # multiplied on rejection, divided on acceptance
_LAMBDA_MIN = 1e-12
_MAX_REJECTS = 50      # damping escalations per outer iteration


@dataclass(frozen=True)
class FitResult:
    params: np.ndarray
    cost: float        # sum of squared residuals at params
    iterations: int
    converged: bool


def levenberg_marquardt(model_jac, y, x0, lower, upper, max_iter=200, rel_tol=1e-10):
    """Minimize ||model(x) - y||^2 subject to lower <= x <= upper.

    model_jac(x) must return (model values, Jacobian) with the Jacobian shaped
    (len(y), len(x)). Convergence: relative cost decrease below rel_tol, or an
    exactly-zero cost. Exhausting max_iter reports converged=False.
    """
    y = np.asarray(y, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    x = np.clip(np.asarray(x0, dtype=float), lower, upper)

    m, jac = model_jac(x)
    r = m - y
    cost = float(r @ r)
    lam = _LAMBDA0
    eye = np.eye(len(x))

    for it in range(1, max_iter + 1):
        if cost == 0.0:
            return FitResult(params=x, cost=cost, iterations=it - 1, converged=True)
        jtj = jac.T @ jac
        g = jac.T @ r
        accepted = False
        for _ in range(_MAX_REJECTS):
            try:
                dx = np.linalg.solve(jtj + lam * eye, -g)
            except np.linalg.LinAlgError:
                lam *= _LAMBDA_FACTOR
                continue
            x_try = np.clip(x + dx, lower, upper)
            m_try, jac_try = model_jac(x_try)
            r_try = m_try - y
            cost_try = float(r_try @ r_try)
            if cost_try <= cost:
                accepted = True
                break
            lam *= _LAMBDA_FACTOR
        if not accepted:
            # no downhill step exists at any damping: stationary point
            return FitResult(params=x, cost=cost, iterations=it, converged=True)
        rel_drop = (cost - cost_try) / cost if cost > 0 else 0.0
        x, jac, r, cost = x_try, jac_try, r_try, cost_try
        lam = max(lam / _LAMBDA_FACTOR, _LAMBDA_MIN)
        if rel_drop < rel_tol:
            return FitResult(params=x, cost=cost, iterations=it, converged=True)
    return FitResult(params=x, cost=cost, iterations=max_iter, converged=False)
