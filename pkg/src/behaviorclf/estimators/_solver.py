"""Monotone first-order solver shared by the linear classifiers.

Proximal gradient descent with a backtracking step size: each step must
satisfy the standard quadratic upper-bound test, which guarantees the
composite objective never increases.  With an identity prox this is
plain gradient descent with Armijo-style backtracking.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

Smooth = Callable[[np.ndarray], float]
SmoothGrad = Callable[[np.ndarray], tuple[float, np.ndarray]]
Prox = Callable[[np.ndarray, float], np.ndarray]


def identity_prox(v: np.ndarray, step: float) -> np.ndarray:
    return v


def zero_reg(x: np.ndarray) -> float:
    return 0.0


def proximal_descent(
    smooth_grad: SmoothGrad,
    x0: np.ndarray,
    prox: Prox = identity_prox,
    reg: Callable[[np.ndarray], float] = zero_reg,
    tol: float = 1e-6,
    max_iter: int = 10000,
) -> tuple[np.ndarray, np.ndarray]:
    """Minimize smooth(x) + reg(x); returns (solution, objective trace).

    Stops when the relative objective decrease falls below tol, when the
    step size underflows (no further progress possible), or at max_iter.
    The trace holds the composite objective at x0 and after every
    accepted step.
    """
    x = np.array(x0, dtype=np.float64)
    g_val, grad = smooth_grad(x)
    obj = g_val + reg(x)
    trace = [obj]
    step = 1.0
    for _ in range(max_iter):
        while True:
            cand = prox(x - step * grad, step)
            delta = cand - x
            g_cand = smooth_grad(cand)[0]
            bound = g_val + float(grad @ delta) + float(delta @ delta) / (2.0 * step)
            if g_cand <= bound + 1e-12:
                break
            step *= 0.5
            if step < 1e-20:
                trace_arr = np.asarray(trace, dtype=np.float64)
                return x, trace_arr
        new_obj = g_cand + reg(cand)
        trace.append(new_obj)
        x = cand
        g_val, grad = smooth_grad(x)
        decrease = obj - new_obj
        stop = decrease < tol * max(abs(obj), 1e-300)
        obj = new_obj
        if stop:
            break
        step = min(step * 1.5, 1e8)
    return x, np.asarray(trace, dtype=np.float64)
