"""Adaptive embedded Runge-Kutta core for the oscillatory mode systems.

The propagating method is Verner's "most robust" 6(5) pair: nine stages,
6th-order solution with an embedded 5th-order error estimate, first-same-as-
last so an accepted step costs eight right-hand-side evaluations.  The
higher order buys the accuracy headroom these acceptance tolerances need;
a 5(4) pair at the same tolerances leaves no margin against the 1e-8
component-error budget on [0, 1] (measured, not guessed).

Dense output is realized by capping the step so the solver lands exactly on
every requested sample time.  Samples are therefore full-accuracy step
points, there is no interpolation error term, and rerunning a configuration
reproduces the artifact bytes.  For the step densities these tolerances
force, the cap is almost never the binding constraint.

The driver never raises for suspected blow-up or step-size underflow: it
returns the partial sample record with a status marker, so escape
experiments can observe the escape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

# Verner 6(5) extended Butcher tableau.
_C = np.array([0.0, 9 / 50, 1 / 6, 1 / 4, 53 / 100, 3 / 5, 4 / 5, 1.0, 1.0])

_A_ROWS = (
    (9 / 50,),
    (29 / 324, 25 / 324),
    (1 / 16, 0.0, 3 / 16),
    (79129 / 250000, 0.0, -261237 / 250000, 19663 / 15625),
    (1336883 / 4909125, 0.0, -25476 / 30875, 194159 / 185250, 8225 / 78546),
    (
        -2459386 / 14727375,
        0.0,
        19504 / 30875,
        2377474 / 13615875,
        -6157250 / 5773131,
        902 / 735,
    ),
    (
        2699 / 7410,
        0.0,
        -252 / 1235,
        -1393253 / 3993990,
        236875 / 72618,
        -135 / 49,
        15 / 22,
    ),
    (11 / 144, 0.0, 0.0, 256 / 693, 0.0, 125 / 504, 125 / 528, 5 / 72),
)

_A = np.zeros((9, 9))
for _i, _row in enumerate(_A_ROWS):
    _A[_i + 1, : len(_row)] = _row

# 6th-order propagating weights; the last stage is evaluated at the new point.
_B = np.array([11 / 144, 0.0, 0.0, 256 / 693, 0.0, 125 / 504, 125 / 528, 5 / 72, 0.0])
# embedded 5th-order weights
_B_HAT = np.array(
    [
        28 / 477,
        0.0,
        0.0,
        212 / 441,
        -312500 / 366177,
        2125 / 1764,
        0.0,
        -2105 / 35532,
        2995 / 17766,
    ]
)
_E = _B - _B_HAT

_ERROR_EXPONENT = -1.0 / 6.0
_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0

METHOD_NAME = "verner65"


@dataclass
class IntegrationOutcome:
    """Sample record of one adaptive integration."""

    t: np.ndarray
    y: np.ndarray
    n_accepted: int
    n_rejected: int
    n_rhs: int
    status: str  # "completed" | "blow_up" | "step_underflow"
    message: str = ""

    @property
    def completed(self) -> bool:
        return self.status == "completed"


def _initial_step(
    rhs: Callable,
    t0: float,
    y0: np.ndarray,
    f0: np.ndarray,
    span: float,
    rel_tol: float,
    abs_tol: float,
) -> tuple[float, int]:
    """Hairer-style first step guess; returns (h0, extra rhs evaluations)."""
    scale = abs_tol + rel_tol * np.abs(y0)
    d0 = math.sqrt(float(np.mean((y0 / scale) ** 2)))
    d1 = math.sqrt(float(np.mean((f0 / scale) ** 2)))
    h0 = 1e-6 * span if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, span)
    y1 = y0 + h0 * f0
    f1 = rhs(t0 + h0, y1)
    d2 = math.sqrt(float(np.mean(((f1 - f0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6 * span, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / 6.0)
    return min(100.0 * h0, h1, span), 1


def solve_to_samples(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    samples: np.ndarray,
    rel_tol: float,
    abs_tol: float,
    max_step: float = math.inf,
    state_cap: float | None = None,
) -> IntegrationOutcome:
    """Integrate y' = rhs(t, y) recording the state at each sample time.

    ``samples`` must be strictly increasing, with samples[0] the initial
    time.  Exceptions raised by ``rhs`` propagate to the caller; blow-up
    (when ``state_cap`` is set) and step underflow instead truncate the
    record and set the status marker.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1 or samples.size < 2:
        raise ValueError("need at least the initial time and one sample")
    if np.any(np.diff(samples) <= 0.0):
        raise ValueError("sample times must be strictly increasing")
    if not (rel_tol > 0.0 and abs_tol > 0.0):
        raise ValueError("tolerances must be positive")

    t = float(samples[0])
    t_end = float(samples[-1])
    y = np.array(y0, dtype=float)
    dim = y.size

    f = rhs(t, y)
    n_rhs = 1
    h, extra = _initial_step(rhs, t, y, f, t_end - t, rel_tol, abs_tol)
    n_rhs += extra
    h = min(h, max_step)

    k = np.empty((9, dim))
    out = np.empty((samples.size, dim))
    out[0] = y
    si = 1
    n_accepted = 0
    n_rejected = 0
    status = "completed"
    message = ""
    h_floor_scale = 16.0 * np.finfo(float).eps * max(abs(t_end), 1.0)
    grew_after_reject = False

    while si < samples.size:
        target = float(samples[si])
        h_try = min(h, target - t)
        if h_try < h_floor_scale:
            status = "step_underflow"
            message = (
                f"step size {h_try:.3e} underflowed at t = {t:.6g}; "
                f"stiffness or blow-up suspected"
            )
            break

        k[0] = f
        for i in range(1, 9):
            k[i] = rhs(t + _C[i] * h_try, y + h_try * (_A[i, :i] @ k[:i]))
        n_rhs += 8
        y_new = y + h_try * (_B @ k)
        err_vec = h_try * (_E @ k)
        scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err = math.sqrt(float(np.mean((err_vec / scale) ** 2)))

        if math.isfinite(err) and err <= 1.0:
            t_new = t + h_try
            if t_new >= target - 1e-12 * max(1.0, abs(target)):
                t_new = target
                out[si] = y_new
                si += 1
            t = t_new
            y = y_new
            f = k[8]  # first-same-as-last
            n_accepted += 1
            limit_growth = grew_after_reject  # no growth right after a reject
            grew_after_reject = False
            if state_cap is not None and float(np.max(np.abs(y))) > state_cap:
                status = "blow_up"
                message = (
                    f"state magnitude exceeded {state_cap:.3e} at t = {t:.6g}; "
                    f"suspected blow-up"
                )
                break
        else:
            n_rejected += 1
            grew_after_reject = True
            limit_growth = True

        if math.isfinite(err) and err > 0.0:
            factor = _SAFETY * err**_ERROR_EXPONENT
        elif err == 0.0:
            factor = _MAX_FACTOR
        else:  # overflowed stages
            factor = _MIN_FACTOR
        factor = min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
        if limit_growth:
            factor = min(factor, 1.0)
        h = min(h_try * factor, max_step)

    return IntegrationOutcome(
        t=samples[:si].copy(),
        y=out[:si],
        n_accepted=n_accepted,
        n_rejected=n_rejected,
        n_rhs=n_rhs,
        status=status,
        message=message,
    )
