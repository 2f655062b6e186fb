"""Weighted spectral norms over scales of spaces.

The squared norm is sum_k lambda_k^(4*alpha) u_k^2 exp(r*phi(lambda_k)).
Terms are assembled in the log domain, exp(4a*log lam + 2*log|u| + r*phi),
so mixed huge/tiny factors cancel before exponentiation; any combined
exponent above the cap raises ``NormOverflowError`` naming the mode.  The
exponentiated terms are then added with error-free compensated summation
(math.fsum) in fixed index order, which makes results bit-reproducible and
makes the r = 0 case coincide exactly with the plain Sobolev norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidWeightError, NormOverflowError, PreconditionError
from .functions import FunctionSpec
from .spectrum import SpectralVector

DEFAULT_EXP_CAP = 700.0


@dataclass(frozen=True)
class GevreyParams:
    """Norm parameter bundle (phi, r, alpha)."""

    phi: FunctionSpec
    r: float
    alpha: float

    def __post_init__(self):
        if self.r < 0.0:
            raise PreconditionError("scale radius r must be >= 0")
        if self.alpha < 0.0:
            raise PreconditionError("exponent alpha must be >= 0")


def term_exponents(
    u: SpectralVector,
    alpha: float,
    r: float = 0.0,
    phi: FunctionSpec | None = None,
) -> np.ndarray:
    """Log of each squared-norm term; -inf marks vanishing terms."""
    lam = u.spectrum.lambdas
    c = u.components
    with np.errstate(divide="ignore"):
        e = 2.0 * np.log(np.abs(c))
    if alpha != 0.0:
        with np.errstate(divide="ignore"):
            loglam = np.log(lam)  # -inf at lambda = 0, as wanted
        e = e + 4.0 * alpha * loglam
    if r != 0.0:
        if phi is None:
            raise PreconditionError("r > 0 needs a weight function")
        w = np.asarray(phi(lam), dtype=float)
        if np.any(w < 1.0):
            k = int(np.argmax(w < 1.0))
            raise InvalidWeightError(
                f"weight phi evaluated below 1 at lambda = {lam[k]:g}"
            )
        e = e + r * w
    return e


def _exp_sum(exponents: np.ndarray, exp_cap: float, nonzero: np.ndarray) -> float:
    over = exponents > exp_cap
    if np.any(over & nonzero):
        k = int(np.argmax(over & nonzero))
        raise NormOverflowError(k, float(exponents[k]))
    return math.fsum(np.exp(np.minimum(exponents, exp_cap)))


def gevrey_norm(
    u: SpectralVector, p: GevreyParams, exp_cap: float = DEFAULT_EXP_CAP
) -> float:
    """sqrt( sum_k lambda_k^(4*alpha) u_k^2 exp(r*phi(lambda_k)) )."""
    e = term_exponents(u, p.alpha, p.r, p.phi)
    return math.sqrt(_exp_sum(e, exp_cap, u.components != 0.0))


def sobolev_norm(
    u: SpectralVector, alpha: float, exp_cap: float = DEFAULT_EXP_CAP
) -> float:
    """sqrt( sum_k lambda_k^(4*alpha) u_k^2 ), the fractional-domain norm.

    Shares the summation path of ``gevrey_norm`` so that gevrey_norm at
    r = 0 equals this exactly.
    """
    if alpha < 0.0:
        raise PreconditionError("exponent alpha must be >= 0")
    e = term_exponents(u, alpha)
    return math.sqrt(_exp_sum(e, exp_cap, u.components != 0.0))
