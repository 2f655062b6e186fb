"""Galerkin mode dynamics of the nonlinear string equation.

The retained modes obey u_k'' = -m(sum_j lambda_j^2 u_j^2) lambda_k^2 u_k.
For data supported on the retained modes this truncation is the exact
dynamics, because the coupling runs only through the single scalar
sum_j lambda_j^2 u_j^2.  The linearization u_k'' = -c(t) lambda_k^2 u_k is
integrated by the same machinery with a prescribed coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import NegativeNonlinearityError, NondegeneracyError, PreconditionError
from .functions import FunctionSpec, antiderivative, scalar_callable
from .integrate import METHOD_NAME, solve_to_samples
from .spectrum import (
    SpectralVector,
    Spectrum,
    a_half_norm_sq,
    require_shared_spectrum,
)

BLOWUP_CAP = 1e12
DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class SpectralState:
    """Snapshot (t, u, u') of the mode system."""

    t: float
    u: SpectralVector
    v: SpectralVector

    def __post_init__(self):
        require_shared_spectrum(self.u, self.v)
        if not math.isfinite(self.t):
            raise PreconditionError("state time must be finite")

    @property
    def spectrum(self) -> Spectrum:
        return self.u.spectrum


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    max_step: float = math.inf
    dense_output_dt: float | None = None
    method: str = METHOD_NAME

    def __post_init__(self):
        if self.rel_tol <= 0.0 or self.abs_tol <= 0.0:
            raise PreconditionError("tolerances must be positive")
        if self.dense_output_dt is not None and self.dense_output_dt <= 0.0:
            raise PreconditionError("dense_output_dt must be positive")

    def scaled(self, factor: float) -> "IntegratorConfig":
        return replace(self, rel_tol=self.rel_tol * factor, abs_tol=self.abs_tol * factor)


@dataclass(frozen=True)
class IntegratorMeta:
    """Run record attached to every trajectory."""

    method: str
    rel_tol: float
    abs_tol: float
    n_accepted: int
    n_rejected: int
    n_rhs: int
    status: str
    message: str
    lambda_max_span: float
    hamiltonian_drift: float | None = None
    degenerate_spans: tuple = ()

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "n_accepted": self.n_accepted,
            "n_rejected": self.n_rejected,
            "n_rhs": self.n_rhs,
            "status": self.status,
            "message": self.message,
            "lambda_max_span": self.lambda_max_span,
            "hamiltonian_drift": self.hamiltonian_drift,
            "degenerate_spans": [list(s) for s in self.degenerate_spans],
        }


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time-stamped sample record of one integration."""

    spectrum: Spectrum
    t: np.ndarray
    u: np.ndarray  # (n_samples, n_modes)
    v: np.ndarray
    meta: IntegratorMeta

    def __post_init__(self):
        if self.t.ndim != 1 or self.u.shape != (self.t.size, self.spectrum.n):
            raise PreconditionError("inconsistent trajectory arrays")
        if self.v.shape != self.u.shape:
            raise PreconditionError("u and v sample arrays must match")
        if self.t.size >= 2 and np.any(np.diff(self.t) <= 0.0):
            raise PreconditionError("timestamps must be strictly increasing")

    @property
    def n_samples(self) -> int:
        return int(self.t.size)

    def state(self, i: int) -> SpectralState:
        return SpectralState(
            t=float(self.t[i]),
            u=SpectralVector(self.spectrum, self.u[i]),
            v=SpectralVector(self.spectrum, self.v[i]),
        )

    @property
    def initial_state(self) -> SpectralState:
        return self.state(0)

    @property
    def final_state(self) -> SpectralState:
        return self.state(self.n_samples - 1)

    def states(self):
        for i in range(self.n_samples):
            yield self.state(i)

    def sigma_series(self) -> np.ndarray:
        """|A^(1/2)u|^2 at every sample."""
        return self.u**2 @ self.spectrum.lam2


def _sample_grid(t0: float, t_end: float, dt: float | None) -> np.ndarray:
    span = t_end - t0
    if dt is None:
        n = 1000
    else:
        n = max(1, int(round(span / dt)))
    return np.linspace(t0, t_end, n + 1)


def _degenerate_spans(t: np.ndarray, c: np.ndarray) -> tuple:
    """Contiguous sample spans where the coefficient sits below the floor."""
    low = c < DEGENERATE_TOL
    if not np.any(low):
        return ()
    spans = []
    start = None
    for i, flag in enumerate(low):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            spans.append((float(t[start]), float(t[i - 1])))
            start = None
    if start is not None:
        spans.append((float(t[start]), float(t[-1])))
    return tuple(spans)


def evolve(
    init: SpectralState,
    m: FunctionSpec,
    cfg: IntegratorConfig,
    t_end: float,
) -> Trajectory:
    """Integrate the nonlinear mode system from ``init`` up to ``t_end``.

    The nonlinearity is checked on the fly: a negative value aborts with
    ``NegativeNonlinearityError``.  Suspected blow-up (state beyond
    ``BLOWUP_CAP``) and step underflow return the partial trajectory with a
    status marker instead of raising.
    """
    if t_end <= init.t:
        raise PreconditionError("t_end must exceed the initial time")
    spec = init.spectrum
    n = spec.n
    lam2 = spec.lam2
    m_at = scalar_callable(m)

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        u = y[:n]
        sigma = float(lam2 @ (u * u))
        c = m_at(sigma)
        if c < 0.0:
            raise NegativeNonlinearityError(
                f"m({sigma:.6g}) = {c:.6g} < 0 at t = {t:.6g}"
            )
        out = np.empty_like(y)
        out[:n] = y[n:]
        out[n:] = -c * lam2 * u
        return out

    samples = _sample_grid(init.t, t_end, cfg.dense_output_dt)
    y0 = np.concatenate([init.u.components, init.v.components])
    res = solve_to_samples(
        rhs,
        y0,
        samples,
        rel_tol=cfg.rel_tol,
        abs_tol=cfg.abs_tol,
        max_step=cfg.max_step,
        state_cap=BLOWUP_CAP,
    )

    u = res.y[:, :n]
    v = res.y[:, n:]
    sigma = u**2 @ lam2
    c_series = np.asarray(m(sigma), dtype=float)
    drift = _relative_drift(hamiltonian_values(spec, u, v, m))
    meta = IntegratorMeta(
        method=cfg.method,
        rel_tol=cfg.rel_tol,
        abs_tol=cfg.abs_tol,
        n_accepted=res.n_accepted,
        n_rejected=res.n_rejected,
        n_rhs=res.n_rhs,
        status=res.status,
        message=res.message,
        lambda_max_span=spec.lambda_max * (t_end - init.t),
        hamiltonian_drift=drift,
        degenerate_spans=_degenerate_spans(res.t, c_series),
    )
    return Trajectory(spectrum=spec, t=res.t, u=u, v=v, meta=meta)


def linear_evolve(
    init: SpectralState,
    c: FunctionSpec | Callable[[float], float],
    cfg: IntegratorConfig,
    t_end: float,
) -> Trajectory:
    """Integrate the linearized system u_k'' = -c(t) lambda_k^2 u_k.

    The modes decouple; they are integrated jointly so that one error
    control governs all of them.  ``c`` may be a FunctionSpec in t or any
    callable; it must stay nonnegative.
    """
    if t_end <= init.t:
        raise PreconditionError("t_end must exceed the initial time")
    spec = init.spectrum
    n = spec.n
    lam2 = spec.lam2
    c_at = scalar_callable(c) if isinstance(c, FunctionSpec) else c

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        coeff = float(c_at(t))
        if coeff < 0.0:
            raise NegativeNonlinearityError(f"c({t:.6g}) = {coeff:.6g} < 0")
        out = np.empty_like(y)
        out[:n] = y[n:]
        out[n:] = -coeff * lam2 * y[:n]
        return out

    samples = _sample_grid(init.t, t_end, cfg.dense_output_dt)
    y0 = np.concatenate([init.u.components, init.v.components])
    res = solve_to_samples(
        rhs,
        y0,
        samples,
        rel_tol=cfg.rel_tol,
        abs_tol=cfg.abs_tol,
        max_step=cfg.max_step,
        state_cap=BLOWUP_CAP,
    )
    meta = IntegratorMeta(
        method=cfg.method,
        rel_tol=cfg.rel_tol,
        abs_tol=cfg.abs_tol,
        n_accepted=res.n_accepted,
        n_rejected=res.n_rejected,
        n_rhs=res.n_rhs,
        status=res.status,
        message=res.message,
        lambda_max_span=spec.lambda_max * (t_end - init.t),
    )
    return Trajectory(spectrum=spec, t=res.t, u=res.y[:, :n], v=res.y[:, n:], meta=meta)


# ---------------------------------------------------------------------------
# energies and invariants


def hamiltonian(state: SpectralState, m: FunctionSpec) -> float:
    """|u'|^2 + M(|A^(1/2)u|^2) with M the antiderivative, M(0) = 0."""
    big_m = antiderivative(m)
    sigma = a_half_norm_sq(state.u)
    return float(np.dot(state.v.components, state.v.components) + big_m(sigma))


def hamiltonian_values(
    spectrum: Spectrum, u: np.ndarray, v: np.ndarray, m: FunctionSpec
) -> np.ndarray:
    big_m = antiderivative(m)
    sigma = u**2 @ spectrum.lam2
    return np.sum(v**2, axis=1) + np.asarray(big_m(sigma), dtype=float)


def hamiltonian_series(tr: Trajectory, m: FunctionSpec) -> np.ndarray:
    return hamiltonian_values(tr.spectrum, tr.u, tr.v, m)


def higher_order_energy(state: SpectralState) -> float:
    """|A^(1/4)u'|^2 + |A^(3/4)u|^2 = sum lambda v^2 + sum lambda^3 u^2."""
    lam = state.spectrum.lambdas
    return float(
        np.dot(lam, state.v.components**2) + np.dot(lam**3, state.u.components**2)
    )


def higher_order_series(tr: Trajectory) -> np.ndarray:
    lam = tr.spectrum.lambdas
    return tr.v**2 @ lam + tr.u**2 @ lam**3


def pohozaev_invariant(state: SpectralState, a: float, b: float) -> float:
    """Second-order invariant of the nonlinearity (a + b*sigma)**-2.

    With D = a + b*|A^(1/2)u|^2 this is

        D |A^(1/2)u'|^2 + |Au|^2 / D - (b/4) (d/dt |A^(1/2)u|^2)^2,

    where the last factor is 2<A u, u'> (differentiating along the flow
    makes the quantity exactly constant; this fixes the coefficient on the
    cross term).  Requires the nondegeneracy D > 0.
    """
    lam2 = state.spectrum.lam2
    u = state.u.components
    v = state.v.components
    sigma = float(lam2 @ u**2)
    den = a + b * sigma
    if den <= 0.0:
        raise NondegeneracyError(f"a + b*|A^(1/2)u|^2 = {den:.6g} <= 0")
    half_v = float(lam2 @ v**2)
    au_sq = float(lam2**2 @ u**2)
    cross = float(lam2 @ (u * v))
    return den * half_v + au_sq / den - b * cross**2


def pohozaev_series(tr: Trajectory, a: float, b: float) -> np.ndarray:
    lam2 = tr.spectrum.lam2
    sigma = tr.u**2 @ lam2
    den = a + b * sigma
    if np.any(den <= 0.0):
        i = int(np.argmax(den <= 0.0))
        raise NondegeneracyError(
            f"a + b*|A^(1/2)u|^2 = {den[i]:.6g} <= 0 at t = {tr.t[i]:.6g}"
        )
    half_v = tr.v**2 @ lam2
    au_sq = tr.u**2 @ lam2**2
    cross = (tr.u * tr.v) @ lam2
    return den * half_v + au_sq / den - b * cross**2


def _relative_drift(series: np.ndarray) -> float:
    ref = abs(float(series[0]))
    span = float(np.max(np.abs(series - series[0])))
    return span / ref if ref > 0.0 else span


def relative_drift(series: np.ndarray) -> float:
    """max |x_i - x_0| / |x_0|, the drift diagnostic used throughout."""
    return _relative_drift(np.asarray(series, dtype=float))


# ---------------------------------------------------------------------------
# coefficient trace


@dataclass(frozen=True)
class CoefficientTrace:
    """Sampled coefficient c(t) = m(|A^(1/2)u(t)|^2) with its modulus profile."""

    t: np.ndarray
    values: np.ndarray
    modulus_deltas: np.ndarray
    modulus_values: np.ndarray


def coefficient_trace(
    tr: Trajectory, m: FunctionSpec, n_deltas: int = 8
) -> CoefficientTrace:
    """Coefficient series plus max |c(t)-c(s)| over |t-s| <= delta profiles."""
    sigma = tr.sigma_series()
    c = np.asarray(m(sigma), dtype=float)
    n = tr.n_samples
    deltas = []
    values = []
    if n >= 2:
        dt = float(tr.t[1] - tr.t[0])
        k = 1
        for _ in range(n_deltas):
            if k >= n:
                break
            window = np.lib.stride_tricks.sliding_window_view(c, k + 1)
            values.append(float(np.max(window.max(axis=1) - window.min(axis=1))))
            deltas.append(k * dt)
            k *= 2
    return CoefficientTrace(
        t=tr.t.copy(),
        values=c,
        modulus_deltas=np.asarray(deltas),
        modulus_values=np.asarray(values),
    )


def coefficient_interpolant(trace: CoefficientTrace) -> Callable[[float], float]:
    """Monotone-shape cubic interpolant of the coefficient series."""
    from scipy.interpolate import PchipInterpolator

    interp = PchipInterpolator(trace.t, trace.values)
    lo, hi = float(trace.t[0]), float(trace.t[-1])

    def c(t: float) -> float:
        return float(interp(min(max(t, lo), hi)))

    return c
