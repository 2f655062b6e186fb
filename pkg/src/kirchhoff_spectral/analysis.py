"""Diagnostics on top of trajectories: scale-norm traces, degeneracy
classification, uniqueness conditions, derivative-loss probes and the
continuous-dependence experiment."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .conditions import log_log_slope
from .dynamics import IntegratorConfig, SpectralState, Trajectory, evolve
from .errors import PreconditionError
from .functions import FunctionSpec, antiderivative
from .norms import GevreyParams, gevrey_norm, sobolev_norm
from .spectrum import (
    SpectralVector,
    a_half_norm_sq,
    a_inner,
    a_norm_sq,
    require_shared_spectrum,
)

DEFAULT_HP_MAIN_TOL = 1e-10
DEFAULT_MU_MIN = 1e-8


# ---------------------------------------------------------------------------
# scale-norm traces


@dataclass(frozen=True)
class ScaleTraceConfig:
    """Shrinking-radius norm trace parameters: r(t) = r0 - R*t."""

    phi: FunctionSpec
    r0: float
    big_r: float
    alpha: float

    def __post_init__(self):
        if self.r0 <= 0.0:
            raise PreconditionError("r0 must be positive")
        if self.big_r < 0.0 or self.alpha < 0.0:
            raise PreconditionError("R and alpha must be nonnegative")


@dataclass(frozen=True)
class ScaleTrace:
    t: np.ndarray
    radii: np.ndarray
    u_norms: np.ndarray  # at exponent alpha + 1/2
    v_norms: np.ndarray  # at exponent alpha


def scale_norm_trace(tr: Trajectory, cfg: ScaleTraceConfig) -> ScaleTrace:
    """Norms of (u, u') along the shrinking scale of spaces.

    The u-norm uses exponent alpha + 1/2 and the u'-norm exponent alpha,
    matching the solution-space pairing.  Fails if the radius reaches zero
    inside the trajectory window.
    """
    radii = cfg.r0 - cfg.big_r * tr.t
    if np.any(radii <= 0.0):
        i = int(np.argmax(radii <= 0.0))
        raise PreconditionError(
            f"scale radius r0 - R*t = {radii[i]:.6g} <= 0 at t = {tr.t[i]:.6g}"
        )
    u_norms = np.empty(tr.n_samples)
    v_norms = np.empty(tr.n_samples)
    for i in range(tr.n_samples):
        u_i = SpectralVector(tr.spectrum, tr.u[i])
        v_i = SpectralVector(tr.spectrum, tr.v[i])
        r_i = float(radii[i])
        u_norms[i] = gevrey_norm(u_i, GevreyParams(cfg.phi, r_i, cfg.alpha + 0.5))
        v_norms[i] = gevrey_norm(v_i, GevreyParams(cfg.phi, r_i, cfg.alpha))
    return ScaleTrace(t=tr.t.copy(), radii=radii, u_norms=u_norms, v_norms=v_norms)


# ---------------------------------------------------------------------------
# degeneracy classification


class Degeneracy(str, Enum):
    STRICTLY_HYPERBOLIC = "strictly_hyperbolic"
    MILDLY_DEGENERATE = "mildly_degenerate"
    REALLY_DEGENERATE = "really_degenerate"


def hamiltonian_reachable_sigma(
    u0: SpectralVector, u1: SpectralVector, m: FunctionSpec
) -> float:
    """Upper bound for |A^(1/2)u|^2 along the flow, from energy conservation.

    Finds sigma with M(sigma) > H(0) by doubling; falls back to a fixed
    multiple of the initial value when M plateaus below the energy level.
    """
    sigma0 = a_half_norm_sq(u0)
    h0 = float(np.dot(u1.components, u1.components)) + float(
        antiderivative(m)(sigma0)
    )
    big_m = antiderivative(m)
    hi = max(1.0, 2.0 * sigma0)
    for _ in range(60):
        if float(big_m(hi)) > h0:
            return hi
        hi *= 2.0
    return max(4.0 * sigma0, 1.0)


def classify_degeneracy(
    m: FunctionSpec,
    u0: SpectralVector,
    sigma_grid: np.ndarray,
    mu_min: float = DEFAULT_MU_MIN,
) -> Degeneracy:
    """Classify the problem by the grid infimum of m and the value at the datum.

    The caller supplies a grid spanning the energy-reachable sigma range
    (see ``hamiltonian_reachable_sigma``).
    """
    grid = np.asarray(sigma_grid, dtype=float)
    if grid.size == 0:
        raise PreconditionError("sigma grid must be nonempty")
    values = np.asarray(m(grid), dtype=float)
    if float(np.min(values)) >= mu_min:
        return Degeneracy.STRICTLY_HYPERBOLIC
    if abs(float(m(a_half_norm_sq(u0)))) > mu_min:
        return Degeneracy.MILDLY_DEGENERATE
    return Degeneracy.REALLY_DEGENERATE


# ---------------------------------------------------------------------------
# uniqueness conditions


@dataclass(frozen=True)
class UniquenessReport:
    """The two scalar quantities deciding local uniqueness.

    ``as1`` is <A u0, u1>; ``as2`` is |A^(1/2)u1|^2 - m(|A^(1/2)u0|^2)|A u0|^2.
    Uniqueness is guaranteed when at least one of them is nonzero.
    """

    as1: float
    as2: float
    hp_main_holds: bool
    tol: float


def uniqueness_quantities(
    u0: SpectralVector, u1: SpectralVector, m: FunctionSpec
) -> tuple[float, float]:
    """The (as1, as2) pair; single source shared with the psi derivatives."""
    require_shared_spectrum(u0, u1)
    as1 = a_inner(u0, u1)
    as2 = a_half_norm_sq(u1) - float(m(a_half_norm_sq(u0))) * a_norm_sq(u0)
    return as1, as2


def uniqueness_condition(
    u0: SpectralVector,
    u1: SpectralVector,
    m: FunctionSpec,
    tol: float = DEFAULT_HP_MAIN_TOL,
) -> UniquenessReport:
    as1, as2 = uniqueness_quantities(u0, u1, m)
    return UniquenessReport(
        as1=as1, as2=as2, hp_main_holds=bool(abs(as1) + abs(as2) > tol), tol=tol
    )


# ---------------------------------------------------------------------------
# derivative-loss probe


@dataclass(frozen=True)
class LossProbeEntry:
    alpha: float
    eps: float
    norm_at_start: float
    max_early_norm: float
    growth_exponent: float


@dataclass(frozen=True)
class LossProbeReport:
    """Growth signatures of high norms near t = 0.

    At finite truncation every norm is finite, so this reports ratios and
    fitted exponents, never a proof of loss; the verdict is labelled a
    signature.
    """

    entries: tuple
    signature_alphas: tuple
    has_signature: bool
    initial_data_norms: tuple
    n_early: int
    growth_factor: float


def derivative_loss_probe(
    tr: Trajectory,
    phi: FunctionSpec,
    alpha_grid,
    eps_grid,
    n_early: int = 16,
    growth_factor: float = 10.0,
    r_probe: float = 1.0,
) -> LossProbeReport:
    """Probe sobolev_norm(u(t), alpha + eps) growth on the samples near t = 0.

    Flags a loss signature at alpha when the early norms exceed the t = 0
    value by ``growth_factor`` for every eps in the grid.  ``phi`` is used to
    report the initial datum's weighted norms alongside, as the regularity
    context of the experiment.
    """
    if abs(float(tr.t[0])) > 0.0:
        raise PreconditionError("trajectory must start at t = 0")
    if tr.n_samples < n_early + 1:
        raise PreconditionError(
            f"need at least {n_early + 1} samples near 0; rerun with finer "
            f"dense output"
        )
    alphas = [float(a) for a in alpha_grid]
    epss = [float(e) for e in eps_grid]
    entries = []
    signature_alphas = []
    for alpha in alphas:
        flags = []
        for eps in epss:
            series = np.array(
                [
                    sobolev_norm(SpectralVector(tr.spectrum, tr.u[i]), alpha + eps)
                    for i in range(n_early + 1)
                ]
            )
            start = float(series[0])
            peak = float(np.max(series[1:]))
            expo = log_log_slope(tr.t[1 : n_early + 1], series[1:])
            entries.append(
                LossProbeEntry(
                    alpha=alpha,
                    eps=eps,
                    norm_at_start=start,
                    max_early_norm=peak,
                    growth_exponent=expo,
                )
            )
            flags.append(peak > growth_factor * max(start, 1e-300) and start > 0.0
                         or (start == 0.0 and peak > growth_factor))
        if flags and all(flags):
            signature_alphas.append(alpha)
    u0 = SpectralVector(tr.spectrum, tr.u[0])
    data_norms = tuple(
        (alpha, gevrey_norm(u0, GevreyParams(phi, r_probe, alpha))) for alpha in alphas
    )
    return LossProbeReport(
        entries=tuple(entries),
        signature_alphas=tuple(signature_alphas),
        has_signature=bool(signature_alphas),
        initial_data_norms=data_norms,
        n_early=n_early,
        growth_factor=growth_factor,
    )


# ---------------------------------------------------------------------------
# continuous dependence


@dataclass(frozen=True)
class DependenceEntry:
    index: int
    data_distance: float
    m_distance: float
    sup_deviation: float


@dataclass(frozen=True)
class DependenceReport:
    entries: tuple
    continuity_constants: tuple
    fitted_slope_vs_data: float

    @property
    def deviations(self) -> np.ndarray:
        return np.array([e.sup_deviation for e in self.entries])


def energy_distance(
    tr_a: Trajectory, tr_b: Trajectory
) -> float:
    """sup over shared samples of the energy-space distance."""
    n = min(tr_a.n_samples, tr_b.n_samples)
    lam2 = tr_a.spectrum.lam2
    du = tr_a.u[:n] - tr_b.u[:n]
    dv = tr_a.v[:n] - tr_b.v[:n]
    dist_sq = du**2 @ lam2 + np.sum(dv**2, axis=1)
    return float(np.sqrt(np.max(dist_sq)))


def continuous_dependence_study(
    problems,
    limit,
    cfg: IntegratorConfig,
    t_end: float,
    omega: FunctionSpec | None = None,
    sigma_grid: np.ndarray | None = None,
) -> DependenceReport:
    """Integrate a family of perturbed problems against their limit.

    ``problems`` is a sequence of (m_n, u0_n, u1_n); ``limit`` the target
    triple.  Every nonlinearity's omega-continuity constant is estimated on
    the shared grid first (the hypothesis of the compactness statement);
    the report carries the sup-in-time energy distances together with the
    input distances and a fitted log-log rate.
    """
    from .conditions import estimate_continuity_constant
    from .functions import modulus_power

    m_lim, u0_lim, u1_lim = limit
    if omega is None:
        omega = modulus_power(1.0)
    if sigma_grid is None:
        hi = max(
            hamiltonian_reachable_sigma(u0_lim, u1_lim, m_lim), 1.0
        )
        sigma_grid = np.linspace(0.0, hi, 257)

    constants = [estimate_continuity_constant(m_lim, omega, sigma_grid)]
    for m_n, _, _ in problems:
        constants.append(estimate_continuity_constant(m_n, omega, sigma_grid))

    state_lim = SpectralState(
        t=0.0, u=u0_lim, v=u1_lim
    )
    tr_lim = evolve(state_lim, m_lim, cfg, t_end)
    m_lim_vals = np.asarray(m_lim(sigma_grid), dtype=float)

    entries = []
    for idx, (m_n, u0_n, u1_n) in enumerate(problems):
        state_n = SpectralState(t=0.0, u=u0_n, v=u1_n)
        try:
            tr_n = evolve(state_n, m_n, cfg, t_end)
        except Exception as exc:
            raise PreconditionError(
                f"integration failed for problem {idx}: {exc}"
            ) from exc
        lam2 = u0_n.spectrum.lam2
        du = u0_n.components - u0_lim.components
        dv = u1_n.components - u1_lim.components
        data_dist = float(np.sqrt(lam2 @ du**2 + np.dot(dv, dv)))
        m_dist = float(np.max(np.abs(np.asarray(m_n(sigma_grid)) - m_lim_vals)))
        entries.append(
            DependenceEntry(
                index=idx,
                data_distance=data_dist,
                m_distance=m_dist,
                sup_deviation=energy_distance(tr_n, tr_lim),
            )
        )

    inputs = np.array([max(e.data_distance, e.m_distance) for e in entries])
    devs = np.array([e.sup_deviation for e in entries])
    slope = log_log_slope(inputs, devs)
    return DependenceReport(
        entries=tuple(entries),
        continuity_constants=tuple(constants),
        fitted_slope_vs_data=slope,
    )
