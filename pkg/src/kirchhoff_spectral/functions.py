"""Symbolic function presets with tabulated fallback.

One ``FunctionSpec`` type covers the three roles in the model problem:

* the nonlinearity m(sigma), evaluated on [0, inf) and required nonnegative
  where it multiplies the operator;
* continuity moduli omega(sigma), whose values matter near 0; the preset
  modulus kinds therefore follow their formula on an initial interval and
  continue with the tangent line (or a constant, when the formula peaks),
  which keeps them nondecreasing, concave and subadditive on all of [0, inf);
* weight functions phi(sigma) with codomain [1, inf), which matter only for
  large sigma; the preset weight kinds clamp the formula with max(1, .) and
  guard logarithms with sigma -> max(sigma, e).

Specs are plain frozen records, evaluate vectorized over numpy arrays, and
serialize to/from nested dicts (tabulated specs additionally load from
two-column CSV).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import DomainError, QuadratureError

_E = math.e

_KINDS = (
    "constant",
    "affine",
    "power",
    "pohozaev",
    "table",
    "offset",
    "modulus_power",
    "modulus_sigma_log",
    "modulus_inv_log",
    "weight_power_log",
    "weight_scaled_modulus",
)


@dataclass(frozen=True)
class FunctionSpec:
    """A named scalar function of sigma >= 0."""

    kind: str
    params: Mapping[str, float] = field(default_factory=dict)
    base: "FunctionSpec | None" = None
    knots: "tuple[tuple[float, ...], tuple[float, ...]] | None" = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DomainError(f"unknown function kind {self.kind!r}")
        _VALIDATORS[self.kind](self)

    def __call__(self, sigma):
        sig = np.asarray(sigma, dtype=float)
        if np.any(sig < 0.0):
            raise DomainError("sigma must be nonnegative")
        out = _EVALUATORS[self.kind](self, sig)
        if np.isscalar(sigma) or np.ndim(sigma) == 0:
            return float(out)
        return out

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        d.update({k: v for k, v in self.params.items()})
        if self.base is not None:
            d["base"] = self.base.to_dict()
        if self.knots is not None:
            d["sigma"] = list(self.knots[0])
            d["value"] = list(self.knots[1])
        return d

    @staticmethod
    def from_dict(d: Mapping) -> "FunctionSpec":
        d = dict(d)
        kind = d.pop("kind", None)
        if kind is None:
            raise DomainError("function spec needs a 'kind' tag")
        base = d.pop("base", None)
        if base is not None:
            base = FunctionSpec.from_dict(base)
        knots = None
        if "sigma" in d or "value" in d:
            sig = d.pop("sigma", None)
            val = d.pop("value", None)
            if sig is None or val is None:
                raise DomainError("tabulated spec needs both 'sigma' and 'value'")
            knots = (tuple(float(x) for x in sig), tuple(float(y) for y in val))
        params = {k: float(v) for k, v in d.items()}
        return FunctionSpec(kind, params, base=base, knots=knots)

    def describe(self) -> str:
        return _DESCRIBERS[self.kind](self)

    def __repr__(self) -> str:
        return f"FunctionSpec({self.describe()})"


# ---------------------------------------------------------------------------
# constructors


def constant(c: float) -> FunctionSpec:
    return FunctionSpec("constant", {"c": float(c)})


def affine(a: float, b: float) -> FunctionSpec:
    """a + b*sigma."""
    return FunctionSpec("affine", {"a": float(a), "b": float(b)})


def power(beta: float) -> FunctionSpec:
    """sigma**beta with the convention 0**0 = 1."""
    return FunctionSpec("power", {"beta": float(beta)})


def pohozaev(a: float, b: float) -> FunctionSpec:
    """(a + b*sigma)**(-2), the special nonlinearity with a second invariant."""
    return FunctionSpec("pohozaev", {"a": float(a), "b": float(b)})


def table(sigmas, values) -> FunctionSpec:
    """Piecewise-linear interpolation of (sigma_i, y_i), clamped at the ends."""
    return FunctionSpec(
        "table",
        {},
        knots=(tuple(float(s) for s in sigmas), tuple(float(y) for y in values)),
    )


def offset(c: float, base: FunctionSpec) -> FunctionSpec:
    """c + base(sigma)."""
    return FunctionSpec("offset", {"c": float(c)}, base=base)


def modulus_power(beta: float) -> FunctionSpec:
    """Hoelder modulus sigma**beta on [0, 1], tangent line beyond."""
    return FunctionSpec("modulus_power", {"beta": float(beta)})


def modulus_sigma_log(q: float) -> FunctionSpec:
    """Modulus sigma*|log sigma|**q on [0, e**-q], constant beyond the peak."""
    return FunctionSpec("modulus_sigma_log", {"q": float(q)})


def modulus_inv_log(q: float) -> FunctionSpec:
    """Modulus |log sigma|**(-q) on (0, e**-(q+1)], tangent line beyond."""
    return FunctionSpec("modulus_inv_log", {"q": float(q)})


def weight_power_log(p: float, ell: float = 0.0) -> FunctionSpec:
    """Weight max(1, s**p * (log s)**ell) with s = max(sigma, e) when ell != 0."""
    return FunctionSpec("weight_power_log", {"p": float(p), "ell": float(ell)})


def weight_scaled_modulus(omega: FunctionSpec) -> FunctionSpec:
    """Weight max(1, sigma * omega(1/sigma))."""
    return FunctionSpec("weight_scaled_modulus", {}, base=omega)


def load_table_csv(path) -> FunctionSpec:
    """Read a two-column CSV (sigma, value) with strictly increasing sigma."""
    sigmas: list[float] = []
    values: list[float] = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            if len(row) < 2:
                raise DomainError(f"table row needs two columns, got {row!r}")
            try:
                sigmas.append(float(row[0]))
                values.append(float(row[1]))
            except ValueError:
                if sigmas:
                    raise DomainError(f"non-numeric table row {row!r}")
                continue  # header line
    return table(sigmas, values)


# ---------------------------------------------------------------------------
# validation


def _need(spec: FunctionSpec, *names: str):
    for name in names:
        if name not in spec.params:
            raise DomainError(f"{spec.kind} spec needs parameter {name!r}")


def _validate_constant(spec):
    _need(spec, "c")


def _validate_affine(spec):
    _need(spec, "a", "b")


def _validate_power(spec):
    _need(spec, "beta")


def _validate_pohozaev(spec):
    _need(spec, "a", "b")
    if spec.params["a"] <= 0.0:
        raise DomainError("pohozaev spec needs a > 0")


def _validate_table(spec):
    if spec.knots is None:
        raise DomainError("table spec needs knots")
    sig, val = spec.knots
    if len(sig) != len(val) or len(sig) < 2:
        raise DomainError("table needs at least two (sigma, value) rows")
    s = np.asarray(sig)
    if s[0] < 0.0 or np.any(np.diff(s) <= 0.0):
        raise DomainError("table sigmas must be strictly increasing and >= 0")
    if not np.all(np.isfinite(s)) or not np.all(np.isfinite(val)):
        raise DomainError("table entries must be finite")


def _validate_offset(spec):
    _need(spec, "c")
    if spec.base is None:
        raise DomainError("offset spec needs a base function")


def _validate_modulus_power(spec):
    _need(spec, "beta")
    if not 0.0 < spec.params["beta"] <= 1.0:
        raise DomainError("modulus_power needs beta in (0, 1]")


def _validate_modulus_sigma_log(spec):
    _need(spec, "q")
    if spec.params["q"] < 0.0:
        raise DomainError("modulus_sigma_log needs q >= 0")


def _validate_modulus_inv_log(spec):
    _need(spec, "q")
    if spec.params["q"] <= 0.0:
        raise DomainError("modulus_inv_log needs q > 0")


def _validate_weight_power_log(spec):
    _need(spec, "p", "ell")


def _validate_weight_scaled_modulus(spec):
    if spec.base is None:
        raise DomainError("weight_scaled_modulus needs the modulus as base")


_VALIDATORS = {
    "constant": _validate_constant,
    "affine": _validate_affine,
    "power": _validate_power,
    "pohozaev": _validate_pohozaev,
    "table": _validate_table,
    "offset": _validate_offset,
    "modulus_power": _validate_modulus_power,
    "modulus_sigma_log": _validate_modulus_sigma_log,
    "modulus_inv_log": _validate_modulus_inv_log,
    "weight_power_log": _validate_weight_power_log,
    "weight_scaled_modulus": _validate_weight_scaled_modulus,
}


# ---------------------------------------------------------------------------
# evaluation


def _eval_constant(spec, sig):
    return np.full_like(sig, spec.params["c"])


def _eval_affine(spec, sig):
    return spec.params["a"] + spec.params["b"] * sig


def _eval_power(spec, sig):
    p = spec.params["beta"]
    if p == 0.0:
        return np.ones_like(sig)
    if p < 0.0 and np.any(sig == 0.0):
        raise DomainError("negative power is singular at sigma = 0")
    return sig**p


def _eval_pohozaev(spec, sig):
    a, b = spec.params["a"], spec.params["b"]
    den = a + b * sig
    if np.any(den <= 0.0):
        raise DomainError("pohozaev nonlinearity needs a + b*sigma > 0")
    return den**-2.0


def _eval_table(spec, sig):
    s, y = spec.knots
    return np.interp(sig, s, y)


def _eval_offset(spec, sig):
    return spec.params["c"] + spec.base(sig)


def _eval_modulus_power(spec, sig):
    beta = spec.params["beta"]
    inner = np.minimum(sig, 1.0)
    return np.where(sig <= 1.0, inner**beta, 1.0 + beta * (sig - 1.0))


def _eval_modulus_sigma_log(spec, sig):
    q = spec.params["q"]
    if q == 0.0:
        # degenerates to the identity on [0, 1], constant 1 beyond
        return np.minimum(sig, 1.0)
    peak = math.exp(-q)
    s = np.minimum(sig, peak)
    with np.errstate(divide="ignore", invalid="ignore"):
        core = np.where(s > 0.0, s * np.abs(np.log(np.maximum(s, 1e-320))) ** q, 0.0)
    return np.where(sig <= peak, core, peak * q**q)


def _eval_modulus_inv_log(spec, sig):
    q = spec.params["q"]
    knee = math.exp(-(q + 1.0))
    val_knee = (q + 1.0) ** -q
    slope = q * (q + 1.0) ** -(q + 1.0) / knee
    s = np.minimum(sig, knee)
    with np.errstate(divide="ignore"):
        core = np.where(s > 0.0, np.abs(np.log(np.maximum(s, 1e-320))) ** -q, 0.0)
    return np.where(sig <= knee, core, val_knee + slope * (sig - knee))


def _eval_weight_power_log(spec, sig):
    p, ell = spec.params["p"], spec.params["ell"]
    if ell == 0.0:
        core = np.ones_like(sig) if p == 0.0 else sig**p
    else:
        s = np.maximum(sig, _E)
        core = s**p * np.log(s) ** ell
    return np.maximum(core, 1.0)


def _eval_weight_scaled_modulus(spec, sig):
    s = np.maximum(sig, 1e-300)
    return np.maximum(s * spec.base(1.0 / s), 1.0)


_EVALUATORS = {
    "constant": _eval_constant,
    "affine": _eval_affine,
    "power": _eval_power,
    "pohozaev": _eval_pohozaev,
    "table": _eval_table,
    "offset": _eval_offset,
    "modulus_power": _eval_modulus_power,
    "modulus_sigma_log": _eval_modulus_sigma_log,
    "modulus_inv_log": _eval_modulus_inv_log,
    "weight_power_log": _eval_weight_power_log,
    "weight_scaled_modulus": _eval_weight_scaled_modulus,
}


_DESCRIBERS: dict[str, Callable[[FunctionSpec], str]] = {
    "constant": lambda s: f"{s.params['c']:g}",
    "affine": lambda s: f"{s.params['a']:g} + {s.params['b']:g}*sigma",
    "power": lambda s: f"sigma^{s.params['beta']:g}",
    "pohozaev": lambda s: f"({s.params['a']:g} + {s.params['b']:g}*sigma)^-2",
    "table": lambda s: f"table[{len(s.knots[0])} knots]",
    "offset": lambda s: f"{s.params['c']:g} + {s.base.describe()}",
    "modulus_power": lambda s: f"sigma^{s.params['beta']:g} (modulus)",
    "modulus_sigma_log": lambda s: f"sigma*|log sigma|^{s.params['q']:g} (modulus)",
    "modulus_inv_log": lambda s: f"|log sigma|^-{s.params['q']:g} (modulus)",
    "weight_power_log": lambda s: (
        f"max(1, sigma^{s.params['p']:g}"
        + (f" * log(sigma)^{s.params['ell']:g})" if s.params["ell"] else ")")
    ),
    "weight_scaled_modulus": lambda s: f"max(1, sigma*omega(1/sigma)), omega = {s.base.describe()}",
}


def scalar_callable(spec: FunctionSpec) -> Callable[[float], float]:
    """Fast scalar evaluator for the inner integrator loop.

    The closed forms avoid the array round trip of ``FunctionSpec.__call__``
    for the kinds that show up in right-hand sides; other kinds fall back to
    the generic path.
    """
    kind, p = spec.kind, spec.params
    if kind == "constant":
        c = p["c"]
        return lambda s: c
    if kind == "affine":
        a, b = p["a"], p["b"]
        return lambda s: a + b * s
    if kind == "power":
        q = p["beta"]
        if q == 0.0:
            return lambda s: 1.0
        return lambda s: s**q
    if kind == "pohozaev":
        a, b = p["a"], p["b"]

        def _poho(s: float) -> float:
            den = a + b * s
            if den <= 0.0:
                raise DomainError("pohozaev nonlinearity needs a + b*sigma > 0")
            return den**-2.0

        return _poho
    if kind == "offset":
        c = p["c"]
        inner = scalar_callable(spec.base)
        return lambda s: c + inner(s)
    return lambda s: float(spec(s))


# ---------------------------------------------------------------------------
# antiderivatives, normalized to M(0) = 0


def _table_antiderivative(spec: FunctionSpec) -> Callable:
    sig = np.asarray(spec.knots[0])
    val = np.asarray(spec.knots[1])
    # running exact integral of the clamped piecewise-linear interpolant
    head = val[0] * sig[0]
    seg = 0.5 * (val[1:] + val[:-1]) * np.diff(sig)
    cum = head + np.concatenate([[0.0], np.cumsum(seg)])

    def M(sigma):
        s = np.asarray(sigma, dtype=float)
        below = np.minimum(s, sig[0])
        out = val[0] * below
        idx = np.clip(np.searchsorted(sig, s, side="right") - 1, 0, sig.size - 2)
        inside = (s > sig[0]) & (s <= sig[-1])
        ds = s - sig[idx]
        y_at = val[idx] + (val[idx + 1] - val[idx]) / (sig[idx + 1] - sig[idx]) * ds
        out = np.where(inside, cum[idx] + 0.5 * (val[idx] + y_at) * ds, out)
        out = np.where(s > sig[-1], cum[-1] + val[-1] * (s - sig[-1]), out)
        return out if out.ndim else float(out)

    return M


def _quad_antiderivative(spec: FunctionSpec) -> Callable:
    from scipy.integrate import quad

    def M(sigma):
        def one(s: float) -> float:
            if s == 0.0:
                return 0.0
            value, err = quad(lambda x: float(spec(x)), 0.0, s, epsabs=1e-12, limit=200)
            if not math.isfinite(value) or err > 1e-8 * max(1.0, abs(value)):
                raise QuadratureError(
                    f"antiderivative quadrature failed at sigma = {s:g}"
                )
            return value

        s = np.asarray(sigma, dtype=float)
        if s.ndim == 0:
            return one(float(s))
        return np.array([one(float(x)) for x in s])

    return M


def antiderivative(spec: FunctionSpec) -> Callable:
    """Return M with M' = spec and M(0) = 0.

    Closed forms for the algebraic kinds, exact piecewise integration for
    tables, adaptive quadrature otherwise.
    """
    kind, p = spec.kind, spec.params
    if kind == "constant":
        c = p["c"]
        return lambda s: c * np.asarray(s, dtype=float) + 0.0
    if kind == "affine":
        a, b = p["a"], p["b"]
        return lambda s: a * np.asarray(s, float) + 0.5 * b * np.asarray(s, float) ** 2
    if kind == "power":
        q = p["beta"]
        if q <= -1.0:
            raise DomainError("power antiderivative needs p > -1")
        return lambda s: np.asarray(s, float) ** (q + 1.0) / (q + 1.0)
    if kind == "pohozaev":
        a, b = p["a"], p["b"]

        def M(s):
            s = np.asarray(s, dtype=float)
            den = a + b * s
            if np.any(den <= 0.0):
                raise DomainError("pohozaev antiderivative needs a + b*sigma > 0")
            return s / (a * den)

        return M
    if kind == "offset":
        c = p["c"]
        inner = antiderivative(spec.base)
        return lambda s: c * np.asarray(s, float) + inner(s)
    if kind == "table":
        return _table_antiderivative(spec)
    return _quad_antiderivative(spec)
