"""Mixture component families: log-densities, samplers, and method of moments.

Three component kinds are supported: a Gaussian (parametrized by mean and
precision) and Gamma / inverse-Gamma activation components. Activation
components carry a support sign; a negative-support component is defined by
evaluating its positive twin at ``-x``, so its density lives on x < 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special import log_gamma

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class ComponentFamily:
    """Family tag plus support side (+1 / -1; 0 for the Gaussian)."""

    kind: str
    sign: int = 0

    def __post_init__(self):
        if self.kind == "gaussian":
            if self.sign != 0:
                raise ValueError("Gaussian components do not carry a support sign")
        elif self.kind in ("gamma", "invgamma"):
            if self.sign not in (1, -1):
                raise ValueError(f"{self.kind} components need sign +1 or -1")
        else:
            raise ValueError(f"unknown component kind {self.kind!r}")

    @property
    def is_gaussian(self) -> bool:
        return self.kind == "gaussian"


GAUSSIAN = ComponentFamily("gaussian", 0)
GAMMA_POS = ComponentFamily("gamma", 1)
GAMMA_NEG = ComponentFamily("gamma", -1)
INVGAMMA_POS = ComponentFamily("invgamma", 1)
INVGAMMA_NEG = ComponentFamily("invgamma", -1)


@dataclass(frozen=True)
class GaussianParams:
    """Gaussian noise component with mean ``mu`` and precision ``tau``."""

    mu: float
    tau: float

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.tau) and self.tau > 0):
            raise ValueError(f"invalid Gaussian parameters mu={self.mu}, tau={self.tau}")

    @property
    def variance(self) -> float:
        return 1.0 / self.tau


@dataclass(frozen=True)
class ShapeRateParams:
    """Gamma or inverse-Gamma component.

    ``rate`` is the rate parameter for Gamma components and the scale
    parameter for inverse-Gamma ones; ``shape`` is shared by both.
    """

    shape: float
    rate: float
    family: ComponentFamily

    def __post_init__(self):
        if self.family.is_gaussian:
            raise ValueError("ShapeRateParams requires a Gamma or inverse-Gamma family")
        ok = (
            math.isfinite(self.shape)
            and math.isfinite(self.rate)
            and self.shape > 0
            and self.rate > 0
        )
        if not ok:
            raise ValueError(
                f"invalid shape/rate parameters shape={self.shape}, rate={self.rate}"
            )


@dataclass
class MixtureParams:
    """Point estimate of the three-component mixture.

    Component 1 is the Gaussian; component 2 has positive support and
    component 3 negative support.
    """

    pi: np.ndarray
    comp1: GaussianParams
    comp2: ShapeRateParams
    comp3: ShapeRateParams

    def __post_init__(self):
        pi = np.asarray(self.pi, dtype=float)
        if pi.shape != (3,) or not np.all(np.isfinite(pi)):
            raise ValueError(f"pi must be a finite 3-vector, got {pi!r}")
        if np.any(pi < -1e-12) or abs(pi.sum() - 1.0) > 1e-9:
            raise ValueError(f"pi must lie on the probability simplex, got {pi!r}")
        self.pi = np.clip(pi, 0.0, None)
        if self.comp2.family.sign != 1:
            raise ValueError("component 2 must have positive support")
        if self.comp3.family.sign != -1:
            raise ValueError("component 3 must have negative support")

    @property
    def families(self):
        return (self.comp2.family, self.comp3.family)


def log_pdf(params, x):
    """Log-density of one component at ``x`` (scalar or array).

    Returns -inf outside the support; by convention that includes x = 0 for
    every non-Gaussian component (zeros are masked upstream and the
    inverse-Gamma density is singular there).
    """
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise ValueError("x must be finite")
    if isinstance(params, GaussianParams):
        out = (
            0.5 * math.log(params.tau)
            - 0.5 * _LOG_2PI
            - 0.5 * params.tau * (xa - params.mu) ** 2
        )
        return out if out.ndim else float(out)
    if not isinstance(params, ShapeRateParams):
        raise TypeError(f"unsupported parameter type {type(params).__name__}")

    z = params.family.sign * xa
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.full(z.shape, -np.inf)
    m = z > 0
    s, r = params.shape, params.rate
    lognorm = s * math.log(r) - log_gamma(s)
    zm = z[m]
    lz = np.log(zm)
    if params.family.kind == "gamma":
        out[m] = lognorm + (s - 1.0) * lz - r * zm
    else:
        out[m] = lognorm - (s + 1.0) * lz - r / zm
    return float(out[0]) if scalar else out


def sample(params, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` i.i.d. values from one component; deterministic given rng state.

    Gamma variates come from numpy's generator (Marsaglia-Tsang rejection
    with the standard shape<1 boost); inverse-Gamma variates are reciprocals
    of Gamma(shape, rate=scale) draws, an exact transformation.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if isinstance(params, GaussianParams):
        return rng.normal(params.mu, 1.0 / math.sqrt(params.tau), size=n)
    if not isinstance(params, ShapeRateParams):
        raise TypeError(f"unsupported parameter type {type(params).__name__}")
    g = rng.gamma(shape=params.shape, scale=1.0 / params.rate, size=n)
    if params.family.kind == "invgamma":
        g = 1.0 / g
    return params.family.sign * g


def _check_moments(mean: float, variance: float) -> None:
    if not (math.isfinite(mean) and math.isfinite(variance) and mean > 0 and variance > 0):
        raise ValueError(
            f"method of moments needs positive mean and variance, got {mean}, {variance}"
        )


def mom_gamma(mean: float, variance: float, sign: int = 1) -> ShapeRateParams:
    """Gamma(shape, rate) matching the given mean and variance exactly."""
    _check_moments(mean, variance)
    family = GAMMA_POS if sign == 1 else GAMMA_NEG
    return ShapeRateParams(mean * mean / variance, mean / variance, family)


def mom_invgamma(mean: float, variance: float, sign: int = 1) -> ShapeRateParams:
    """Inverse-Gamma(shape, scale) matching the given mean and variance exactly."""
    _check_moments(mean, variance)
    q = mean * mean / variance
    family = INVGAMMA_POS if sign == 1 else INVGAMMA_NEG
    return ShapeRateParams(q + 2.0, mean * (q + 1.0), family)
