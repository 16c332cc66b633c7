"""Analytical variational Bayes fitters for the three-component mixtures.

``fit_bggm`` (Gamma activations) and ``fit_bgim`` (inverse-Gamma activations)
run a conjugate coordinate-ascent on the factorized posterior
q(Z) q(pi) q(mu1) q(tau1) q(s) q(r). Every update is closed form; the shape
posteriors use an unnormalized conjugate family whose expectations are
computed with a Laplace approximation (mean through the inverse digamma) and
a Taylor correction for E[log Gamma(s)]. Convergence is monitored through
the negative free energy.

Posterior parametrizations mirror the prior ones: the Dirichlet weights
``lambda_hat``; Gaussian mean ``(m_hat, tau_hat)`` (mean, precision); the
noise precision Gamma ``(c_hat, b_hat)`` (shape, scale); the rate posteriors
``(d_hat, e_hat)`` (shape, rate); and per activation component the shape
functional ``(log_a_hat, b_hat_s, c_hat_s)``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .distributions import (
    ComponentFamily,
    GAMMA_NEG,
    GAMMA_POS,
    INVGAMMA_NEG,
    INVGAMMA_POS,
    mom_gamma,
    mom_invgamma,
)
from .initialization import init_mixture, kmeans_1d
from .special import digamma, inv_digamma, log_gamma, tetragamma, trigamma

_LOG_2PI = math.log(2.0 * math.pi)


class VBNumericError(RuntimeError):
    """Raised when a variational quantity leaves the representable range."""


@dataclass(frozen=True)
class HyperPriors:
    """Fixed hyper-prior parameters; per-activation entries are (comp2, comp3)."""

    lambda0: float
    m0: float
    tau0: float
    c0_tau: float
    b0_tau: float
    d0: tuple
    e0: tuple
    log_a0: tuple
    b0_s: tuple
    c0_s: tuple
    s0: tuple
    r0: tuple
    families: tuple

    def __post_init__(self):
        positives = [self.lambda0, self.tau0, self.c0_tau, self.b0_tau]
        positives += list(self.d0) + list(self.e0) + list(self.b0_s) + list(self.c0_s)
        if not all(math.isfinite(v) and v > 0 for v in positives):
            raise ValueError("hyper-prior positivity constraint violated")


@dataclass
class VBState:
    """Posterior hyper-parameters for all variational factors."""

    lambda_hat: np.ndarray
    m_hat: float
    tau_hat: float
    c_hat: float
    b_hat: float
    d_hat: np.ndarray
    e_hat: np.ndarray
    log_a_hat: np.ndarray
    b_hat_s: np.ndarray
    c_hat_s: np.ndarray


@dataclass
class ExpectationCache:
    """Posterior expectations consumed by the responsibility update and NFE."""

    pi: np.ndarray
    log_pi: np.ndarray
    mu: float
    mu2: float
    tau: float
    log_tau: float
    r: np.ndarray
    log_r: np.ndarray
    s: np.ndarray
    log_gamma_s: np.ndarray


@dataclass
class SufficientStats:
    """Soft-count statistics of one responsibility matrix.

    ``xbar`` is the signed weighted sum per component; ``log_x`` and
    ``recip_x`` accumulate log and reciprocal of the mirrored values for the
    two activation components.
    """

    n: np.ndarray
    xbar: np.ndarray
    sxx1: float
    log_x: np.ndarray
    recip_x: np.ndarray


@dataclass
class VBFitResult:
    state: VBState
    expectations: ExpectationCache
    responsibilities: np.ndarray
    nfe_trace: np.ndarray
    iterations: int
    wall_time_seconds: float
    converged: bool
    degenerate_rows: int
    priors: HyperPriors


@dataclass
class VBFitConfig:
    max_iterations: int = 500
    rel_tolerance: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.rel_tolerance <= 0:
            raise ValueError("rel_tolerance must be > 0")


def default_hyperpriors(pos_family: ComponentFamily, neg_family: ComponentFamily, data=None) -> HyperPriors:
    """Standard weakly-informative hyper-priors.

    The Gaussian block gets a zero-mean unit-precision mean prior and a flat
    precision prior (shape 0.01, scale 100). Each activation shape/rate block
    is built so that the implied component has prior mean and variance 10:
    the method of moments fixes (s0, r0), the rate prior is Gamma(d0=r0,
    e0=1), and the shape functional is centered so its Laplace mean and
    variance equal s0 (b0 = c0 = 1/(s0 trigamma(s0))).
    """
    families = (pos_family, neg_family)
    d0, e0, log_a0, b0_s, c0_s, s0, r0 = [], [], [], [], [], [], []
    for fam in families:
        if fam.kind == "gamma":
            base = mom_gamma(10.0, 10.0)
        elif fam.kind == "invgamma":
            base = mom_invgamma(10.0, 10.0)
        else:
            raise ValueError("activation components must be gamma or invgamma")
        b0 = 1.0 / (base.shape * trigamma(base.shape))
        c0 = b0
        la0 = b0 * digamma(base.shape) - c0 * math.log(base.rate)
        if fam.kind == "invgamma":
            la0 = -la0
        s0.append(base.shape)
        r0.append(base.rate)
        d0.append(base.rate)
        e0.append(1.0)
        b0_s.append(b0)
        c0_s.append(c0)
        log_a0.append(la0)
    return HyperPriors(
        lambda0=5.0,
        m0=0.0,
        tau0=1.0,
        c0_tau=0.01,
        b0_tau=100.0,
        d0=tuple(d0),
        e0=tuple(e0),
        log_a0=tuple(log_a0),
        b0_s=tuple(b0_s),
        c0_s=tuple(c0_s),
        s0=tuple(s0),
        r0=tuple(r0),
        families=families,
    )


class _DataCache:
    """Per-fit precomputations: support indices and mirrored transforms.

    The responsibility pass only ever combines these arrays with scalar
    coefficients, so everything data-dependent is computed exactly once per
    fit. ``xp``/``xn`` hold the mirrored values on each support side.
    """

    __slots__ = (
        "x",
        "sq",
        "pos",
        "neg",
        "zero",
        "xp",
        "xn",
        "sq_p",
        "sq_n",
        "log_xp",
        "log_xn",
        "inv_xp",
        "inv_xn",
        "sum_x",
        "sum_sq",
    )

    def __init__(self, x: np.ndarray):
        self.x = x
        self.sq = x * x
        self.pos = np.nonzero(x > 0)[0]
        self.neg = np.nonzero(x < 0)[0]
        self.zero = np.nonzero(x == 0)[0]
        self.xp = x[self.pos]
        self.xn = -x[self.neg]
        self.sq_p = self.xp * self.xp
        self.sq_n = self.xn * self.xn
        self.log_xp = np.log(self.xp)
        self.log_xn = np.log(self.xn)
        self.inv_xp = 1.0 / self.xp
        self.inv_xn = 1.0 / self.xn
        self.sum_x = float(self.x.sum())
        self.sum_sq = float(self.sq.sum())


def _gaussian_log_rho(cache: _DataCache, e: ExpectationCache) -> np.ndarray:
    const = e.log_pi[0] + 0.5 * e.log_tau - 0.5 * _LOG_2PI - 0.5 * e.tau * e.mu2
    a = cache.sq * (-0.5 * e.tau)
    a += cache.x * (e.tau * e.mu)
    a += const
    return a


def _side_log_rho(e: ExpectationCache, k: int, fam, logs, vals, invs) -> np.ndarray:
    const = e.log_pi[k + 1] + e.s[k] * e.log_r[k] - e.log_gamma_s[k]
    if fam.kind == "gamma":
        b = logs * (e.s[k] - 1.0)
        b += vals * (-e.r[k])
    else:
        b = logs * (-(e.s[k] + 1.0))
        b += invs * (-e.r[k])
    b += const
    return b


def _side_softmax(a_side: np.ndarray, b_side: np.ndarray):
    """Two-way softmax of (Gaussian, activation) on one support side.

    Returns the activation responsibility and the per-point log-sum-exp.
    """
    m = np.maximum(a_side, b_side)
    e1 = np.exp(a_side - m)
    e2 = np.exp(b_side - m)
    total = e1 + e2
    return e2 / total, m + np.log(total)


def _responsibility_pass(cache: _DataCache, e: ExpectationCache, families):
    """One packed pass: side responsibilities, sufficient stats, total LSE.

    Off-support responsibilities are identically zero by construction; data
    points at exactly zero are assigned to the Gaussian.
    """
    a = _gaussian_log_rho(cache, e)
    b_pos = _side_log_rho(e, 0, families[0], cache.log_xp, cache.xp, cache.inv_xp)
    b_neg = _side_log_rho(e, 1, families[1], cache.log_xn, cache.xn, cache.inv_xn)
    g2, lse_pos = _side_softmax(a[cache.pos], b_pos)
    g3, lse_neg = _side_softmax(a[cache.neg], b_neg)
    lse_total = float(lse_pos.sum()) + float(lse_neg.sum()) + float(a[cache.zero].sum())

    n2 = float(g2.sum())
    n3 = float(g3.sum())
    sx2 = float(g2 @ cache.xp)
    sx3 = float(g3 @ cache.xn)
    stats = SufficientStats(
        n=np.array([cache.x.size - n2 - n3, n2, n3]),
        xbar=np.array([cache.sum_x - sx2 + sx3, sx2, -sx3]),
        sxx1=cache.sum_sq - float(g2 @ cache.sq_p) - float(g3 @ cache.sq_n),
        log_x=np.array([float(g2 @ cache.log_xp), float(g3 @ cache.log_xn)]),
        recip_x=np.array([float(g2 @ cache.inv_xp), float(g3 @ cache.inv_xn)]),
    )
    return g2, g3, stats, lse_total


def _assemble_gamma(cache: _DataCache, g2: np.ndarray, g3: np.ndarray) -> np.ndarray:
    gamma = np.zeros((cache.x.size, 3))
    gamma[:, 0] = 1.0
    gamma[cache.pos, 0] = 1.0 - g2
    gamma[cache.pos, 1] = g2
    gamma[cache.neg, 0] = 1.0 - g3
    gamma[cache.neg, 2] = g3
    return gamma


def _log_rho(cache: _DataCache, expectations: ExpectationCache, families) -> np.ndarray:
    """Unnormalized log-responsibilities as a full matrix; -inf is out-of-support."""
    e = expectations
    lr = np.full((cache.x.size, 3), -np.inf)
    lr[:, 0] = _gaussian_log_rho(cache, e)
    lr[cache.pos, 1] = _side_log_rho(e, 0, families[0], cache.log_xp, cache.xp, cache.inv_xp)
    lr[cache.neg, 2] = _side_log_rho(e, 1, families[1], cache.log_xn, cache.xn, cache.inv_xn)
    return lr


def update_responsibilities(data, expectations: ExpectationCache, families):
    """Responsibilities and sufficient statistics for one pass over the data.

    The third return value counts rows with zero density under every
    component; the Gaussian has full support, so it stays zero for any
    finite expectation cache and is reported for interface completeness.
    """
    x = np.asarray(data, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise ValueError("data must be finite")
    cache = _DataCache(x)
    g2, g3, stats, _ = _responsibility_pass(cache, expectations, families)
    return _assemble_gamma(cache, g2, g3), stats, 0


def sufficient_stats(data, gamma: np.ndarray) -> SufficientStats:
    """Soft-count statistics of an arbitrary responsibility matrix."""
    x = np.asarray(data, dtype=float).ravel()
    cache = _DataCache(x)
    return SufficientStats(
        n=gamma.sum(axis=0),
        xbar=gamma.T @ x,
        sxx1=float(gamma[:, 0] @ cache.sq),
        log_x=np.array(
            [gamma[cache.pos, 1] @ cache.log_xp, gamma[cache.neg, 2] @ cache.log_xn]
        ),
        recip_x=np.array(
            [gamma[cache.pos, 1] @ cache.inv_xp, gamma[cache.neg, 2] @ cache.inv_xn]
        ),
    )


def _mirrored_xbar(stats: SufficientStats) -> np.ndarray:
    return np.array([stats.xbar[1], -stats.xbar[2]])


def update_pi(stats: SufficientStats, priors: HyperPriors) -> np.ndarray:
    return priors.lambda0 + stats.n


def update_mu(stats: SufficientStats, priors: HyperPriors, e_tau: float):
    tau_hat = priors.tau0 + e_tau * stats.n[0]
    m_hat = (priors.tau0 * priors.m0 + e_tau * stats.xbar[0]) / tau_hat
    return m_hat, tau_hat


def _update_tau_from_stats(
    n1: float, sx: float, sxx: float, priors: HyperPriors, e_mu: float, e_mu2: float
):
    c_hat = priors.c0_tau + 0.5 * n1
    quad = sxx - 2.0 * e_mu * sx + n1 * e_mu2
    b_hat = 1.0 / (1.0 / priors.b0_tau + 0.5 * quad)
    return c_hat, b_hat


def update_tau(data, gamma: np.ndarray, priors: HyperPriors, e_mu: float, e_mu2: float):
    x = np.asarray(data, dtype=float).ravel()
    g1 = gamma[:, 0]
    return _update_tau_from_stats(
        float(g1.sum()), float(g1 @ x), float(g1 @ (x * x)), priors, e_mu, e_mu2
    )


def update_r(stats: SufficientStats, priors: HyperPriors, e_s: np.ndarray):
    """Rate posteriors; the conjugate data statistic is the mirrored weighted
    sum for Gamma components and the mirrored reciprocal sum for
    inverse-Gamma ones."""
    mirrored = _mirrored_xbar(stats)
    d_hat = np.empty(2)
    e_hat = np.empty(2)
    for k, fam in enumerate(priors.families):
        d_hat[k] = priors.d0[k] + e_s[k] * stats.n[k + 1]
        stat = mirrored[k] if fam.kind == "gamma" else stats.recip_x[k]
        e_hat[k] = priors.e0[k] + stat
    return d_hat, e_hat


def update_shape(stats: SufficientStats, priors: HyperPriors):
    log_a_hat = np.asarray(priors.log_a0) + stats.log_x
    b_hat_s = np.asarray(priors.b0_s) + stats.n[1:]
    c_hat_s = np.asarray(priors.c0_s) + stats.n[1:]
    return log_a_hat, b_hat_s, c_hat_s


def _shape_laplace_mean(log_a: float, b: float, c: float, log_r: float, fam: ComponentFamily) -> float:
    sign = 1.0 if fam.kind == "gamma" else -1.0
    arg = (sign * log_a + c * log_r) / b
    if not math.isfinite(arg):
        raise VBNumericError(
            f"shape Laplace argument is not finite: log_a={log_a}, b={b}, c={c}, log_r={log_r}"
        )
    return inv_digamma(arg)


def _taylor_log_gamma_mean(mu: float, b: float) -> float:
    return log_gamma(mu) + 1.0 / b + tetragamma(mu) * mu / (trigamma(mu) * b)


def expectations(state: VBState, priors: HyperPriors) -> ExpectationCache:
    """All posterior expectations entering the responsibility update and NFE."""
    lam = state.lambda_hat
    lam_tot = float(lam.sum())
    psi_tot = digamma(lam_tot)
    log_pi = np.array([digamma(float(v)) - psi_tot for v in lam])
    log_r = np.array(
        [digamma(float(state.d_hat[k])) - math.log(state.e_hat[k]) for k in range(2)]
    )
    s = np.empty(2)
    log_gamma_s = np.empty(2)
    for k, fam in enumerate(priors.families):
        s[k] = _shape_laplace_mean(
            float(state.log_a_hat[k]),
            float(state.b_hat_s[k]),
            float(state.c_hat_s[k]),
            float(log_r[k]),
            fam,
        )
        log_gamma_s[k] = _taylor_log_gamma_mean(s[k], float(state.b_hat_s[k]))
    return ExpectationCache(
        pi=lam / lam_tot,
        log_pi=log_pi,
        mu=state.m_hat,
        mu2=state.m_hat * state.m_hat + 1.0 / state.tau_hat,
        tau=state.b_hat * state.c_hat,
        log_tau=digamma(state.c_hat) + math.log(state.b_hat),
        r=state.d_hat / state.e_hat,
        log_r=log_r,
        s=s,
        log_gamma_s=log_gamma_s,
    )


def _kl_dirichlet(lam_hat: np.ndarray, lam0: float) -> float:
    tot_hat = float(lam_hat.sum())
    k = lam_hat.size
    psi_tot = digamma(tot_hat)
    out = log_gamma(tot_hat) - log_gamma(k * lam0) + k * log_gamma(lam0)
    for v in lam_hat:
        v = float(v)
        out += -log_gamma(v) + (v - lam0) * (digamma(v) - psi_tot)
    return out


def _kl_gaussian(m_q: float, tau_q: float, m_p: float, tau_p: float) -> float:
    return 0.5 * (
        math.log(tau_q / tau_p) + tau_p * (1.0 / tau_q + (m_q - m_p) ** 2) - 1.0
    )


def _kl_gamma_shape_scale(c_q: float, b_q: float, c_p: float, b_p: float) -> float:
    return (
        (c_q - c_p) * digamma(c_q)
        - log_gamma(c_q)
        + log_gamma(c_p)
        + c_p * (math.log(b_p) - math.log(b_q))
        + c_q * (b_q - b_p) / b_p
    )


def _kl_gamma_shape_rate(d_q: float, e_q: float, d_p: float, e_p: float) -> float:
    return (
        (d_q - d_p) * digamma(d_q)
        - log_gamma(d_q)
        + log_gamma(d_p)
        + d_p * (math.log(e_q) - math.log(e_p))
        + d_q * (e_p - e_q) / e_q
    )


def _kl_shape(state: VBState, priors: HyperPriors, e: ExpectationCache) -> float:
    """KL between the Laplace Gaussians of the posterior and prior shape
    functionals; the prior functional is evaluated at the current posterior
    mean of log r (its rate coupling), so the divergence vanishes exactly at
    prior recovery."""
    out = 0.0
    for k, fam in enumerate(priors.families):
        mu_q = float(e.s[k])
        prec_q = float(state.b_hat_s[k]) * trigamma(mu_q)
        mu_p = _shape_laplace_mean(
            priors.log_a0[k], priors.b0_s[k], priors.c0_s[k], float(e.log_r[k]), fam
        )
        prec_p = priors.b0_s[k] * trigamma(mu_p)
        out += 0.5 * (
            math.log(prec_q / prec_p)
            + prec_p / prec_q
            + prec_p * (mu_q - mu_p) ** 2
            - 1.0
        )
    return out


def _kl_total(state: VBState, priors: HyperPriors, e: ExpectationCache) -> float:
    kl = _kl_dirichlet(state.lambda_hat, priors.lambda0)
    kl += _kl_gaussian(state.m_hat, state.tau_hat, priors.m0, priors.tau0)
    kl += _kl_gamma_shape_scale(state.c_hat, state.b_hat, priors.c0_tau, priors.b0_tau)
    for k in range(2):
        kl += _kl_gamma_shape_rate(
            float(state.d_hat[k]), float(state.e_hat[k]), priors.d0[k], priors.e0[k]
        )
    kl += _kl_shape(state, priors, e)
    return kl


def negative_free_energy(
    data,
    gamma: np.ndarray,
    state: VBState,
    priors: HyperPriors,
    expectations_cache: ExpectationCache,
    log_rho: np.ndarray | None = None,
) -> float:
    """Variational lower bound on the log evidence.

    Expected complete-data log-likelihood plus assignment entropy, minus the
    KL divergences of every parameter factor from its prior. Terms of the
    form 0 * (-inf) arising from out-of-support responsibilities contribute
    zero by convention.
    """
    if log_rho is None:
        x = np.asarray(data, dtype=float).ravel()
        log_rho = _log_rho(_DataCache(x), expectations_cache, priors.families)
    with np.errstate(invalid="ignore", divide="ignore"):
        coupled = np.where(gamma > 0, gamma * log_rho, 0.0)
        entropy = np.where(gamma > 0, gamma * np.log(gamma), 0.0)
    value = float(coupled.sum() - entropy.sum()) - _kl_total(state, priors, expectations_cache)
    if not math.isfinite(value):
        raise VBNumericError(f"negative free energy is not finite: {value}")
    return value


def _update_state(stats: SufficientStats, priors: HyperPriors, e_tau: float, e_s) -> VBState:
    lam = update_pi(stats, priors)
    m_hat, tau_hat = update_mu(stats, priors, e_tau)
    c_hat, b_hat = _update_tau_from_stats(
        float(stats.n[0]),
        float(stats.xbar[0]),
        stats.sxx1,
        priors,
        m_hat,
        m_hat * m_hat + 1.0 / tau_hat,
    )
    d_hat, e_hat = update_r(stats, priors, np.asarray(e_s, dtype=float))
    log_a_hat, b_hat_s, c_hat_s = update_shape(stats, priors)
    return VBState(lam, m_hat, tau_hat, c_hat, b_hat, d_hat, e_hat, log_a_hat, b_hat_s, c_hat_s)


def _fit_vb(data, families, cfg: VBFitConfig) -> VBFitResult:
    x = np.ascontiguousarray(np.asarray(data, dtype=float).ravel())
    if x.size < 3:
        raise ValueError("need at least 3 samples")
    if not np.all(np.isfinite(x)):
        raise ValueError("data must be finite")

    start = time.perf_counter()
    priors = default_hyperpriors(*families)
    km = kmeans_1d(x, 3, cfg.seed)
    init_params, gamma0 = init_mixture(x, km, families)
    cache = _DataCache(x)
    stats = sufficient_stats(x, gamma0)
    state = _update_state(
        stats,
        priors,
        e_tau=init_params.comp1.tau,
        e_s=(init_params.comp2.shape, init_params.comp3.shape),
    )
    cache_e = expectations(state, priors)

    trace = []
    converged = False
    iterations = 0
    g2 = g3 = None
    for iterations in range(1, cfg.max_iterations + 1):
        g2, g3, stats, lse_total = _responsibility_pass(cache, cache_e, families)
        nfe = lse_total - _kl_total(state, priors, cache_e)
        if not math.isfinite(nfe):
            raise VBNumericError(
                f"negative free energy diverged at iteration {iterations}: {nfe}"
            )
        trace.append(nfe)
        if len(trace) >= 2 and abs(trace[-1] - trace[-2]) <= cfg.rel_tolerance * (
            1.0 + abs(trace[-1])
        ):
            converged = True
            break
        if iterations == cfg.max_iterations:
            break
        state = _update_state(stats, priors, cache_e.tau, cache_e.s)
        cache_e = expectations(state, priors)
    return VBFitResult(
        state=state,
        expectations=cache_e,
        responsibilities=_assemble_gamma(cache, g2, g3),
        nfe_trace=np.asarray(trace),
        iterations=iterations,
        wall_time_seconds=time.perf_counter() - start,
        converged=converged,
        degenerate_rows=0,
        priors=priors,
    )


def fit_bggm(data, cfg: VBFitConfig | None = None) -> VBFitResult:
    """Variational Bayes fit with Gamma activation components (model bGGM)."""
    return _fit_vb(data, (GAMMA_POS, GAMMA_NEG), cfg or VBFitConfig())


def fit_bgim(data, cfg: VBFitConfig | None = None) -> VBFitResult:
    """Variational Bayes fit with inverse-Gamma activation components (model bGIM)."""
    return _fit_vb(data, (INVGAMMA_POS, INVGAMMA_NEG), cfg or VBFitConfig())
