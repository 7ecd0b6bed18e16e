"""Homodyne-outcome probability densities for N atoms with spontaneous-emission branches.

The integrated homodyne record is a dimensionless quadrature x.  An empty
cavity gives the vacuum Gaussian p0(x) = exp(-x^2)/sqrt(pi) (variance 1/2);
N atoms displace it to x_N = 2*N*sqrt(theta*cooperativity).  Each atom
scatters a photon with probability theta during the pulse, truncating its
displacement at a random fraction of x_1 and removing it from the monitored
subspace; the resulting decay branches make the outcome density a mixture of
the displaced Gaussian (no decay, weight exp(-N*theta)) and smeared decay
terms (total weight 1 - exp(-N*theta)).

Cumulative branch masses (and hence window masses and success probabilities)
are evaluated by exchanging the order of the decay-time and outcome
integrals, so the inner Gaussian integrates to an erf and one well-behaved
1-D integral over the decay clock remains.  That integral runs on panelized
Gauss-Legendre nodes sized to the erf transition scale, shared across all
outcome points, which makes CDF evaluation vectorized and cheap inside root
finds and optimizers.  Densities themselves go through adaptive quadrature
with the transition region passed as breakpoints.  Both routes hold an
absolute error budget of ~1e-10.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.special import erf

_SQRT_PI = math.sqrt(math.pi)
# Beyond 9 quadrature widths the Gaussian factor is < 1e-35; integration
# segments outside this reach of a window edge contribute nothing at 1e-10.
_TAIL_REACH = 9.0

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(48)


class UndefinedConditionalError(ZeroDivisionError):
    """Conditioning event has zero probability; the fidelity is undefined."""


class PathologicalWindowError(ValueError):
    """The repeated-scheme bound denominator is nonpositive for this window."""


@dataclass(frozen=True)
class PulseConfig:
    """Probe-pulse operating point: per-atom scattering probability and cooperativity.

    ``cooperativity`` is the effective g^2/(kappa*gamma) after mirror-matching
    and detection-efficiency factors (see cavity_optics.effective_cooperativity).
    """

    theta: float
    cooperativity: float

    def __post_init__(self) -> None:
        if self.theta < 0:
            raise ValueError(f"scattering probability theta must be nonnegative, got {self.theta}")
        if not (self.cooperativity > 0):
            raise ValueError(f"cooperativity must be positive, got {self.cooperativity}")

    def x_center(self, n: int) -> float:
        """Mean homodyne outcome with n atoms and no decay: 2*n*sqrt(theta*C)."""
        if n < 0:
            raise ValueError(f"atom count must be nonnegative, got {n}")
        return 2.0 * n * math.sqrt(self.theta * self.cooperativity)

    @property
    def x1(self) -> float:
        return self.x_center(1)


@dataclass(frozen=True)
class AcceptanceWindow:
    """Homodyne acceptance interval (x_a, x_b); infinite bounds are allowed."""

    x_a: float
    x_b: float

    def __post_init__(self) -> None:
        if math.isnan(self.x_a) or math.isnan(self.x_b):
            raise ValueError("window bounds must not be NaN")
        if not (self.x_a < self.x_b):
            raise ValueError(f"window requires x_a < x_b, got ({self.x_a}, {self.x_b})")


def _binomial_prior(m: int) -> tuple[float, ...]:
    return tuple(math.comb(m, n) / 2.0**m for n in range(m + 1))


@dataclass(frozen=True)
class OutcomeModel:
    """Mixture over atom numbers: pulse operating point plus prior weights.

    The default prior (1/4, 1/2, 1/4) is the two-atom equal-superposition
    case.  A length-(M+1) prior reuses the machinery for M atoms; decay
    branches are only available for N <= 2, so for M >= 3 the mixture drops
    the (tiny) decay part of the top components.
    """

    pulse: PulseConfig
    prior: tuple[float, ...] = (0.25, 0.5, 0.25)

    def __post_init__(self) -> None:
        if len(self.prior) < 3:
            raise ValueError("prior must cover at least N = 0, 1, 2")
        if any(p < 0 for p in self.prior):
            raise ValueError(f"prior components must be nonnegative, got {self.prior}")
        if abs(sum(self.prior) - 1.0) > 1e-9:
            raise ValueError(f"prior must sum to 1, got sum {sum(self.prior)}")

    @classmethod
    def for_atoms(cls, m: int, pulse: PulseConfig) -> "OutcomeModel":
        """Binomial(M, 1/2) prior for M atoms each prepared in (|g>+|f>)/sqrt(2)."""
        if m < 2:
            raise ValueError(f"need at least two atoms, got {m}")
        return cls(pulse=pulse, prior=_binomial_prior(m))


def gaussian_cdf(y):
    """CDF of the variance-1/2 Gaussian p0: integral of p0 from -inf to y."""
    return 0.5 * (1.0 + erf(y))


def p0(x):
    """Empty-cavity homodyne density exp(-x^2)/sqrt(pi); accepts scalars or arrays."""
    return np.exp(-np.square(x)) / _SQRT_PI


def p_no_decay(n: int, x, pulse: PulseConfig):
    """No-decay branch density for n atoms: exp(-n*theta) * p0(x - x_n).

    Sub-normalized by design; its total mass is the no-decay probability
    exp(-n*theta).  Valid for any n >= 0.
    """
    return math.exp(-n * pulse.theta) * p0(np.asarray(x, dtype=float) - pulse.x_center(n))


def _gl_nodes_on(lo: float, hi: float, max_width: float) -> tuple[np.ndarray, np.ndarray]:
    """Panelized Gauss-Legendre nodes and weights on [lo, hi]."""
    n_panels = max(1, math.ceil((hi - lo) / max_width))
    edges = np.linspace(lo, hi, n_panels + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    halves = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mids[:, None] + halves[:, None] * _GL_NODES[None, :]).ravel()
    weights = (halves[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights


@lru_cache(maxsize=128)
def _decay_grid(theta: float, cooperativity: float):
    """Shared decay-clock quadrature grid for both decay branches.

    Returns (displacements, weights) such that the cumulative decay-branch
    masses are F_1(x) = sum w1 * Phi(x - d1) and F_2(x) = sum w2 * Phi(x - d2).
    Panel width resolves both the erf transition scale theta/x_1 and the unit
    scale of the exponential decay weight.
    """
    x1 = 2.0 * math.sqrt(theta * cooperativity)
    c = x1 / theta
    width = min(6.0 / c, 1.0)

    # Single decay among one atom: clock t in [0, theta], weight e^-t.
    t1, w1 = _gl_nodes_on(0.0, theta, width)
    disp1 = c * t1
    weight1 = w1 * np.exp(-t1)

    # Two atoms, exactly one decay: surviving atom adds a full x_1.
    disp2a = c * (t1 + theta)
    weight2a = 2.0 * math.exp(-theta) * weight1
    # Two atoms, both decay: summed clocks s in [0, 2*theta] with the
    # in-square cross-section min(s, 2*theta - s); split panels at the kink.
    s_lo, ws_lo = _gl_nodes_on(0.0, theta, width)
    s_hi, ws_hi = _gl_nodes_on(theta, 2.0 * theta, width)
    s = np.concatenate([s_lo, s_hi])
    ws = np.concatenate([ws_lo, ws_hi])
    disp2b = c * s
    weight2b = ws * np.exp(-s) * np.minimum(s, 2.0 * theta - s)

    disp2 = np.concatenate([disp2a, disp2b])
    weight2 = np.concatenate([weight2a, weight2b])
    return disp1, weight1, disp2, weight2


def decay_branch_cdfs(x, pulse: PulseConfig) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative masses of the decay branches for N=1 and N=2 up to each x.

    Vectorized over x; the branch totals are 1 - exp(-theta) and
    1 - exp(-2*theta).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if pulse.theta == 0.0:
        zero = np.zeros_like(x)
        return zero, zero.copy()
    disp1, weight1, disp2, weight2 = _decay_grid(pulse.theta, pulse.cooperativity)
    cdf1 = gaussian_cdf(x[:, None] - disp1[None, :]) @ weight1
    cdf2 = gaussian_cdf(x[:, None] - disp2[None, :]) @ weight2
    return cdf1, cdf2


def _branch_cdf_at(x: float, pulse: PulseConfig, branch: int) -> float:
    if math.isinf(x):
        if x > 0:
            return 1.0 - math.exp(-branch * pulse.theta)
        return 0.0
    cdfs = decay_branch_cdfs(x, pulse)
    return float(cdfs[branch - 1][0])


def window_mass_no_decay(n: int, window: AcceptanceWindow, pulse: PulseConfig) -> float:
    """Integral of the no-decay branch for n atoms over the window (closed form)."""
    xn = pulse.x_center(n)
    hi = 1.0 if math.isinf(window.x_b) else gaussian_cdf(window.x_b - xn)
    lo = 0.0 if math.isinf(window.x_a) else gaussian_cdf(window.x_a - xn)
    return math.exp(-n * pulse.theta) * (hi - lo)


def window_mass_decay_one(window: AcceptanceWindow, pulse: PulseConfig) -> float:
    """Integral of the single-atom decay branch over the window."""
    if pulse.theta == 0.0:
        return 0.0
    return _branch_cdf_at(window.x_b, pulse, 1) - _branch_cdf_at(window.x_a, pulse, 1)


def window_mass_decay_two(window: AcceptanceWindow, pulse: PulseConfig) -> float:
    """Integral of the two-atom at-least-one-decay branch over the window."""
    if pulse.theta == 0.0:
        return 0.0
    return _branch_cdf_at(window.x_b, pulse, 2) - _branch_cdf_at(window.x_a, pulse, 2)


def _quad_with_bump(f, lo: float, hi: float, bump: tuple[float, float]) -> float:
    pts = [p for p in bump if lo < p < hi]
    return quad(f, lo, hi, points=pts or None, epsabs=1e-10, epsrel=1e-12, limit=200)[0]


def p_decay_one(x, pulse: PulseConfig):
    """Decay branch density for one atom.

    Integrates exp(-t) * p0(x - x_1*t/theta) over decay clock t in [0, theta]
    by adaptive quadrature; total mass is 1 - exp(-theta).  Returns 0 when
    theta = 0 (the branch has zero measure).
    """
    if np.ndim(x) > 0:
        return np.array([p_decay_one(xi, pulse) for xi in np.asarray(x, dtype=float)])
    x = float(x)
    theta = pulse.theta
    if theta == 0.0:
        return 0.0
    c = pulse.x1 / theta

    def integrand(t):
        return math.exp(-t) * math.exp(-((x - c * t) ** 2)) / _SQRT_PI

    bump = ((x - _TAIL_REACH) / c, (x + _TAIL_REACH) / c)
    return _quad_with_bump(integrand, 0.0, theta, bump)


def p_decay_two(x, pulse: PulseConfig):
    """Decay branch density for two atoms (at least one decay).

    Sum of the exactly-one-decay term, where the surviving atom contributes a
    full x_1 displacement, and the both-decay term reduced to a single
    integral over the summed decay clocks.  Total mass is 1 - exp(-2*theta).
    """
    if np.ndim(x) > 0:
        return np.array([p_decay_two(xi, pulse) for xi in np.asarray(x, dtype=float)])
    x = float(x)
    theta = pulse.theta
    if theta == 0.0:
        return 0.0
    c = pulse.x1 / theta

    def one_decay(t):
        return math.exp(-theta - t) * math.exp(-((x - c * (t + theta)) ** 2)) / _SQRT_PI

    bump_one = ((x - _TAIL_REACH) / c - theta, (x + _TAIL_REACH) / c - theta)
    one = 2.0 * _quad_with_bump(one_decay, 0.0, theta, bump_one)

    def both_decay(s):
        return math.exp(-s) * min(s, 2.0 * theta - s) * math.exp(-((x - c * s) ** 2)) / _SQRT_PI

    bump_both = ((x - _TAIL_REACH) / c, (x + _TAIL_REACH) / c)
    pts = [p for p in (*bump_both, theta) if 0.0 < p < 2.0 * theta]
    both = quad(both_decay, 0.0, 2.0 * theta, points=sorted(pts) or None, epsabs=1e-10, epsrel=1e-12, limit=200)[0]
    return one + both


_DECAY_DENSITY = {1: p_decay_one, 2: p_decay_two}
_DECAY_MASS = {1: window_mass_decay_one, 2: window_mass_decay_two}


def p_total(x, model: OutcomeModel):
    """Prior-weighted mixture density over atom numbers.

    Includes decay branches for N in {1, 2}; for priors extending beyond
    N = 2 only the no-decay part of the top components enters (their decay
    branches have no closed treatment here), leaving the mixture short by
    prior_N * (1 - exp(-N*theta)) for each such N.
    """
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x, dtype=float)
    for n, weight in enumerate(model.prior):
        if weight == 0.0:
            continue
        total = total + weight * p_no_decay(n, x, model.pulse)
        if n in _DECAY_DENSITY:
            total = total + weight * _DECAY_DENSITY[n](x, model.pulse)
    return total if total.ndim else float(total)


def mixture_total_mass(model: OutcomeModel) -> float:
    """Total mass of the mixture; 1 unless the prior extends past N=2 with theta > 0."""
    missing = sum(
        weight * (1.0 - math.exp(-n * model.pulse.theta))
        for n, weight in enumerate(model.prior)
        if n > 2
    )
    return 1.0 - missing


def mixture_cdf(x, model: OutcomeModel) -> np.ndarray:
    """CDF of the prior-weighted mixture at each x (vectorized)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    pulse = model.pulse
    total = np.zeros_like(x)
    for n, weight in enumerate(model.prior):
        if weight == 0.0:
            continue
        total += weight * math.exp(-n * pulse.theta) * gaussian_cdf(x - pulse.x_center(n))
    d1, d2 = decay_branch_cdfs(x, pulse)
    total += model.prior[1] * d1
    if len(model.prior) > 2:
        total += model.prior[2] * d2
    return total


def _mixture_cdf_scalar(x: float, model: OutcomeModel) -> float:
    if math.isinf(x):
        return mixture_total_mass(model) if x > 0 else 0.0
    return float(mixture_cdf(x, model)[0])


def _window_mass_total(window: AcceptanceWindow, model: OutcomeModel) -> float:
    return _mixture_cdf_scalar(window.x_b, model) - _mixture_cdf_scalar(window.x_a, model)


def success_probability(window: AcceptanceWindow, model: OutcomeModel) -> float:
    """Probability that the homodyne outcome lands in the acceptance window."""
    return min(1.0, max(0.0, _window_mass_total(window, model)))


def fidelity_conditional(window: AcceptanceWindow, model: OutcomeModel) -> float:
    """Probability of (one atom, no decay) given an accepted outcome.

    This is the fidelity of the entangled state heralded by a single accepted
    measurement.
    """
    ps = _window_mass_total(window, model)
    if ps <= 0.0:
        raise UndefinedConditionalError("acceptance window has zero success probability")
    good = model.prior[1] * window_mass_no_decay(1, window, model.pulse)
    return min(1.0, good / ps)


def fidelity_repeated_bound(window: AcceptanceWindow, model: OutcomeModel) -> float:
    """Fidelity lower bound for the repeat-until-success protocol.

    Rejections below x_a are attributed to N = 0 and above x_b to undecayed
    N = 2 (both safely re-preparable); everything else counts against the
    eventual accepted state, giving
    prior_1 * M_ND1(window) / (1 - prior_0 * M_0(left tail) - prior_2 * M_ND2(right tail)).
    """
    pulse = model.pulse
    numerator = model.prior[1] * window_mass_no_decay(1, window, pulse)
    left = 0.0 if math.isinf(window.x_a) else gaussian_cdf(window.x_a)
    x2 = pulse.x_center(2)
    right = 0.0 if math.isinf(window.x_b) else math.exp(-2.0 * pulse.theta) * (1.0 - gaussian_cdf(window.x_b - x2))
    denominator = 1.0 - model.prior[0] * left - model.prior[2] * right
    if denominator <= 0.0:
        raise PathologicalWindowError(f"bound denominator is {denominator}; window rejects everything")
    return min(1.0, numerator / denominator)
