"""Monte Carlo simulation of the homodyne record and the repeat-until-success protocol.

The generative model per attempt: each of M atoms lands in the monitored
ground state with probability 1/2 (fresh equal-superposition preparation),
every monitored atom carries an Exp(1) decay clock in accumulated scattering
units, contributes x_1 * min(tau, theta)/theta of displacement, and the
homodyne outcome adds vacuum noise of variance 1/2.  These rules reproduce
the analytic branch densities of :mod:`cavityqnd.distributions` exactly for
N <= 2 and extend them consistently to more atoms, which makes this module
the independent stochastic oracle for the quadrature route.

Randomness comes from numpy's PCG64 via ``default_rng``; runs are split into
fixed-size chunks seeded by ``SeedSequence(seed).spawn`` so aggregate
statistics do not depend on how chunks are scheduled across workers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import AcceptanceWindow, PulseConfig

RNG_ALGORITHM = f"numpy-PCG64 (numpy {np.__version__})"

_CHUNK = 1 << 16
_NOISE_SIGMA = math.sqrt(0.5)


def _default_accepted(m: int) -> frozenset[int]:
    # Pair target for two atoms; the symmetric-state pair {1, 2} for three.
    if m == 2:
        return frozenset({1})
    if m == 3:
        return frozenset({1, 2})
    raise ValueError(f"no default accepted_n for M={m}; pass it explicitly")


@dataclass(frozen=True)
class ProtocolConfig:
    """Settings for one measurement attempt and the surrounding repeat loop."""

    n_atoms: int
    pulse: PulseConfig
    window: AcceptanceWindow
    accepted_n: frozenset[int] | None = None
    max_attempts: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_atoms < 2:
            raise ValueError(f"need at least two atoms, got {self.n_atoms}")
        if self.max_attempts < 1:
            raise ValueError(f"max_attempts must be >= 1, got {self.max_attempts}")
        accepted = self.accepted_n
        if accepted is None:
            accepted = _default_accepted(self.n_atoms)
            object.__setattr__(self, "accepted_n", accepted)
        if not frozenset(accepted) <= frozenset(range(self.n_atoms + 1)):
            raise ValueError(f"accepted_n {set(accepted)} outside 0..{self.n_atoms}")


@dataclass(frozen=True)
class AttemptRecord:
    """Microscopic sample behind one homodyne outcome."""

    true_n: int
    decay_flags: tuple[bool, ...]
    decay_times: tuple[float, ...]
    outcome_x: float
    accepted: bool


@dataclass(frozen=True)
class ProtocolStats:
    """Aggregates over repeat-until-success runs.

    ``attempts_*`` cover runs that terminated in acceptance; runs that hit
    the attempt cap are censored and only counted in ``n_censored``.
    ``acceptance_rate`` is the per-attempt empirical acceptance probability.
    Fields ending in ``_3sigma`` are three-standard-error confidence radii.
    """

    n_runs: int
    n_censored: int
    attempts_mean: float
    attempts_variance: float
    attempts_mean_3sigma: float
    acceptance_rate: float
    conditional_fidelity: float
    conditional_fidelity_3sigma: float


@dataclass(frozen=True)
class BatchSample:
    """Vectorized draw of independent attempts (no repeat loop)."""

    true_n: np.ndarray
    any_decay: np.ndarray
    outcome_x: np.ndarray


@dataclass(frozen=True)
class HistogramResult:
    """Binned outcome density with per-bin Poisson standard errors."""

    bin_edges: np.ndarray
    counts: np.ndarray
    density: np.ndarray
    sigma: np.ndarray
    n_samples: int
    n_conditioned: int
    condition_n: int | None


def _draw_attempts(m: int, pulse: PulseConfig, rng: np.random.Generator, n: int):
    """Sample n attempts; returns (in_f, decay_times, decayed, outcome_x)."""
    in_f = rng.random((n, m)) < 0.5
    tau = rng.exponential(size=(n, m))
    theta = pulse.theta
    if theta == 0.0:
        # Exact no-decay limit: a monitored atom contributes its full displacement.
        decayed = np.zeros((n, m), dtype=bool)
        contrib = in_f.astype(float)
    else:
        decayed = in_f & (tau < theta)
        contrib = np.where(in_f, np.minimum(tau, theta) / theta, 0.0)
    mean = pulse.x1 * contrib.sum(axis=1)
    outcome = rng.normal(mean, _NOISE_SIGMA)
    decay_times = np.where(in_f, tau, np.inf)
    return in_f, decay_times, decayed, outcome


def sample_attempt(config: ProtocolConfig, rng: np.random.Generator) -> AttemptRecord:
    """Draw a single measurement attempt from the generative model."""
    in_f, times, decayed, outcome = _draw_attempts(config.n_atoms, config.pulse, rng, 1)
    x = float(outcome[0])
    return AttemptRecord(
        true_n=int(in_f[0].sum()),
        decay_flags=tuple(bool(v) for v in decayed[0]),
        decay_times=tuple(float(v) for v in times[0]),
        outcome_x=x,
        accepted=bool(config.window.x_a < x < config.window.x_b),
    )


def _chunk_rngs(seed: int, n_chunks: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n_chunks)]


def sample_batch(config: ProtocolConfig, n_samples: int) -> BatchSample:
    """Draw independent attempts in chunks; the backbone of histogram comparisons."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    n_chunks = (n_samples + _CHUNK - 1) // _CHUNK
    rngs = _chunk_rngs(config.seed, n_chunks)
    true_n = np.empty(n_samples, dtype=np.int64)
    any_decay = np.empty(n_samples, dtype=bool)
    outcome = np.empty(n_samples, dtype=float)
    for i, rng in enumerate(rngs):
        lo = i * _CHUNK
        hi = min(lo + _CHUNK, n_samples)
        in_f, _, decayed, x = _draw_attempts(config.n_atoms, config.pulse, rng, hi - lo)
        true_n[lo:hi] = in_f.sum(axis=1)
        any_decay[lo:hi] = decayed.any(axis=1)
        outcome[lo:hi] = x
    return BatchSample(true_n=true_n, any_decay=any_decay, outcome_x=outcome)


def run_protocol(config: ProtocolConfig, n_runs: int) -> ProtocolStats:
    """Repeat the measurement with fresh re-preparation until acceptance.

    Each run draws attempts until the outcome lands in the window or the
    attempt cap is reached; every rejection discards the atoms' state and
    re-prepares the product state.  An accepted run is scored as good when
    its true atom number is in ``accepted_n`` and no monitored atom decayed.
    """
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    x_a, x_b = config.window.x_a, config.window.x_b
    accepted_set = np.zeros(config.n_atoms + 1, dtype=bool)
    for n in config.accepted_n:
        accepted_set[n] = True

    total_attempts = 0
    sum_attempts = 0
    sum_attempts_sq = 0
    n_accepted = 0
    n_good = 0
    n_censored = 0

    n_chunks = (n_runs + _CHUNK - 1) // _CHUNK
    rngs = _chunk_rngs(config.seed, n_chunks)
    for i, rng in enumerate(rngs):
        count = min(_CHUNK, n_runs - i * _CHUNK)
        active = np.arange(count)
        attempts = np.zeros(count, dtype=np.int64)
        for _ in range(config.max_attempts):
            if active.size == 0:
                break
            in_f, _, decayed, x = _draw_attempts(config.n_atoms, config.pulse, rng, active.size)
            attempts[active] += 1
            total_attempts += active.size
            hit = (x > x_a) & (x < x_b)
            if hit.any():
                done = active[hit]
                true_n = in_f[hit].sum(axis=1)
                good = accepted_set[true_n] & ~decayed[hit].any(axis=1)
                n_accepted += done.size
                n_good += int(good.sum())
                sum_attempts += int(attempts[done].sum())
                sum_attempts_sq += int((attempts[done] ** 2).sum())
                active = active[~hit]
        n_censored += active.size

    if n_accepted == 0:
        raise RuntimeError("no run terminated in acceptance; widen the window or raise max_attempts")
    mean = sum_attempts / n_accepted
    if n_accepted > 1:
        var = (sum_attempts_sq - n_accepted * mean**2) / (n_accepted - 1)
        var = max(var, 0.0)
    else:
        var = 0.0
    fidelity = n_good / n_accepted
    return ProtocolStats(
        n_runs=n_runs,
        n_censored=n_censored,
        attempts_mean=mean,
        attempts_variance=var,
        attempts_mean_3sigma=3.0 * math.sqrt(var / n_accepted),
        acceptance_rate=n_accepted / total_attempts,
        conditional_fidelity=fidelity,
        conditional_fidelity_3sigma=3.0 * math.sqrt(fidelity * (1.0 - fidelity) / n_accepted),
    )


def histogram(
    config: ProtocolConfig,
    n_samples: int,
    bins: np.ndarray,
    condition_n: int | None = None,
) -> HistogramResult:
    """Normalized outcome histogram, optionally conditioned on the true atom number.

    Conditioned histograms are normalized within the condition, so they
    estimate the branch density p_N / (its total mass).  Per-bin errors are
    Poisson: sqrt(count) / (n * width).
    """
    bins = np.asarray(bins, dtype=float)
    if bins.ndim != 1 or bins.size < 2 or not np.all(np.diff(bins) > 0):
        raise ValueError("bins must be a strictly increasing 1-D grid")
    batch = sample_batch(config, n_samples)
    x = batch.outcome_x
    if condition_n is not None:
        x = x[batch.true_n == condition_n]
    n_kept = int(x.size)
    counts, _ = np.histogram(x, bins)
    widths = np.diff(bins)
    norm = max(n_kept, 1) * widths
    return HistogramResult(
        bin_edges=bins,
        counts=counts,
        density=counts / norm,
        sigma=np.sqrt(counts) / norm,
        n_samples=n_samples,
        n_conditioned=n_kept,
        condition_n=condition_n,
    )
