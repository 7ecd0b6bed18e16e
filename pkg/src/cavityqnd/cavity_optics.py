"""Steady-state coherent-amplitude response of a driven two-sided cavity with atoms.

The cavity has an input mirror (decay rate ``kappa_a``), an output mirror
(``kappa_b``) and an intracavity loss channel (``kappa_loss``).  N atoms in the
probed ground state couple to the mode with strength ``g`` at detuning
``delta``; the drive sits at detuning ``omega`` from cavity resonance.  All
functions here return dimensionless coherent-amplitude ratios relative to the
input drive, so only rate ratios matter and no unit registry is needed.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass


class SingularTransferError(ZeroDivisionError):
    """The cavity response denominator vanished for the given parameters."""


@dataclass(frozen=True)
class CavityParams:
    """Physical cavity and atom rates, all in a common angular-frequency unit.

    Attributes:
        g: atom-cavity coupling strength (> 0).
        kappa_a: input-mirror decay rate.
        kappa_b: output-mirror decay rate.
        kappa_loss: intracavity loss rate to unmonitored modes.
        gamma: atomic excited-state decay rate (> 0).
        delta: atom-cavity detuning.
        omega: drive detuning from cavity resonance.
        eta: homodyne detector efficiency in [0, 1].
    """

    g: float
    kappa_a: float
    kappa_b: float
    kappa_loss: float = 0.0
    gamma: float = 1.0
    delta: float = 0.0
    omega: float = 0.0
    eta: float = 1.0

    def __post_init__(self) -> None:
        if not (self.g > 0):
            raise ValueError(f"coupling g must be positive, got {self.g}")
        if not (self.gamma > 0):
            raise ValueError(f"atomic decay gamma must be positive, got {self.gamma}")
        for name in ("kappa_a", "kappa_b", "kappa_loss"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative, got {getattr(self, name)}")
        if self.kappa_a + self.kappa_b <= 0:
            raise ValueError("at least one mirror must be leaky (kappa_a + kappa_b > 0)")
        if not (0.0 <= self.eta <= 1.0):
            raise ValueError(f"detector efficiency eta must lie in [0, 1], got {self.eta}")

    def kappa_total(self) -> float:
        """Total cavity decay rate: mirrors plus intracavity loss."""
        return self.kappa_a + self.kappa_b + self.kappa_loss


def _response_denominator(params: CavityParams, n_atoms: int) -> complex:
    """kappa/2 - i*omega + g^2 N / (gamma/2 + i(delta - omega)), the cavity pole."""
    atom_term = 0.0 + 0.0j
    if n_atoms:
        atom_term = params.g**2 * n_atoms / complex(params.gamma / 2.0, params.delta - params.omega)
    return complex(params.kappa_total() / 2.0, -params.omega) + atom_term


def cavity_transfer(params: CavityParams, n_atoms: int) -> complex:
    """Intracavity amplitude per unit input amplitude with ``n_atoms`` coupled atoms.

    Returns sqrt(kappa_a) / (kappa/2 - i*omega + g^2 N / (gamma/2 + i(delta - omega))).
    The result is a plain complex number; magnitude and phase follow from
    ``abs()`` and ``cmath.phase()``.
    """
    if n_atoms < 0:
        raise ValueError(f"n_atoms must be nonnegative, got {n_atoms}")
    denom = _response_denominator(params, n_atoms)
    if denom == 0:
        raise SingularTransferError("cavity response is singular (zero total linewidth on resonance)")
    return cmath.sqrt(params.kappa_a) / denom


def transmission_amplitude(params: CavityParams, n_atoms: int) -> complex:
    """Transmitted amplitude per unit input amplitude: -sqrt(kappa_b) * cavity_transfer."""
    return -cmath.sqrt(params.kappa_b) * cavity_transfer(params, n_atoms)


def displacement_sq(params: CavityParams, n_atoms: int, theta_n: float) -> float:
    """Squared coherent-amplitude separation between the N-atom and empty-cavity outputs.

    Equals N^2 * g^2 * kappa_b / (gamma * (kappa^2/4 + omega^2)) * theta_n, where
    ``theta_n`` is the per-atom scattering probability accumulated over the
    probe pulse.  For the resonant, mirror-matched cavity this reduces to
    2 N^2 theta g^2 / (kappa gamma), which fixes the homodyne centers at
    x_N = 2 N sqrt(theta g^2 / (kappa gamma)).
    """
    if n_atoms < 0:
        raise ValueError(f"n_atoms must be nonnegative, got {n_atoms}")
    if theta_n < 0:
        raise ValueError(f"scattering probability must be nonnegative, got {theta_n}")
    kappa = params.kappa_total()
    return n_atoms**2 * params.g**2 * params.kappa_b / (params.gamma * (kappa**2 / 4.0 + params.omega**2)) * theta_n


def effective_cooperativity(params: CavityParams) -> float:
    """Cooperativity g^2/(kappa*gamma) reduced by mirror mismatch and detection loss.

    Returns (g^2 / (kappa gamma)) * (2 kappa_b / kappa) * eta.  The mirror
    factor is 1 when the output mirror matches all other losses
    (kappa_b = kappa_a + kappa_loss); this single number is the only cavity
    input the outcome-statistics and optimization layers need.
    """
    kappa = params.kappa_total()
    bare = params.g**2 / (kappa * params.gamma)
    return bare * (2.0 * params.kappa_b / kappa) * params.eta
