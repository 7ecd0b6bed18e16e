"""Exact state-vector simulation of the measurement-based CONTROL-NOT gate.

Each atom carries five basis states, ordered (g0, g1, f0, f1, o): two stable
levels g and f, each doubled by a qubit degree of freedom, plus the decay
sink o.  Two-atom states live in the 25-dimensional product basis with atom 0
as control and atom 1 as target; index = 5 * i_control + i_target.

The gate consumes one level-entangled pair: starting from the qubits stored
in the g levels, the level pair is driven to (|gf> + |fg>)/sqrt(2) while the
qubit amplitudes ride along untouched.  Level swaps, level measurements, a
qubit swap conditioned on the measured level, and a pi/2 level pulse then
realize CNOT on the qubits; the residual branch dependence is removed by the
classically conditioned corrections in :data:`CORRECTION_TABLE`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

BASIS_LABELS = ("g0", "g1", "f0", "f1", "o")
_DIM = len(BASIS_LABELS)
_INDEX = {label: i for i, label in enumerate(BASIS_LABELS)}
_G_STATES = (_INDEX["g0"], _INDEX["g1"])
_F_STATES = (_INDEX["f0"], _INDEX["f1"])
_NORM_TOL = 1e-12
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def _validated(amplitudes, dim: int) -> np.ndarray:
    vec = np.asarray(amplitudes, dtype=complex)
    if vec.shape != (dim,):
        raise ValueError(f"expected a length-{dim} amplitude vector, got shape {vec.shape}")
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > _NORM_TOL:
        raise ValueError(f"state norm {norm} deviates from 1 beyond {_NORM_TOL}")
    return vec


@dataclass(frozen=True)
class AtomState:
    """Single-atom amplitudes over (g0, g1, f0, f1, o)."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "amplitudes", _validated(self.amplitudes, _DIM))


@dataclass(frozen=True)
class TwoAtomState:
    """Two-atom amplitudes over the 25-state product basis (control first)."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "amplitudes", _validated(self.amplitudes, _DIM * _DIM))

    @classmethod
    def from_product(cls, control: AtomState, target: AtomState) -> "TwoAtomState":
        return cls(np.kron(control.amplitudes, target.amplitudes))

    @classmethod
    def from_qubits(cls, qubit_amplitudes) -> "TwoAtomState":
        """Lift a two-qubit state (amplitudes for |00>,|01>,|10>,|11>) onto the g levels."""
        q = np.asarray(qubit_amplitudes, dtype=complex).reshape(2, 2)
        vec = np.zeros(_DIM * _DIM, dtype=complex)
        for a in range(2):
            for b in range(2):
                vec[_DIM * _INDEX[f"g{a}"] + _INDEX[f"g{b}"]] = q[a, b]
        return cls(vec)

    def overlap(self, other: "TwoAtomState") -> complex:
        return complex(np.vdot(other.amplitudes, self.amplitudes))


@dataclass(frozen=True)
class MeasurementOutcome:
    """Level-measurement record: which atom, which level, Born probability, post-state."""

    atom_index: int
    result: str
    probability: float
    state: TwoAtomState


def _apply_single(state: TwoAtomState, matrix: np.ndarray, atom_index: int) -> TwoAtomState:
    if atom_index not in (0, 1):
        raise IndexError(f"atom index must be 0 or 1, got {atom_index}")
    amps = state.amplitudes.reshape(_DIM, _DIM)
    if atom_index == 0:
        amps = matrix @ amps
    else:
        amps = amps @ matrix.T
    return TwoAtomState(amps.reshape(-1))


def _permutation(i: int, j: int) -> np.ndarray:
    mat = np.eye(_DIM, dtype=complex)
    mat[[i, j]] = mat[[j, i]]
    return mat


_SWAP_F1_G1 = _permutation(_INDEX["f1"], _INDEX["g1"])
_LEVEL_SWAP = _permutation(_INDEX["g0"], _INDEX["f0"]) @ _permutation(_INDEX["g1"], _INDEX["f1"])
_QUBIT_SWAP = {"g": _permutation(*_G_STATES), "f": _permutation(*_F_STATES)}

# pi/2 pulse between the levels, acting identically on both qubit components:
# |g> -> (|g> + |f>)/sqrt(2), |f> -> (-|g> + |f>)/sqrt(2); |o> untouched.
_PI_HALF = np.eye(_DIM, dtype=complex)
for _b in range(2):
    _g, _f = _G_STATES[_b], _F_STATES[_b]
    _PI_HALF[_g, _g] = _INV_SQRT2
    _PI_HALF[_g, _f] = -_INV_SQRT2
    _PI_HALF[_f, _g] = _INV_SQRT2
    _PI_HALF[_f, _f] = _INV_SQRT2


def prepare_entangled_levels(qubit_state: TwoAtomState) -> TwoAtomState:
    """Map |Phi_q> on the g levels to |Phi_q> (x) (|gf> + |fg>)/sqrt(2).

    The qubit amplitudes are carried unchanged onto the level-entangled
    manifold; input support outside the g levels is a domain error.
    """
    amps = qubit_state.amplitudes.reshape(_DIM, _DIM)
    mask = np.ones((_DIM, _DIM), dtype=bool)
    mask[np.ix_(_G_STATES, _G_STATES)] = False
    if np.any(np.abs(amps[mask]) > _NORM_TOL):
        raise ValueError("input must be supported on the g levels of both atoms")
    out = np.zeros((_DIM, _DIM), dtype=complex)
    for a in range(2):
        for b in range(2):
            amp = amps[_INDEX[f"g{a}"], _INDEX[f"g{b}"]] * _INV_SQRT2
            out[_INDEX[f"g{a}"], _INDEX[f"f{b}"]] += amp
            out[_INDEX[f"f{a}"], _INDEX[f"g{b}"]] += amp
    return TwoAtomState(out.reshape(-1))


def swap_f1_g1(state: TwoAtomState, atom_index: int) -> TwoAtomState:
    """Interchange |f1> and |g1> on one atom (an involution)."""
    return _apply_single(state, _SWAP_F1_G1, atom_index)


def level_swap(state: TwoAtomState, atom_index: int) -> TwoAtomState:
    """Full pi pulse between the levels: |g_b> <-> |f_b| for both qubit values."""
    return _apply_single(state, _LEVEL_SWAP, atom_index)


def conditional_qubit_swap(state: TwoAtomState, atom_index: int, level: str) -> TwoAtomState:
    """Interchange the two qubit states within one level of one atom."""
    if level not in _QUBIT_SWAP:
        raise ValueError(f"level must be 'g' or 'f', got {level!r}")
    return _apply_single(state, _QUBIT_SWAP[level], atom_index)


def level_pi_half_pulse(state: TwoAtomState, atom_index: int) -> TwoAtomState:
    """Qubit-preserving pi/2 rotation between the g and f levels."""
    return _apply_single(state, _PI_HALF, atom_index)


def state_phase(state: TwoAtomState, atom_index: int, basis_label: str, phase: complex = -1.0) -> TwoAtomState:
    """Multiply the amplitude of one single-atom basis state by a phase."""
    if basis_label not in _INDEX:
        raise ValueError(f"unknown basis state {basis_label!r}")
    mat = np.eye(_DIM, dtype=complex)
    mat[_INDEX[basis_label], _INDEX[basis_label]] = phase
    return _apply_single(state, mat, atom_index)


def measure_level(
    state: TwoAtomState,
    atom_index: int,
    rng: np.random.Generator | None = None,
    forced: str | None = None,
) -> MeasurementOutcome:
    """Projective measurement of one atom's level (g vs f), Born rule.

    ``forced`` selects a branch deterministically for exhaustive enumeration;
    forcing a zero-probability branch is a domain error.  Any population of
    the decay sink |o> belongs to neither outcome and is rejected.
    """
    if atom_index not in (0, 1):
        raise IndexError(f"atom index must be 0 or 1, got {atom_index}")
    amps = state.amplitudes.reshape(_DIM, _DIM)
    probs = {}
    for result, states in (("g", _G_STATES), ("f", _F_STATES)):
        sel = amps[list(states), :] if atom_index == 0 else amps[:, list(states)]
        probs[result] = float(np.sum(np.abs(sel) ** 2))
    if abs(probs["g"] + probs["f"] - 1.0) > 1e-9:
        raise ValueError("decay-sink population present; level measurement is not defined")
    if forced is not None:
        if forced not in probs:
            raise ValueError(f"forced outcome must be 'g' or 'f', got {forced!r}")
        result = forced
        if probs[result] <= _NORM_TOL**2:
            raise ValueError(f"forced outcome {forced!r} has zero probability")
    else:
        if rng is None:
            raise ValueError("provide an rng for random measurement or force an outcome")
        result = "g" if rng.random() < probs["g"] else "f"
    keep = _G_STATES if result == "g" else _F_STATES
    post = np.zeros_like(amps)
    if atom_index == 0:
        post[list(keep), :] = amps[list(keep), :]
    else:
        post[:, list(keep)] = amps[:, list(keep)]
    post = post / math.sqrt(probs[result])
    return MeasurementOutcome(atom_index=atom_index, result=result, probability=probs[result], state=TwoAtomState(post.reshape(-1)))


# Classically conditioned corrections keyed by (control result, target result).
# Derived requirement: every branch of the protocol must end in
# CNOT|Phi_q> (x) |gg> with no residual phases.  Entries are executed in order.
CORRECTION_TABLE: dict[tuple[str, str], tuple[tuple[str, ...], ...]] = {
    ("g", "g"): (("phase", "control", "g0"),),
    ("g", "f"): (("level_swap", "target"),),
    ("f", "g"): (("phase", "control", "f1"), ("level_swap", "control")),
    ("f", "f"): (("level_swap", "control"), ("level_swap", "target")),
}

_ATOM_INDEX = {"control": 0, "target": 1}


def apply_corrections(state: TwoAtomState, branch: tuple[str, str], table=None) -> TwoAtomState:
    """Run the correction sequence for a measurement-record pair."""
    table = CORRECTION_TABLE if table is None else table
    for op in table[branch]:
        kind, atom = op[0], _ATOM_INDEX[op[1]]
        if kind == "level_swap":
            state = level_swap(state, atom)
        elif kind == "phase":
            state = state_phase(state, atom, op[2])
        elif kind == "qubit_swap":
            state = conditional_qubit_swap(state, atom, op[2])
        else:
            raise ValueError(f"unknown correction op {kind!r}")
    return state


@dataclass(frozen=True)
class CnotBranch:
    """One measurement branch of the gate: records, joint probability, final state."""

    control_result: str
    target_result: str
    probability: float
    state: TwoAtomState


def _run_branch(prepared: TwoAtomState, control_result: str, target_result: str, table) -> CnotBranch:
    state = swap_f1_g1(prepared, 0)
    control = measure_level(state, 0, forced=control_result)
    state = conditional_qubit_swap(control.state, 1, control_result)
    state = level_pi_half_pulse(state, 1)
    target = measure_level(state, 1, forced=target_result)
    state = apply_corrections(target.state, (control_result, target_result), table)
    return CnotBranch(
        control_result=control_result,
        target_result=target_result,
        probability=control.probability * target.probability,
        state=state,
    )


def cnot_protocol(
    qubit_input: TwoAtomState,
    branch_policy: str = "enumerate",
    rng: np.random.Generator | None = None,
    correction_table=None,
) -> list[CnotBranch]:
    """Run the measurement-based CNOT on qubits stored in the g levels.

    ``enumerate`` forces all four measurement branches and returns them all;
    ``random`` samples one trajectory with the provided rng.  In the ideal
    (no-decay) simulation every branch ends in CNOT|Phi_q> (x) |gg>.
    """
    prepared = prepare_entangled_levels(qubit_input)
    if branch_policy == "enumerate":
        return [
            _run_branch(prepared, c, t, correction_table)
            for c in ("g", "f")
            for t in ("g", "f")
        ]
    if branch_policy == "random":
        if rng is None:
            raise ValueError("random branch policy needs an rng")
        state = swap_f1_g1(prepared, 0)
        control = measure_level(state, 0, rng=rng)
        state = conditional_qubit_swap(control.state, 1, control.result)
        state = level_pi_half_pulse(state, 1)
        target = measure_level(state, 1, rng=rng)
        state = apply_corrections(target.state, (control.result, target.result), correction_table)
        return [
            CnotBranch(
                control_result=control.result,
                target_result=target.result,
                probability=control.probability * target.probability,
                state=state,
            )
        ]
    raise ValueError(f"branch_policy must be 'enumerate' or 'random', got {branch_policy!r}")


def cnot_truth_output(qubit_amplitudes) -> TwoAtomState:
    """Reference final state: CNOT applied to the qubit input, levels in |gg>."""
    q = np.asarray(qubit_amplitudes, dtype=complex).reshape(2, 2)
    flipped = q.copy()
    flipped[1, :] = q[1, ::-1]
    return TwoAtomState.from_qubits(flipped.reshape(-1))


def estimate_gate_error(cooperativity: float, target_success: float = 0.5, mode: str = "single_shot") -> float:
    """Realistic gate-error estimate: the entanglement-preparation error dominates.

    Convenience combinator delegating to the fidelity optimizer at the given
    operating point; the ideal state-vector protocol above contributes no
    additional error.
    """
    from .optimizer import Mode, OptimizationProblem, optimize

    problem = OptimizationProblem(cooperativity=cooperativity, target_success=target_success, mode=Mode(mode))
    return optimize(problem).error
