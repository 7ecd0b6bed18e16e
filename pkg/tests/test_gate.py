import math

import numpy as np
import pytest

from cavityqnd.gate import (
    BASIS_LABELS,
    CORRECTION_TABLE,
    AtomState,
    TwoAtomState,
    cnot_protocol,
    cnot_truth_output,
    conditional_qubit_swap,
    level_pi_half_pulse,
    level_swap,
    measure_level,
    prepare_entangled_levels,
    state_phase,
    swap_f1_g1,
)

DIM = len(BASIS_LABELS)
COMPUTATIONAL_INPUTS = {
    "00": (1, 0, 0, 0),
    "01": (0, 1, 0, 0),
    "10": (0, 0, 1, 0),
    "11": (0, 0, 0, 1),
}


def single_atom_basis(label: str) -> AtomState:
    vec = np.zeros(DIM, dtype=complex)
    vec[BASIS_LABELS.index(label)] = 1.0
    return AtomState(vec)


def two_atom_basis(control: str, target: str) -> TwoAtomState:
    return TwoAtomState.from_product(single_atom_basis(control), single_atom_basis(target))


def operator_matrix(op, atom_index: int) -> np.ndarray:
    """Matrix of a single-atom operation on the 25-dim product space."""
    columns = []
    for i in range(DIM * DIM):
        vec = np.zeros(DIM * DIM, dtype=complex)
        vec[i] = 1.0
        columns.append(op(TwoAtomState(vec), atom_index).amplitudes)
    return np.column_stack(columns)


class TestSingleAtomOperations:
    @pytest.mark.parametrize("atom_index", [0, 1])
    @pytest.mark.parametrize(
        "op",
        [
            swap_f1_g1,
            level_swap,
            level_pi_half_pulse,
            lambda s, a: conditional_qubit_swap(s, a, "g"),
            lambda s, a: conditional_qubit_swap(s, a, "f"),
            lambda s, a: state_phase(s, a, "g0"),
        ],
    )
    def test_operations_are_unitary(self, op, atom_index):
        mat = operator_matrix(op, atom_index)
        assert np.max(np.abs(mat @ mat.conj().T - np.eye(DIM * DIM))) < 1e-12

    def test_swap_f1_g1_action(self):
        state = two_atom_basis("f1", "g0")
        swapped = swap_f1_g1(state, 0)
        assert swapped.overlap(two_atom_basis("g1", "g0")) == pytest.approx(1.0)
        # involution
        assert np.allclose(swap_f1_g1(swapped, 0).amplitudes, state.amplitudes)
        # fixes the other states
        for label in ("g0", "f0", "o"):
            state = two_atom_basis(label, "g0")
            assert np.allclose(swap_f1_g1(state, 0).amplitudes, state.amplitudes)

    def test_conditional_qubit_swap_action(self):
        state = two_atom_basis("g0", "g0")
        swapped = conditional_qubit_swap(state, 0, "g")
        assert swapped.overlap(two_atom_basis("g1", "g0")) == pytest.approx(1.0)
        untouched = conditional_qubit_swap(two_atom_basis("f0", "g0"), 0, "g")
        assert untouched.overlap(two_atom_basis("f0", "g0")) == pytest.approx(1.0)
        twice = conditional_qubit_swap(swapped, 0, "g")
        assert np.allclose(twice.amplitudes, state.amplitudes)
        with pytest.raises(ValueError):
            conditional_qubit_swap(state, 0, "x")

    def test_pi_half_pulse_action(self):
        state = two_atom_basis("g0", "g0")
        rotated = level_pi_half_pulse(state, 0)
        expected = (two_atom_basis("g0", "g0").amplitudes + two_atom_basis("f0", "g0").amplitudes) / math.sqrt(2)
        assert np.allclose(rotated.amplitudes, expected, atol=1e-15)
        assert np.linalg.norm(rotated.amplitudes) == pytest.approx(1.0, abs=1e-14)

    def test_pi_half_pulse_fourth_power_is_minus_identity_on_levels(self):
        # 45-degree level rotation: four applications rotate by pi, giving a
        # global minus sign on the g/f manifold (|o> is untouched).
        state = TwoAtomState.from_qubits(np.array([0.5, 0.5, 0.5, 0.5]))
        out = state
        for _ in range(4):
            out = level_pi_half_pulse(out, 0)
        assert np.allclose(out.amplitudes, -state.amplitudes, atol=1e-14)

    def test_bad_atom_index(self):
        state = two_atom_basis("g0", "g0")
        with pytest.raises(IndexError):
            swap_f1_g1(state, 2)


class TestPrepareEntangledLevels:
    def test_computational_zero_maps_to_level_pair(self):
        prepared = prepare_entangled_levels(TwoAtomState.from_qubits((1, 0, 0, 0)))
        expected = (
            two_atom_basis("g0", "f0").amplitudes + two_atom_basis("f0", "g0").amplitudes
        ) / math.sqrt(2)
        assert np.allclose(prepared.amplitudes, expected, atol=1e-15)

    def test_qubit_superposition_rides_along(self):
        q = np.array([1, 0, 1, 0]) / math.sqrt(2)
        prepared = prepare_entangled_levels(TwoAtomState.from_qubits(q))
        expected = (
            two_atom_basis("g0", "f0").amplitudes
            + two_atom_basis("f0", "g0").amplitudes
            + two_atom_basis("g1", "f0").amplitudes
            + two_atom_basis("f1", "g0").amplitudes
        ) / 2.0
        assert np.allclose(prepared.amplitudes, expected, atol=1e-15)

    def test_every_qubit_input_lands_on_the_level_pair_manifold(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            q = rng.normal(size=4) + 1j * rng.normal(size=4)
            q /= np.linalg.norm(q)
            prepared = prepare_entangled_levels(TwoAtomState.from_qubits(q))
            # project onto the (|gf> + |fg>)/sqrt(2) level manifold: the swap
            # of the two atoms' levels acts as identity there
            amps = prepared.amplitudes.reshape(DIM, DIM)
            g_states, f_states = (0, 1), (2, 3)
            gf = amps[np.ix_(g_states, f_states)]
            fg = amps[np.ix_(f_states, g_states)]
            assert np.allclose(gf, fg.T * np.ones_like(gf), atol=1e-12) or np.allclose(
                gf, fg, atol=1e-12
            )
            assert np.linalg.norm(gf) ** 2 + np.linalg.norm(fg) ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_rejects_support_outside_g_levels(self):
        with pytest.raises(ValueError):
            prepare_entangled_levels(two_atom_basis("f0", "g0"))


class TestMeasureLevel:
    def test_level_pair_gives_even_odds(self):
        prepared = prepare_entangled_levels(TwoAtomState.from_qubits((1, 0, 0, 0)))
        for atom in (0, 1):
            for result in ("g", "f"):
                outcome = measure_level(prepared, atom, forced=result)
                assert outcome.probability == pytest.approx(0.5, abs=1e-12)
                assert np.linalg.norm(outcome.state.amplitudes) == pytest.approx(1.0, abs=1e-12)

    def test_product_state_is_certain(self):
        state = two_atom_basis("g0", "f1")
        outcome = measure_level(state, 0, forced="g")
        assert outcome.probability == pytest.approx(1.0, abs=1e-14)
        with pytest.raises(ValueError):
            measure_level(state, 0, forced="f")

    def test_random_mode_follows_born_rule(self):
        prepared = prepare_entangled_levels(TwoAtomState.from_qubits((1, 0, 0, 0)))
        rng = np.random.default_rng(12345)
        results = [measure_level(prepared, 0, rng=rng).result for _ in range(4000)]
        frequency = results.count("g") / len(results)
        assert abs(frequency - 0.5) < 3 * math.sqrt(0.25 / len(results))

    def test_rng_required_without_forced_outcome(self):
        state = two_atom_basis("g0", "g0")
        with pytest.raises(ValueError):
            measure_level(state, 0)

    def test_decay_sink_population_rejected(self):
        # measuring the atom that sits in |o> is undefined; measuring its
        # partner is still fine
        vec = np.zeros(DIM * DIM, dtype=complex)
        vec[BASIS_LABELS.index("o") * DIM + BASIS_LABELS.index("g0")] = 1.0
        state = TwoAtomState(vec)
        with pytest.raises(ValueError):
            measure_level(state, 0, forced="g")
        outcome = measure_level(state, 1, forced="g")
        assert outcome.probability == pytest.approx(1.0, abs=1e-14)


class TestCnotProtocol:
    def test_truth_table_every_branch(self):
        for name, qubits in COMPUTATIONAL_INPUTS.items():
            reference = cnot_truth_output(qubits)
            branches = cnot_protocol(TwoAtomState.from_qubits(qubits))
            assert len(branches) == 4
            assert sum(b.probability for b in branches) == pytest.approx(1.0, abs=1e-12)
            for branch in branches:
                err = np.max(np.abs(branch.state.amplitudes - reference.amplitudes))
                assert err < 1e-12, (name, branch.control_result, branch.target_result)

    def test_bell_state_production(self):
        q = np.array([1, 0, 1, 0]) / math.sqrt(2)
        bell = TwoAtomState.from_qubits(np.array([1, 0, 0, 1]) / math.sqrt(2))
        for branch in cnot_protocol(TwoAtomState.from_qubits(q)):
            assert np.max(np.abs(branch.state.amplitudes - bell.amplitudes)) < 1e-12

    def test_double_application_is_identity(self):
        for qubits in COMPUTATIONAL_INPUTS.values():
            state = TwoAtomState.from_qubits(qubits)
            once = cnot_protocol(state)[0].state
            twice = cnot_protocol(once)[0].state
            assert np.max(np.abs(twice.amplitudes - state.amplitudes)) < 1e-12

    def test_random_policy_reproducible_and_correct(self):
        q = np.array([0.5, 0.5, 0.5, -0.5])
        reference = cnot_truth_output(q)
        first = cnot_protocol(TwoAtomState.from_qubits(q), "random", rng=np.random.default_rng(7))
        second = cnot_protocol(TwoAtomState.from_qubits(q), "random", rng=np.random.default_rng(7))
        assert len(first) == 1
        assert first[0].control_result == second[0].control_result
        assert np.max(np.abs(first[0].state.amplitudes - reference.amplitudes)) < 1e-12
        with pytest.raises(ValueError):
            cnot_protocol(TwoAtomState.from_qubits(q), "random")
        with pytest.raises(ValueError):
            cnot_protocol(TwoAtomState.from_qubits(q), "bogus")

    def test_corrupted_correction_table_fails_cases(self):
        table = dict(CORRECTION_TABLE)
        table[("g", "g")] = ()
        failures = 0
        for qubits in COMPUTATIONAL_INPUTS.values():
            reference = cnot_truth_output(qubits)
            for branch in cnot_protocol(TwoAtomState.from_qubits(qubits), correction_table=table):
                if np.max(np.abs(branch.state.amplitudes - reference.amplitudes)) > 1e-12:
                    failures += 1
        assert failures > 0

    def test_correction_table_vocabulary(self):
        # table entries are data: only named single-atom operations appear
        for ops in CORRECTION_TABLE.values():
            for op in ops:
                assert op[0] in ("level_swap", "phase", "qubit_swap")
                assert op[1] in ("control", "target")


class TestStateTypes:
    def test_norm_validation(self):
        with pytest.raises(ValueError):
            AtomState(np.array([1.0, 1.0, 0, 0, 0]))
        with pytest.raises(ValueError):
            TwoAtomState(np.zeros(25))
        with pytest.raises(ValueError):
            TwoAtomState(np.ones(24))

    def test_from_product_matches_kron(self):
        control = single_atom_basis("g1")
        target = single_atom_basis("f0")
        state = TwoAtomState.from_product(control, target)
        assert state.overlap(two_atom_basis("g1", "f0")) == pytest.approx(1.0)


def test_estimate_gate_error_matches_preparation_error():
    from cavityqnd.optimizer import OptimizationProblem, optimize

    from cavityqnd.gate import estimate_gate_error

    direct = optimize(OptimizationProblem(cooperativity=100.0, target_success=0.5)).error
    assert estimate_gate_error(100.0, 0.5) == pytest.approx(direct, abs=0.0)
