import json

import numpy as np
import pytest

from pqcsim.registers import (CapacityError, ConstituentState, Ensemble,
                              NormalizationError, RegisterLayout,
                              apply_unitary_n2f, evolve_full, expand_full,
                              flip_function_if_marked, hadamard_n2,
                              phase_on_marked, phase_on_zero_n2,
                              prepare_general_ensemble, prepare_uniform_ensemble,
                              project_constituent)

from oracles import H2, kron_chain, random_program, random_unitary, run_full

ATOL = 1e-12


def uniform_state(n1=0, n2=2, m=0, j1=0):
    layout = RegisterLayout(n1=n1, n2=n2, m=m)
    return prepare_uniform_ensemble(layout).constituents[j1]


def with_n2_amps(layout, j1, n2_amps, weight=1.0):
    amps = np.zeros(layout.constituent_dim, dtype=np.complex128)
    amps[:layout.N2] = n2_amps
    return ConstituentState(j1, amps, weight, layout)


def test_layout_validation():
    with pytest.raises(ValueError):
        RegisterLayout(n1=0, n2=0)
    with pytest.raises(ValueError):
        RegisterLayout(n1=-1, n2=2)
    lay = RegisterLayout(n1=2, n2=3, m=1)
    assert (lay.N1, lay.N2, lay.n, lay.constituent_dim, lay.full_dim) == (4, 8, 5, 32, 128)
    assert lay.split_marked(13) == (1, 5)
    with pytest.raises(ValueError):
        lay.split_marked(32)


def test_prepare_uniform_examples():
    ens = prepare_uniform_ensemble(RegisterLayout(n1=2, n2=2))
    assert len(ens.constituents) == 4
    for c in ens.constituents:
        assert c.weight == 0.25
        np.testing.assert_allclose(c.amplitudes[:4], 0.5, atol=ATOL)
        np.testing.assert_allclose(c.amplitudes[4:], 0.0, atol=ATOL)
    ens.check()

    ens = prepare_uniform_ensemble(RegisterLayout(n1=0, n2=3))
    assert len(ens.constituents) == 1
    np.testing.assert_allclose(ens.constituents[0].amplitudes[:8], 8 ** -0.5, atol=ATOL)

    ens = prepare_uniform_ensemble(RegisterLayout(n1=3, n2=0))
    assert len(ens.constituents) == 8
    for c in ens.constituents:
        assert c.weight == 0.125
        np.testing.assert_allclose(c.amplitudes, [1.0, 0.0], atol=ATOL)


def test_prepare_capacity_error():
    with pytest.raises(CapacityError):
        prepare_uniform_ensemble(RegisterLayout(n1=0, n2=23))
    with pytest.raises(CapacityError):
        prepare_uniform_ensemble(RegisterLayout(n1=10, n2=16))


def test_prepare_general_examples():
    layout = RegisterLayout(n1=2, n2=2)
    delta = np.zeros((4, 4), dtype=complex)
    delta[:, 0] = 1.0
    ens = prepare_general_ensemble(layout, delta)
    for c in ens.constituents:
        assert c.amplitudes[0] == 1.0 and abs(c.norm_sq() - 1) < ATOL

    uniform = np.full((4, 4), 0.5, dtype=complex)
    ens_a = prepare_general_ensemble(layout, uniform)
    ens_b = prepare_uniform_ensemble(layout)
    for ca, cb in zip(ens_a.constituents, ens_b.constituents):
        np.testing.assert_allclose(ca.amplitudes, cb.amplitudes, atol=ATOL)

    layout = RegisterLayout(n1=1, n2=2)
    rows = np.array([[1, 0, 0, 0], [0, 1, 0, 0]], dtype=complex)
    ens = prepare_general_ensemble(layout, rows)
    assert ens.constituents[0].amplitudes[0] == 1.0
    assert ens.constituents[1].amplitudes[1] == 1.0


def test_prepare_general_normalization_error_names_offender():
    layout = RegisterLayout(n1=1, n2=1)
    rows = np.array([[1, 0], [0.5, 0.5]], dtype=complex)  # second row has norm 0.5
    with pytest.raises(NormalizationError, match=r"\[1\]"):
        prepare_general_ensemble(layout, rows)


def test_hadamard_examples():
    state = uniform_state(n2=2)
    out = hadamard_n2(state)
    expected = np.zeros(8, dtype=complex)
    expected[0] = 1.0
    np.testing.assert_allclose(out.amplitudes, expected, atol=ATOL)
    back = hadamard_n2(out)
    np.testing.assert_allclose(back.amplitudes, state.amplitudes, atol=ATOL)

    layout = RegisterLayout(n1=0, n2=2)
    state = with_n2_amps(layout, 0, np.array([1, 0, 0, -1]) / np.sqrt(2))
    out = hadamard_n2(state)
    np.testing.assert_allclose(out.amplitudes[:4], np.array([0, 1, 1, 0]) / np.sqrt(2), atol=ATOL)


def test_hadamard_involution_property():
    rng = np.random.default_rng(5)
    for _ in range(20):
        layout = RegisterLayout(n1=int(rng.integers(3)), n2=int(rng.integers(1, 5)),
                                m=int(rng.integers(2)))
        amps = rng.normal(size=layout.constituent_dim) + 1j * rng.normal(size=layout.constituent_dim)
        amps /= np.linalg.norm(amps)
        state = ConstituentState(0, amps, 1.0, layout)
        out = hadamard_n2(hadamard_n2(state))
        assert np.max(np.abs(out.amplitudes - amps)) < ATOL


def test_phase_on_marked_examples():
    layout = RegisterLayout(n1=1, n2=1)
    state = with_n2_amps(layout, 0, np.array([1, 1]) / np.sqrt(2), weight=0.5)
    # wrong sub-database: no observable effect
    out = phase_on_marked(state, marked_full=2, phi=1.3)
    np.testing.assert_array_equal(out.amplitudes, state.amplitudes)
    # zero angle: identity
    out = phase_on_marked(state, marked_full=1, phi=0.0)
    np.testing.assert_allclose(out.amplitudes, state.amplitudes, atol=ATOL)
    # pi on the marked slice: sign flip
    out = phase_on_marked(state, marked_full=1, phi=np.pi)
    np.testing.assert_allclose(out.amplitudes[:2], np.array([1, -1]) / np.sqrt(2), atol=ATOL)
    with pytest.raises(ValueError):
        phase_on_marked(state, marked_full=4, phi=0.1)


def test_phase_on_zero_examples():
    layout = RegisterLayout(n1=0, n2=1)
    state = with_n2_amps(layout, 0, np.array([1, 1]) / np.sqrt(2))
    out = phase_on_zero_n2(state, 2 * np.pi)
    np.testing.assert_allclose(out.amplitudes, state.amplitudes, atol=ATOL)
    out = phase_on_zero_n2(state, np.pi)
    np.testing.assert_allclose(out.amplitudes[:2], np.array([-1, 1]) / np.sqrt(2), atol=ATOL)
    basis = with_n2_amps(layout, 0, np.array([1, 0]))
    out = phase_on_zero_n2(basis, np.pi / 2)
    np.testing.assert_allclose(out.amplitudes[0], 1j, atol=ATOL)


def test_flip_examples():
    layout = RegisterLayout(n1=1, n2=1)
    marked = 3  # j1=1, j2=1
    state = with_n2_amps(layout, 1, np.array([0, 1]), weight=0.5)
    out = flip_function_if_marked(state, marked, target_qubit=0)
    # ancilla went |0> -> |1>: amplitude moved to the upper block
    np.testing.assert_allclose(out.amplitudes, [0, 0, 0, 1], atol=ATOL)

    unmarked = with_n2_amps(layout, 0, np.array([0, 1]), weight=0.5)
    out = flip_function_if_marked(unmarked, marked, target_qubit=0)
    np.testing.assert_array_equal(out.amplitudes, unmarked.amplitudes)

    superposed = with_n2_amps(layout, 1, np.array([1, 1]) / np.sqrt(2), weight=0.5)
    out = flip_function_if_marked(superposed, marked, target_qubit=0)
    s = 2 ** -0.5
    np.testing.assert_allclose(out.amplitudes, [s, 0, 0, s], atol=ATOL)

    with pytest.raises(ValueError):
        flip_function_if_marked(state, marked, target_qubit=1)  # no function qubits


def test_flip_function_qubit_with_oracle():
    rng = np.random.default_rng(11)
    layout = RegisterLayout(n1=1, n2=2, m=2)
    amps = rng.normal(size=layout.constituent_dim) + 1j * rng.normal(size=layout.constituent_dim)
    amps /= np.linalg.norm(amps)
    state = ConstituentState(1, amps, 1.0, layout)
    for target in (0, 1, 2):
        got = flip_function_if_marked(state, marked_full=6, target_qubit=target)
        from oracles import full_flip_if_marked
        want = full_flip_if_marked(expand_full(state), 6, target)
        np.testing.assert_allclose(expand_full(got).amplitudes, want.amplitudes, atol=ATOL)


def test_apply_unitary_examples():
    layout = RegisterLayout(n1=0, n2=1)
    state = with_n2_amps(layout, 0, np.array([0.6, 0.8j]))
    out = apply_unitary_n2f(state, np.eye(2))
    np.testing.assert_allclose(out.amplitudes, state.amplitudes, atol=ATOL)

    out = apply_unitary_n2f(state, H2)
    np.testing.assert_allclose(out.amplitudes, hadamard_n2(state).amplitudes, atol=ATOL)

    rng = np.random.default_rng(3)
    layout = RegisterLayout(n1=0, n2=2, m=1)
    amps = rng.normal(size=layout.constituent_dim) + 1j * rng.normal(size=layout.constituent_dim)
    amps /= np.linalg.norm(amps)
    state = ConstituentState(0, amps, 1.0, layout)
    out = apply_unitary_n2f(state, random_unitary(8, rng))
    assert abs(out.norm_sq() - 1.0) < ATOL

    with pytest.raises(ValueError, match="not unitary"):
        apply_unitary_n2f(state, np.ones((8, 8)))
    with pytest.raises(ValueError):
        apply_unitary_n2f(state, np.eye(4))


def test_norm_preserved_across_random_sequences():
    rng = np.random.default_rng(17)
    for _ in range(10):
        layout = RegisterLayout(n1=1, n2=int(rng.integers(1, 4)), m=int(rng.integers(2)))
        state = prepare_uniform_ensemble(layout).constituents[1]
        program = random_program(layout, rng, length=12)
        from pqcsim.engine import OPS
        for op in program.ops:
            state = OPS[op.op](state, **op.args)
            assert abs(state.norm_sq() - 1.0) < ATOL


def test_expand_round_trip():
    rng = np.random.default_rng(23)
    layout = RegisterLayout(n1=2, n2=2, m=1)
    amps = rng.normal(size=layout.constituent_dim) + 1j * rng.normal(size=layout.constituent_dim)
    amps /= np.linalg.norm(amps)
    state = ConstituentState(2, amps, 0.25, layout)
    back = project_constituent(expand_full(state), 2, weight=0.25)
    assert np.max(np.abs(back.amplitudes - state.amplitudes)) < 1e-14
    with pytest.raises(ValueError):
        project_constituent(expand_full(state), 1)


def test_expand_capacity_limit():
    state = prepare_uniform_ensemble(RegisterLayout(n1=10, n2=8)).constituents[0]
    with pytest.raises(CapacityError):
        expand_full(state)  # 19 qubits > default 16


def test_full_space_oracle_matches_primitives():
    layout = RegisterLayout(n1=2, n2=2)
    state = prepare_uniform_ensemble(layout).constituents[1]
    from oracles import full_hadamard_n2, full_phase_on_marked

    got = expand_full(phase_on_marked(state, 6, 0.7))
    want = full_phase_on_marked(expand_full(state), 6, 0.7)
    np.testing.assert_allclose(got.amplitudes, want.amplitudes, atol=ATOL)

    got = expand_full(hadamard_n2(state))
    want = full_hadamard_n2(expand_full(state))
    np.testing.assert_allclose(got.amplitudes, want.amplitudes, atol=ATOL)


def test_evolve_full_dense_hadamard():
    layout = RegisterLayout(n1=1, n2=1)
    state = prepare_uniform_ensemble(layout).constituents[0]
    eye2 = np.eye(2)
    dense = kron_chain([eye2, np.eye(layout.N1), H2])  # ancilla x n1 x n2
    evolved = evolve_full(expand_full(state), dense)
    want = expand_full(hadamard_n2(state))
    np.testing.assert_allclose(evolved.amplitudes, want.amplitudes, atol=ATOL)


def test_representation_equivalence_random_programs():
    rng = np.random.default_rng(31)
    for _ in range(10):
        n = int(rng.integers(2, 9))
        n1 = int(rng.integers(0, n + 1))
        layout = RegisterLayout(n1=n1, n2=n - n1, m=int(rng.integers(2)))
        if 1 + layout.m + layout.n > 11:
            layout = RegisterLayout(n1=n1, n2=n - n1, m=0)
        program = random_program(layout, rng, length=8)
        from pqcsim.engine import OPS
        for c in prepare_uniform_ensemble(layout).constituents:
            full = expand_full(c)
            state = c
            for op in program.ops:
                state = OPS[op.op](state, **op.args)
            full = run_full(full, program)
            diff = np.max(np.abs(expand_full(state).amplitudes - full.amplitudes))
            assert diff < ATOL


def test_constituent_independence_order_invariant():
    rng = np.random.default_rng(41)
    layout = RegisterLayout(n1=2, n2=2)
    program = random_program(layout, rng, length=6)
    from pqcsim.engine import OPS, execute
    ens = prepare_uniform_ensemble(layout)
    via_engine = execute(ens, program)
    order = [3, 0, 2, 1]
    by_hand = {}
    for j1 in order:
        state = ens.constituents[j1]
        for op in program.ops:
            state = OPS[op.op](state, **op.args)
        by_hand[j1] = state
    for c in via_engine.constituents:
        np.testing.assert_array_equal(c.amplitudes, by_hand[c.j1_label].amplitudes)


def test_ensemble_json_round_trip_exact():
    layout = RegisterLayout(n1=1, n2=2)
    ens = prepare_uniform_ensemble(layout)
    ens.constituents[0] = phase_on_marked(ens.constituents[0], 1, 0.37)
    doc = json.loads(json.dumps(ens.to_json_dict()))
    assert set(doc) == {"n1", "n2", "m", "constituents"}
    assert set(doc["constituents"][0]) == {"j1", "weight", "amps"}
    back = Ensemble.from_json_dict(doc)
    for a, b in zip(back.constituents, ens.constituents):
        np.testing.assert_array_equal(a.amplitudes, b.amplitudes)
        assert a.weight == b.weight


def test_ensemble_check_rejects_bad_weights():
    layout = RegisterLayout(n1=1, n2=1)
    ens = prepare_uniform_ensemble(layout)
    ens.constituents[0].weight = 0.75
    with pytest.raises(NormalizationError):
        ens.check()
