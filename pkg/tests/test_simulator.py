import numpy as np
import pytest

from chromlc import linalg
from chromlc.compiler import Gate, GateSchedule, Step, compile
from chromlc.errors import (
    BadParams,
    DimensionMismatch,
    IndexOutOfRange,
    NormDrift,
    TooLarge,
)
from chromlc.hamiltonian import HamiltonianSchedule, PairTerm, Segment, chain, random_graph
from chromlc.simulator import (
    MeanFieldObservable,
    ProductState,
    StateVector,
    apply_gate,
    evolve_continuous,
    full_unitary,
    mixed_variance,
    run_schedule,
    variance,
)

from helpers import (
    dense_hamiltonian,
    dense_schedule_unitary,
    embed_single_operator,
    ghz_amplitudes,
    haar_unitary,
    random_gate_schedule,
    random_hermitian,
    single_pair_schedule,
)

SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def test_state_vector_validation():
    with pytest.raises(NormDrift):
        StateVector(2, np.array([1.0, 1.0, 0.0, 0.0]))
    with pytest.raises(DimensionMismatch):
        StateVector(2, np.array([1.0, 0.0]))
    with pytest.raises(IndexOutOfRange):
        StateVector.basis(2, 7)
    psi = StateVector.basis(3, 5)
    assert psi.amplitudes[5] == 1.0


def test_apply_gate_identity_and_swap():
    psi = StateVector.basis(2, 0b01)
    out = apply_gate(psi, Gate.from_unitary((0, 1), np.eye(4)))
    assert np.array_equal(out.amplitudes, psi.amplitudes)
    swapped = apply_gate(psi, Gate.from_unitary((0, 1), SWAP))
    assert abs(swapped.amplitudes[0b10] - 1.0) < 1e-14


def test_apply_gate_qubit_order_convention():
    # qubit 0 is the most significant bit: a gate on (0,1) of a 3-qubit
    # register must leave qubit 2 alone
    psi = StateVector.basis(3, 0b011)
    out = apply_gate(psi, Gate.from_unitary((0, 1), SWAP))
    assert abs(out.amplitudes[0b101] - 1.0) < 1e-14
    with pytest.raises(IndexOutOfRange):
        apply_gate(psi, Gate.from_unitary((1, 3), SWAP))


def test_norm_preserved_over_many_gates():
    rng = np.random.default_rng(3)
    gates = [
        Gate.from_unitary(tuple(sorted(rng.choice(5, size=2, replace=False))), haar_unitary(4, rng))
        for _ in range(64)
    ]
    psi = StateVector.basis(5, 0)
    amps = psi.amplitudes
    for i in range(10_000):
        g = gates[i % len(gates)]
        psi = apply_gate(psi, g)
    assert abs(psi.norm() - 1.0) < 1e-9


def test_run_schedule_trivials():
    psi = StateVector.basis(3, 4)
    assert np.array_equal(run_schedule(psi, GateSchedule(3, ())).amplitudes, psi.amplitudes)
    with pytest.raises(DimensionMismatch):
        run_schedule(psi, GateSchedule(4, ()))


def test_run_schedule_inverse_roundtrip():
    rng = np.random.default_rng(5)
    g = random_gate_schedule(4, rng)
    inverse_steps = tuple(
        Step(tuple(Gate.from_unitary(x.pair, x.unitary.conj().T) for x in step.gates))
        for step in reversed(g.steps)
    )
    inv = GateSchedule(4, inverse_steps)
    psi = StateVector(4, haar_unitary(16, rng)[:, 0])
    out = run_schedule(run_schedule(psi, g), inv)
    assert np.max(np.abs(out.amplitudes - psi.amplitudes)) < 1e-9


def test_split_steps_equivalent():
    rng = np.random.default_rng(7)
    a = Gate.from_unitary((0, 1), haar_unitary(4, rng))
    b = Gate.from_unitary((2, 3), haar_unitary(4, rng))
    joint = GateSchedule(4, (Step((a, b)),))
    split = GateSchedule(4, (Step((a,)), Step((b,))))
    psi = StateVector(4, haar_unitary(16, rng)[:, 0])
    assert np.max(
        np.abs(run_schedule(psi, joint).amplitudes - run_schedule(psi, split).amplitudes)
    ) < 1e-12


def test_run_schedule_matches_dense_oracle():
    rng = np.random.default_rng(9)
    for n in (3, 4):
        for _ in range(5):
            g = random_gate_schedule(n, rng)
            dense = dense_schedule_unitary(g)
            psi = StateVector.basis(n, int(rng.integers(0, 2**n)))
            out = run_schedule(psi, g)
            assert np.max(np.abs(out.amplitudes - dense @ psi.amplitudes)) < 1e-10


def test_evolve_zero_hamiltonian():
    s = single_pair_schedule({}, t_total=1.0)
    psi = StateVector.basis(2, 2)
    out = evolve_continuous(psi, s, 1e-10)
    assert np.max(np.abs(out.amplitudes - psi.amplitudes)) < 1e-12


def test_evolve_single_pair_matches_expm():
    rng = np.random.default_rng(11)
    h = random_hermitian(4, rng, norm=1.3)
    from chromlc.hamiltonian import pauli_coeffs

    coeffs = pauli_coeffs(h)
    term = PairTerm((0, 1), tuple((float(c),) for c in coeffs))
    s = HamiltonianSchedule(2, (Segment(0.0, 0.9, (term,)),))
    psi = StateVector(2, haar_unitary(4, rng)[:, 0])
    out = evolve_continuous(psi, s, 1e-10)
    expected = linalg.expm_i(term.matrix_at(0.0), 0.9) @ psi.amplitudes
    assert np.max(np.abs(out.amplitudes - expected)) < 1e-9


def test_evolve_two_terms_matches_full_expm():
    s = random_graph(4, p=0.9, seed=21, coupling=0.8)
    psi = StateVector.basis(4, 3)
    out = evolve_continuous(psi, s, 1e-10)
    h_full = dense_hamiltonian(s, 0.5)
    expected = linalg.expm_i(h_full, 1.0) @ psi.amplitudes
    assert np.max(np.abs(out.amplitudes - expected)) < 1e-8


def test_evolve_time_reversal_inverts():
    s = random_graph(3, p=1.0, seed=2, segments=2)
    # reverse segment order and negate couplings: running the reversed
    # schedule after the forward one must restore the initial state
    reversed_segments = []
    t = 0.0
    for seg in reversed(s.segments):
        terms = tuple(
            PairTerm(term.pair, tuple(tuple(-c for c in p) for p in term.coeffs))
            for term in seg.terms
        )
        reversed_segments.append(Segment(t, t + seg.length, terms))
        t += seg.length
    back = HamiltonianSchedule(s.n_qubits, tuple(reversed_segments))
    psi = StateVector.basis(3, 1)
    fwd = evolve_continuous(psi, s, 1e-11)
    rt = evolve_continuous(fwd, back, 1e-11)
    assert np.max(np.abs(rt.amplitudes - psi.amplitudes)) < 1e-9


def test_evolve_tolerance_validation():
    s = single_pair_schedule({"XX": (1.0,)})
    psi = StateVector.basis(2, 0)
    with pytest.raises(BadParams):
        evolve_continuous(psi, s, 1e-14)
    with pytest.raises(DimensionMismatch):
        evolve_continuous(StateVector.basis(3, 0), s, 1e-9)


def test_full_unitary_trivials():
    assert np.array_equal(full_unitary(GateSchedule(2, ())), np.eye(4))
    rng = np.random.default_rng(13)
    u = haar_unitary(4, rng)
    g = GateSchedule(2, (Step((Gate.from_unitary((0, 1), u),)),))
    assert np.max(np.abs(full_unitary(g) - u)) < 1e-12
    with pytest.raises(TooLarge):
        full_unitary(GateSchedule(7, ()))


def test_full_unitary_is_unitary():
    rng = np.random.default_rng(15)
    g = random_gate_schedule(4, rng)
    assert linalg.is_unitary(full_unitary(g), 1e-10)
    s = random_graph(3, p=0.8, seed=3)
    assert linalg.is_unitary(full_unitary(s, 1e-9), 1e-8)


def test_compiled_schedule_runs_close_to_continuous():
    s = chain(4, 1.0, 0.5)
    gates, _ = compile(s, 0.05)
    psi = StateVector.basis(4, 0b0101)
    a = run_schedule(psi, gates)
    b = evolve_continuous(psi, s, 1e-10)
    assert np.max(np.abs(a.amplitudes - b.amplitudes)) < 0.05


def test_variance_eigenstate_zero():
    psi = StateVector.basis(4, 0)
    obs = MeanFieldObservable.pauli(4, "z")
    assert abs(variance(psi, obs)) < 1e-12


def test_variance_ghz():
    for n in (3, 5):
        psi = StateVector(n, ghz_amplitudes(n))
        obs = MeanFieldObservable.pauli(n, "z")
        assert abs(variance(psi, obs) - n * n) < 1e-9


def test_variance_uniform_product():
    n = 5
    plus = np.full(2, 1 / np.sqrt(2), dtype=complex)
    psi = ProductState.pure([plus] * n).branches()[0][1]
    obs = MeanFieldObservable.pauli(n, "z")
    assert abs(variance(psi, obs) - n) < 1e-9


def test_variance_of_product_states_grows_linearly():
    # cross-covariances vanish for product states, so V <= n for norm-1 factors
    rng = np.random.default_rng(19)
    for _ in range(20):
        n = int(rng.integers(2, 7))
        qubits = rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))
        psi = ProductState.pure(list(qubits)).branches()[0][1]
        obs = MeanFieldObservable.random(n, seed=int(rng.integers(0, 1000)))
        assert variance(psi, obs) <= n + 1e-9


def test_variance_matches_dense_oracle():
    rng = np.random.default_rng(17)
    n = 3
    obs = MeanFieldObservable.random(n, seed=4)
    psi = StateVector(n, haar_unitary(2**n, rng)[:, 0])
    a_dense = sum(embed_single_operator(obs.factors[j], n, j) for j in range(n))
    m1 = np.vdot(psi.amplitudes, a_dense @ psi.amplitudes).real
    m2 = np.vdot(psi.amplitudes, a_dense @ (a_dense @ psi.amplitudes)).real
    assert abs(variance(psi, obs) - (m2 - m1 * m1)) < 1e-10
    with pytest.raises(DimensionMismatch):
        variance(psi, MeanFieldObservable.pauli(4, "z"))


def test_observable_validation():
    with pytest.raises(BadParams):
        MeanFieldObservable((np.diag([2.0, -2.0]),))
    with pytest.raises(BadParams):
        MeanFieldObservable((np.array([[0, 1], [0, 0]]),))
    obs = MeanFieldObservable.random(4, seed=0)
    for f in obs.factors:
        assert abs(linalg.operator_norm(f) - 1.0) < 1e-10


def test_product_state_validation_and_branches():
    with pytest.raises(BadParams):
        ProductState((np.diag([0.5, 0.6]),))
    with pytest.raises(BadParams):
        ProductState((np.array([[1.5, 0], [0, -0.5]]),))
    pure = ProductState.pure([np.array([1.0, 0.0]), np.array([0.0, 1.0])])
    branches = pure.branches()
    assert len(branches) == 1
    prob, psi = branches[0]
    assert abs(prob - 1.0) < 1e-12
    assert abs(psi.amplitudes[0b01] - 1.0) < 1e-12


def test_mixed_variance_matches_dense_oracle():
    # maximally mixed pair of qubits against the dense density-matrix formula
    rho = np.diag([0.75, 0.25]).astype(complex)
    state = ProductState.uniform(2, rho)
    obs = MeanFieldObservable.random(2, seed=9)
    rho_full = np.kron(rho, rho)
    a_dense = sum(embed_single_operator(obs.factors[j], 2, j) for j in range(2))
    m1 = np.trace(rho_full @ a_dense).real
    m2 = np.trace(rho_full @ a_dense @ a_dense).real
    assert abs(mixed_variance(state, obs) - (m2 - m1 * m1)) < 1e-10
    assert abs(variance(state, obs) - (m2 - m1 * m1)) < 1e-10


def test_mixed_variance_with_evolution():
    rho = np.diag([0.6, 0.4]).astype(complex)
    state = ProductState.uniform(2, rho)
    obs = MeanFieldObservable.pauli(2, "z")
    s = single_pair_schedule({"XX": (0.7,), "ZI": (0.4,)})

    def evolve(psi):
        return evolve_continuous(psi, s, 1e-10)

    value = mixed_variance(state, obs, evolve=evolve)
    u = full_unitary(s, 1e-11)
    rho_full = u @ np.kron(rho, rho) @ u.conj().T
    a_dense = sum(embed_single_operator(obs.factors[j], 2, j) for j in range(2))
    m1 = np.trace(rho_full @ a_dense).real
    m2 = np.trace(rho_full @ a_dense @ a_dense).real
    assert abs(value - (m2 - m1 * m1)) < 1e-8
