import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diracmorph.clifford import (
    build_adapted_rep,
    build_gamma,
    clifford_mul,
    conjugate,
    two_form_action,
    vertical_mul,
)
from diracmorph.errors import DimensionError

TOL = 1e-12
DIMS = [1, 2, 3, 4, 5, 6, 7]
ADAPTED = [(2, 1), (2, 2), (2, 3), (4, 1), (4, 2), (2, 4)]


def anticommutator_error(gam):
    S = gam.shape[-1]
    err = 0.0
    for a in range(len(gam)):
        for b in range(len(gam)):
            ac = gam[a] @ gam[b] + gam[b] @ gam[a] + 2.0 * (a == b) * np.eye(S)
            err = max(err, np.abs(ac).max())
    return err


def random_spinor(rng, S):
    return rng.normal(size=S) + 1j * rng.normal(size=S)


@pytest.mark.parametrize("d", DIMS)
def test_gamma_invariants(d):
    rep = build_gamma(d)
    S = 2 ** (d // 2)
    assert rep.spinor_dim == S and rep.gammas.shape == (d, S, S)
    assert anticommutator_error(rep.gammas) <= TOL
    for g in rep.gammas:
        assert np.abs(g.conj().T + g).max() <= TOL
        assert np.abs(g.conj().T @ g - np.eye(S)).max() <= TOL
    if d % 2 == 0:
        w = rep.chirality
        assert np.abs(w @ w - np.eye(S)).max() <= TOL
        assert np.abs(w.conj().T - w).max() <= TOL
        for g in rep.gammas:
            assert np.abs(w @ g + g @ w).max() <= TOL
        assert np.allclose(w, (1j ** (d // 2)) * rep.volume())
    else:
        assert rep.chirality is None


def test_gamma_2_canonical_matrices():
    rep = build_gamma(2)
    assert np.array_equal(rep.gammas[0], np.array([[0, -1], [1, 0]]))
    assert np.array_equal(rep.gammas[1], np.array([[0, 1j], [1j, 0]]))
    assert np.array_equal(rep.chirality, np.diag([1, -1]))


def test_gamma_unit_vector_squares_to_minus_one():
    for d in DIMS:
        g = build_gamma(d).gammas[0]
        assert np.allclose(g @ g, -np.eye(g.shape[0]))


def test_gamma_4_characteristic_polynomial():
    # each generator has eigenvalues +-i with multiplicity two: (t^2 + 1)^2
    for g in build_gamma(4).gammas:
        assert np.allclose(np.poly(g), [1, 0, 2, 0, 1], atol=1e-12)


def test_build_gamma_deterministic_and_read_only():
    a, b = build_gamma(5), build_gamma(5)
    assert np.array_equal(a.gammas, b.gammas)
    with pytest.raises(ValueError):
        a.gammas[0, 0, 0] = 7


@pytest.mark.parametrize("bad", [0, -1, 2.5])
def test_build_gamma_rejects_bad_dimension(bad):
    with pytest.raises(DimensionError):
        build_gamma(bad)


@pytest.mark.parametrize("n,k", ADAPTED)
def test_adapted_invariants(n, k):
    rep = build_adapted_rep(n, k)
    base = build_gamma(n)
    S = 2 ** ((n + k) // 2)
    assert rep.spinor_dim == S == 2 ** (n // 2) * 2 ** (k // 2)
    assert anticommutator_error(rep.gammas) <= TOL
    c = rep.conjugation
    assert np.abs(c @ c - np.eye(S)).max() <= TOL
    Sv = rep.fibre_spinor_dim
    for i in range(n):
        expect = base.gammas[i] if k == 1 else np.kron(base.gammas[i], np.eye(Sv))
        assert np.array_equal(rep.gammas[i], expect)
    for a in range(k):
        expect = 1j * base.chirality if k == 1 else np.kron(base.chirality, rep.fibre.gammas[a])
        assert np.array_equal(rep.gammas[n + a], expect)
    # the grading anticommutes with horizontal and commutes with vertical slots
    for i in range(n):
        assert np.abs(c @ rep.gammas[i] + rep.gammas[i] @ c).max() <= TOL
    for a in range(k):
        assert np.abs(c @ rep.gammas[n + a] - rep.gammas[n + a] @ c).max() <= TOL


def test_adapted_rejects_odd_base():
    with pytest.raises(DimensionError):
        build_adapted_rep(3, 1)
    with pytest.raises(DimensionError):
        build_adapted_rep(2, 0)


def intertwiner_space(A, B):
    """Solutions X of A_a X = X B_a for all a, as a basis of flattened matrices."""
    S = A.shape[-1]
    eye = np.eye(S)
    rows = [np.kron(a, eye) - np.kron(eye, b.T) for a, b in zip(A, B)]
    M = np.concatenate(rows, axis=0)
    _, sv, vh = np.linalg.svd(M)
    null = vh[np.sum(sv > 1e-10):].conj()
    return null.reshape(-1, S, S)


def test_adapted_2_1_equivalent_to_pauli_family():
    rep = build_adapted_rep(2, 1)
    sig = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]])
    pauli = 1j * sig
    assert np.allclose(rep.volume(), np.eye(2))
    assert np.allclose(pauli[0] @ pauli[1] @ pauli[2], np.eye(2))
    X = intertwiner_space(pauli, rep.gammas)
    assert X.shape[0] == 1
    U = X[0] / np.sqrt(np.abs(np.linalg.det(X[0])))
    for a in range(3):
        assert np.allclose(U @ rep.gammas[a] @ np.linalg.inv(U), pauli[a])


def test_vertical_slot_is_i_times_conjugation_codim1():
    rep = build_adapted_rep(2, 1)
    for e in np.eye(2):
        assert np.allclose(clifford_mul(rep, [0, 0, 1], e), 1j * conjugate(rep, e))
    psi = np.array([2 - 1j, 0.5 + 3j])
    assert np.allclose(clifford_mul(rep, [0, 0, 1], psi), 1j * np.array([psi[0], -psi[1]]))


def test_clifford_mul_horizontal_on_product():
    rep = build_adapted_rep(2, 2)
    rng = np.random.default_rng(1)
    psi, alpha = random_spinor(rng, 2), random_spinor(rng, 2)
    for i in range(2):
        v = np.eye(4)[i]
        expect = np.kron(build_gamma(2).gammas[i] @ psi, alpha)
        assert np.allclose(clifford_mul(rep, v, np.kron(psi, alpha)), expect)


def test_clifford_mul_vertical_on_product():
    rep = build_adapted_rep(2, 2)
    rng = np.random.default_rng(2)
    psi, alpha = random_spinor(rng, 2), random_spinor(rng, 2)
    omega = np.diag([1, -1])
    for a in range(2):
        v = np.eye(4)[2 + a]
        expect = np.kron(omega @ psi, build_gamma(2).gammas[a] @ alpha)
        assert np.allclose(clifford_mul(rep, v, np.kron(psi, alpha)), expect)
        assert np.allclose(vertical_mul(rep, np.eye(2)[a], alpha), build_gamma(2).gammas[a] @ alpha)


def test_clifford_mul_zero_and_dimension_checks():
    rep = build_adapted_rep(2, 1)
    assert np.array_equal(clifford_mul(rep, np.zeros(3), [1, 2j]), np.zeros(2))
    with pytest.raises(DimensionError):
        clifford_mul(rep, np.zeros(2), [1, 0])
    with pytest.raises(DimensionError):
        clifford_mul(rep, np.zeros(3), [1, 0, 0])
    with pytest.raises(DimensionError):
        vertical_mul(rep, [1.0], [1.0])


def test_clifford_mul_broadcasts_over_batches():
    rep = build_adapted_rep(2, 2)
    rng = np.random.default_rng(3)
    V = rng.normal(size=(5, 4))
    Psi = rng.normal(size=(5, 4)) + 0j
    out = clifford_mul(rep, V, Psi)
    for b in range(5):
        assert np.allclose(out[b], clifford_mul(rep, V[b], Psi[b]))


def test_conjugate_examples():
    r21 = build_adapted_rep(2, 1)
    assert np.allclose(conjugate(r21, [3, 4j]), [3, -4j])
    r22 = build_adapted_rep(2, 2)
    assert np.array_equal(r22.conjugation, np.kron(np.diag([1, -1]), np.eye(2)))
    psi = random_spinor(np.random.default_rng(4), 4)
    assert np.allclose(conjugate(r22, psi), np.kron(np.diag([1, -1]), np.eye(2)) @ psi)
    with pytest.raises(DimensionError):
        conjugate(r22, [1, 2])


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(ADAPTED), st.integers(0, 2**31 - 1))
def test_conjugate_is_involution(nk, seed):
    rep = build_adapted_rep(*nk)
    psi = random_spinor(np.random.default_rng(seed), rep.spinor_dim)
    assert np.allclose(conjugate(rep, conjugate(rep, psi)), psi)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(ADAPTED), st.integers(0, 2**31 - 1))
def test_clifford_relation_on_random_vectors(nk, seed):
    rep = build_adapted_rep(*nk)
    rng = np.random.default_rng(seed)
    v = rng.normal(size=rep.dim)
    psi = random_spinor(rng, rep.spinor_dim)
    vv = clifford_mul(rep, v, clifford_mul(rep, v, psi))
    assert np.allclose(vv, -np.dot(v, v) * psi)


def test_two_form_action_examples():
    rep = build_adapted_rep(2, 1)
    psi = np.array([1 + 2j, -0.5j])
    F = np.zeros((2, 2, 3))
    assert np.allclose(two_form_action(rep, F, psi), 0)
    F[0, 1, 2], F[1, 0, 2] = 1.0, -1.0
    # ordered product gamma_1 gamma_2 gamma_3 is the identity here
    assert np.allclose(two_form_action(rep, F, psi), psi)
    G = np.swapaxes(-F, 0, 1)
    assert np.allclose(two_form_action(rep, G, psi), two_form_action(rep, F, psi))


def test_two_form_action_validation():
    rep = build_adapted_rep(2, 2)
    F = np.zeros((2, 2, 4))
    F[0, 1, 2] = 1.0
    with pytest.raises(ValueError):
        two_form_action(rep, F, np.ones(4))
    F[1, 0, 2] = -1.0
    F[0, 1, 0], F[1, 0, 0] = 1.0, -1.0
    with pytest.raises(ValueError):
        two_form_action(rep, F, np.ones(4))
    with pytest.raises(DimensionError):
        two_form_action(rep, np.zeros((2, 2, 3)), np.ones(4))


def test_adapted_2_2_chirality_pattern():
    # positive chirality first: (psi+ a+, psi- a-, psi+ a-, psi- a+)
    rep = build_adapted_rep(2, 2)
    perm = [0, 3, 1, 2]
    w = rep.chirality[np.ix_(perm, perm)]
    assert np.allclose(w, np.diag([1, 1, -1, -1]))
    p, a = np.array([2.0, 3.0]), np.array([5.0, 7.0])
    assert np.allclose(np.kron(p, a)[perm], [p[0] * a[0], p[1] * a[1], p[0] * a[1], p[1] * a[0]])
