import numpy as np
import pytest

import oracles
from cgmalab import tomita
from cgmalab.tomita import (
    AntilinearOperator,
    FiniteVNAlgebra,
    ModularData,
    ModularError,
    algebra_closure,
    algebra_distance,
    commutant,
    compute_modular,
    conjugation,
    intersection,
    is_cyclic_separating,
    kms_residual,
    left_factor,
    modular_flow,
    op_distance,
    op_norm,
    right_factor,
    schmidt_vector,
    swap_operator,
    transport_modular,
    verify_tomita,
)

E1 = np.array([1.0, 0.0])
E2 = np.array([0.0, 1.0])


def _random_complex(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def test_antilinear_action_and_composition():
    rng = np.random.default_rng(0)
    M1, M2 = _random_complex(rng, 3, 3), _random_complex(rng, 3, 3)
    J1, J2 = AntilinearOperator(M1), AntilinearOperator(M2)
    psi = _random_complex(rng, 3)
    assert np.allclose(J1(psi), M1 @ psi.conj())
    prod = J1 @ J2
    assert isinstance(prod, np.ndarray)
    assert np.allclose(prod @ psi, J1(J2(psi)))
    X = _random_complex(rng, 3, 3)
    assert np.allclose((J1 @ X)(psi), J1(X @ psi))
    assert np.allclose((X @ J1)(psi), X @ J1(psi))


def test_antilinear_adjoint_and_inverse():
    rng = np.random.default_rng(1)
    J = AntilinearOperator(_random_complex(rng, 4, 4))
    x, y = _random_complex(rng, 4), _random_complex(rng, 4)
    # <x, J y> = conj(<J* x, y>)
    assert np.isclose(np.vdot(x, J(y)), np.conj(np.vdot(J.adjoint(x), y)))
    assert np.allclose(J.inverse(J(x)), x)
    assert conjugation(4).involution_residual() == 0.0
    assert not tomita.is_antiunitary_involution(AntilinearOperator(2 * np.eye(2)))


def test_antilinear_rejects_bad_input():
    with pytest.raises(ValueError):
        AntilinearOperator(np.ones((2, 3)))
    with pytest.raises(ValueError):
        AntilinearOperator([[np.nan]])


def test_op_norm_fast_path_matches_svd():
    rng = np.random.default_rng(2)
    P = np.eye(5)[rng.permutation(5)] * _random_complex(rng, 5)
    assert np.isclose(op_norm(P), np.linalg.norm(P, 2))
    X = _random_complex(rng, 5, 5)
    assert np.isclose(op_norm(X), np.linalg.norm(X, 2))
    assert op_distance(X, AntilinearOperator(X)) == np.inf


def test_closure_examples():
    A = algebra_closure([np.kron(E, np.eye(2)) for E in tomita.matrix_units(2)])
    assert A.size == 4
    assert algebra_closure([np.diag([1.0, 2.0])]).size == 2
    H = np.array([[1.0, 1.0], [1.0, -1.0]])
    B = algebra_closure([H, np.diag([1.0, 0.0])])
    assert B.size == 4


def test_commutant_example():
    assert algebra_distance(commutant(left_factor(2)), right_factor(2)) <= 1e-12
    assert algebra_distance(commutant(commutant(left_factor(2))), left_factor(2)) <= 1e-12


def test_intersection_of_factors_is_scalars():
    I = intersection(left_factor(2), right_factor(2))
    assert I.size == 1
    assert np.allclose(I.basis[0] / I.basis[0][0, 0], np.eye(4))


def test_cyclic_separating_examples():
    A = left_factor(2)
    assert is_cyclic_separating(A, (np.kron(E1, E1) + np.kron(E2, E2)) / np.sqrt(2)) == (True, True)
    assert is_cyclic_separating(A, np.kron(E1, E1)) == (False, False)
    with pytest.raises(ModularError):
        compute_modular(A, np.kron(E1, E1))


def test_tracial_state():
    D = compute_modular(left_factor(2), schmidt_vector([0.5, 0.5]))
    assert np.allclose(D.Delta, np.eye(4), atol=1e-12)
    rng = np.random.default_rng(3)
    xi, eta = _random_complex(rng, 2), _random_complex(rng, 2)
    assert np.allclose(D.J(np.kron(xi, eta)), np.kron(eta.conj(), xi.conj()), atol=1e-12)


def test_spectrum_against_oracles():
    A = left_factor(2)
    omega = schmidt_vector([2 / 3, 1 / 3])
    D = compute_modular(A, omega)
    brute = oracles.brute_force_delta_spectrum(A.basis, omega)
    assert np.max(np.abs(D.spectrum() - brute)) <= 1e-12
    assert np.max(np.abs(D.spectrum() - oracles.schmidt_delta_spectrum([2 / 3, 1 / 3]))) <= 1e-12
    assert np.allclose(D.spectrum(), [0.5, 1, 1, 2], atol=1e-12)


def test_modular_invariants_and_kms():
    A = left_factor(2)
    D = compute_modular(A, schmidt_vector([2 / 3, 1 / 3]))
    rep = verify_tomita(A, D)
    assert rep.ok, rep.residuals
    assert kms_residual(A, D) <= 1e-12
    psi = np.arange(4.0) + 1j
    # S a Omega = a* Omega on the basis
    for a in A.basis:
        assert np.allclose(D.S(a @ D.Omega), a.conj().T @ D.Omega)
    U = modular_flow(D, 0.3)
    assert np.allclose(U @ U.conj().T, np.eye(4))
    assert np.allclose(modular_flow(D, 0.0) @ psi, psi)


def test_sabotaged_delta_is_detected():
    A = left_factor(2)
    D = compute_modular(A, schmidt_vector([2 / 3, 1 / 3]))
    bad = ModularData(J=D.J, Delta=np.eye(4, dtype=complex), Omega=D.Omega)
    rep = verify_tomita(A, bad)
    assert all(v <= 1e-9 for k, v in rep.residuals.items() if k.startswith("flow_invariance"))
    assert "Delta^1/2 a Omega=J a* Omega" in rep.failed()


def test_commutant_has_inverse_flow():
    A = left_factor(2)
    omega = schmidt_vector([0.7, 0.3])
    D = compute_modular(A, omega)
    Dc = compute_modular(commutant(A), omega)
    assert np.allclose(Dc.Delta, np.linalg.inv(D.Delta), atol=1e-10)
    assert op_distance(Dc.J, D.J) <= 1e-10


def test_transport_examples():
    A, B = left_factor(2), right_factor(2)
    omega = schmidt_vector([0.6, 0.4])
    rep = transport_modular(swap_operator(2), A, B, omega, omega)
    assert rep.ok and rep.residuals and not rep.notes
    other = schmidt_vector([0.9, 0.1])
    rep = transport_modular(swap_operator(2), A, B, omega, other)
    assert "precondition" in rep.notes and not rep.residuals


def test_random_fixtures():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(100):
        A, omega = tomita.random_fixture(rng)
        assert A.dim <= 16
        D = compute_modular(A, omega)
        rep = verify_tomita(A, D)
        worst = max(worst, max(rep.residuals.values()))
    assert worst <= 1e-9


def test_random_fixture_spectrum_matches_oracle():
    rng = np.random.default_rng(5)
    for _ in range(10):
        A, omega = tomita.random_fixture(rng, max_dim=9)
        D = compute_modular(A, omega)
        brute = oracles.brute_force_delta_spectrum(A.basis, omega)
        assert np.allclose(D.spectrum(), brute, rtol=1e-8, atol=1e-10)


def test_ill_conditioned_vector_rejected():
    with pytest.raises(ModularError):
        compute_modular(left_factor(2), schmidt_vector([1 - 1e-10, 1e-10]))


def test_algebra_membership():
    A = left_factor(2)
    assert A.contains(np.kron(np.array([[0, 1], [1, 0]]), np.eye(2)))
    assert not A.contains(np.kron(np.eye(2), np.array([[0, 1], [1, 0]])))
    assert isinstance(A, FiniteVNAlgebra)
