"""Finite-dimensional Tomita–Takesaki engine.

Linear operators are plain complex ``ndarray`` matrices.  Antilinear
operators carry a matrix ``M`` and act as ``psi -> M @ conj(psi)`` in the
fixed orthonormal basis; products and adjoints follow from that single
convention (the adjoint of an antilinear operator has matrix ``M.T``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

TOL_OP = 1e-9
MAX_CONDITION = 1e8


class ModularError(ValueError):
    """Input does not admit modular data (not cyclic/separating, ill-conditioned)."""


def _is_diagonal(X: np.ndarray) -> bool:
    return X.ndim == 2 and X.shape[0] == X.shape[1] and np.count_nonzero(X) == np.count_nonzero(np.diagonal(X))


def matmul(A, B) -> np.ndarray:
    """``A @ B`` with a shortcut when either factor is diagonal (same result, O(n^2))."""
    A, B = np.asarray(A), np.asarray(B)
    if B.ndim == 2 and _is_diagonal(A):
        return np.diagonal(A)[:, None] * B
    if A.ndim == 2 and _is_diagonal(B):
        return A * np.diagonal(B)[None, :]
    return A @ B


class AntilinearOperator:
    """``psi -> M conj(psi)``."""

    __array_ufunc__ = None  # make ``ndarray @ J`` defer to __rmatmul__

    def __init__(self, M):
        M = np.array(M, dtype=complex)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("antilinear operator needs a square matrix")
        if not np.all(np.isfinite(M)):
            raise ValueError("non-finite entries")
        M.setflags(write=False)
        self.M = M

    @property
    def dim(self) -> int:
        return self.M.shape[0]

    def __call__(self, psi) -> np.ndarray:
        return self.M @ np.conj(psi)

    def __matmul__(self, other):
        if isinstance(other, AntilinearOperator):
            return matmul(self.M, np.conj(other.M))
        other = np.asarray(other)
        if other.ndim == 1:
            return self(other)
        return AntilinearOperator(matmul(self.M, np.conj(other)))

    def __rmatmul__(self, other):
        return AntilinearOperator(matmul(other, self.M))

    @property
    def adjoint(self) -> "AntilinearOperator":
        return AntilinearOperator(self.M.T)

    @property
    def inverse(self) -> "AntilinearOperator":
        return AntilinearOperator(np.conj(np.linalg.inv(self.M)))

    def involution_residual(self) -> float:
        """max(|J^2 - 1|, |J^* J - 1|) in spectral norm."""
        eye = np.eye(self.dim)
        return max(op_norm(self.M @ np.conj(self.M) - eye), op_norm(self.M.conj().T @ self.M - eye))

    def __repr__(self) -> str:
        return f"AntilinearOperator(dim={self.dim})"


def conjugation(dim: int) -> AntilinearOperator:
    """Componentwise complex conjugation."""
    return AntilinearOperator(np.eye(dim))


def op_norm(X) -> float:
    X = X.M if isinstance(X, AntilinearOperator) else np.asarray(X)
    if X.size == 0:
        return 0.0
    nz = X != 0
    if X.ndim == 2 and np.all(nz.sum(axis=0) <= 1) and np.all(nz.sum(axis=1) <= 1):
        # at most one entry per row and column: singular values are the entries
        return float(np.max(np.abs(X)))
    return float(np.linalg.norm(X, 2))


def op_distance(A, B) -> float:
    """Spectral-norm distance; antilinear operators compare by matrix."""
    if isinstance(A, AntilinearOperator) != isinstance(B, AntilinearOperator):
        return float("inf")
    a = A.M if isinstance(A, AntilinearOperator) else np.asarray(A)
    b = B.M if isinstance(B, AntilinearOperator) else np.asarray(B)
    if a.shape != b.shape:
        return float("inf")
    return op_norm(a - b)


def is_antiunitary_involution(J: AntilinearOperator, tol: float = TOL_OP) -> bool:
    return J.involution_residual() <= tol


# ---------------------------------------------------------------------------
# algebras


def _orthonormal_rows(vectors: np.ndarray, tol: float) -> np.ndarray:
    if len(vectors) == 0:
        return vectors
    u, s, vh = np.linalg.svd(vectors, full_matrices=False)
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    return vh[:rank]


@dataclass(frozen=True, eq=False)
class FiniteVNAlgebra:
    """Unital *-algebra given by a Hilbert–Schmidt orthonormal basis."""

    dim: int
    basis: np.ndarray  # shape (k, dim, dim)

    def __post_init__(self):
        b = np.array(self.basis, dtype=complex)
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def size(self) -> int:
        return self.basis.shape[0]

    @property
    def flat(self) -> np.ndarray:
        return self.basis.reshape(self.size, -1)

    def contains(self, X, tol: float = TOL_OP) -> bool:
        return span_residual([np.asarray(X)], self) <= tol


def span_residual(ops: Sequence[np.ndarray] | np.ndarray, A: FiniteVNAlgebra) -> float:
    """Largest HS distance of a unit-normalised op from span(A)."""
    ops = np.asarray(ops, dtype=complex).reshape(len(ops), -1)
    norms = np.linalg.norm(ops, axis=1)
    ops = ops[norms > 0] / norms[norms > 0, None]
    if len(ops) == 0:
        return 0.0
    Q = A.flat
    resid = ops - (ops @ Q.conj().T) @ Q
    return float(np.max(np.linalg.norm(resid, axis=1)))


def algebra_distance(A: FiniteVNAlgebra, B: FiniteVNAlgebra) -> float:
    """Mutual containment residual; infinite when dimensions differ."""
    if A.dim != B.dim or A.size != B.size:
        return float("inf")
    return max(span_residual(A.basis, B), span_residual(B.basis, A))


def algebra_closure(generators: Sequence[np.ndarray], tol: float = 1e-10) -> FiniteVNAlgebra:
    """Smallest unital *-algebra containing ``generators``."""
    gens = [np.asarray(g, dtype=complex) for g in generators]
    if not gens:
        raise ValueError("need at least one generator")
    d = gens[0].shape[0]
    if any(g.shape != (d, d) for g in gens):
        raise ValueError("generator dimension mismatch")
    gens = gens + [g.conj().T for g in gens]
    basis = _orthonormal_rows(np.eye(d).reshape(1, -1) / np.sqrt(d), tol)
    while True:
        mats = basis.reshape(-1, d, d)
        words = np.concatenate([mats, np.einsum("kij,gjl->kgil", mats, np.array(gens)).reshape(-1, d, d)])
        new = _orthonormal_rows(words.reshape(len(words), -1), tol)
        if len(new) == len(basis):
            return FiniteVNAlgebra(d, new.reshape(-1, d, d))
        basis = new


def commutant(A: FiniteVNAlgebra, tol: float = 1e-10) -> FiniteVNAlgebra:
    """All X with [X, a] = 0 for every basis element a."""
    d = A.dim
    eye = np.eye(d)
    # row-major vec: vec(a X) = (a ⊗ 1) vec X, vec(X a) = (1 ⊗ a^T) vec X
    gram = np.zeros((d * d, d * d), dtype=complex)
    for a in A.basis:
        C = np.kron(a, eye) - np.kron(eye, a.T)
        gram += C.conj().T @ C
    w, v = np.linalg.eigh(gram)
    null = v[:, w <= tol * max(1.0, w[-1])]
    return FiniteVNAlgebra(d, null.T.reshape(-1, d, d))


def intersection(A: FiniteVNAlgebra, B: FiniteVNAlgebra, tol: float = 1e-8) -> FiniteVNAlgebra:
    u, s, vh = np.linalg.svd(A.flat.conj() @ B.flat.T)
    # principal vectors with cosine 1 are common to both spans
    common = u[:, s >= 1.0 - tol].T @ A.flat
    return FiniteVNAlgebra(A.dim, common.reshape(-1, A.dim, A.dim))


def _rank(vectors: np.ndarray, tol: float = 1e-10) -> int:
    if len(vectors) == 0:
        return 0
    s = np.linalg.svd(vectors, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


def is_cyclic_separating(A: FiniteVNAlgebra, omega, tol: float = 1e-10) -> tuple[bool, bool]:
    omega = np.asarray(omega, dtype=complex)
    if np.linalg.norm(omega) == 0:
        raise ValueError("zero vector")
    cyclic = _rank(A.basis @ omega, tol) == A.dim
    separating = _rank(commutant(A).basis @ omega, tol) == A.dim
    return cyclic, separating


# ---------------------------------------------------------------------------
# modular data


@dataclass(frozen=True, eq=False)
class ModularData:
    J: AntilinearOperator
    Delta: np.ndarray
    Omega: np.ndarray
    S: AntilinearOperator | None = None
    condition: float = 1.0

    @property
    def dim(self) -> int:
        return self.Delta.shape[0]

    def spectrum(self) -> np.ndarray:
        return np.sort(np.linalg.eigvalsh(self.Delta))


def _hermitian_power(H: np.ndarray, p: complex) -> np.ndarray:
    w, v = np.linalg.eigh(H)
    return (v * w.astype(complex) ** p) @ v.conj().T


def compute_modular(A: FiniteVNAlgebra, omega, max_condition: float = MAX_CONDITION) -> ModularData:
    """Polar decomposition of ``S: a Omega -> a* Omega`` for the algebra A."""
    omega = np.asarray(omega, dtype=complex)
    omega = omega / np.linalg.norm(omega)
    cyclic, separating = is_cyclic_separating(A, omega)
    if not (cyclic and separating):
        what = [name for name, ok in (("cyclic", cyclic), ("separating", separating)) if not ok]
        raise ModularError("vector is not " + " and not ".join(what) + " for the algebra")
    X = np.stack([a @ omega for a in A.basis], axis=1)
    Y = np.stack([a.conj().T @ omega for a in A.basis], axis=1)
    S = AntilinearOperator(Y @ np.conj(np.linalg.inv(X)))
    Delta = S.adjoint @ S
    Delta = 0.5 * (Delta + Delta.conj().T)
    w = np.linalg.eigvalsh(Delta)
    if w[0] <= 0:
        raise ModularError("modular operator is not positive definite")
    cond = float(w[-1] / w[0])
    if cond > max_condition:
        raise ModularError(f"modular operator condition number {cond:.3e} exceeds {max_condition:.1e}")
    J = S @ _hermitian_power(Delta, -0.5)
    return ModularData(J=J, Delta=Delta, Omega=omega, S=S, condition=cond)


def modular_flow(D: ModularData | np.ndarray, t: float) -> np.ndarray:
    """``Delta^{it}``."""
    Delta = D.Delta if isinstance(D, ModularData) else np.asarray(D)
    return _hermitian_power(Delta, 1j * t)


@dataclass
class Report:
    residuals: dict[str, float]
    tol: float
    notes: dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v <= self.tol for v in self.residuals.values())

    def failed(self) -> list[str]:
        return [k for k, v in self.residuals.items() if v > self.tol]


def verify_tomita(A: FiniteVNAlgebra, D: ModularData, ts: Sequence[float] = (0.1, 1.0, 7.0),
                  tol: float = TOL_OP) -> Report:
    res: dict[str, float] = {}
    comm = commutant(A)
    JAJ = np.array([D.J @ a @ D.J for a in A.basis])
    transformed = FiniteVNAlgebra(A.dim, _orthonormal_rows(JAJ.reshape(len(JAJ), -1), 1e-10).reshape(-1, A.dim, A.dim))
    res["JMJ=M'"] = algebra_distance(transformed, comm)
    for t in ts:
        U = modular_flow(D, t)
        res[f"flow_invariance(t={t:g})"] = span_residual(np.array([U @ a @ U.conj().T for a in A.basis]), A)
    res["J Omega=Omega"] = float(np.linalg.norm(D.J(D.Omega) - D.Omega))
    res["Delta Omega=Omega"] = float(np.linalg.norm(D.Delta @ D.Omega - D.Omega))
    half = _hermitian_power(D.Delta, 0.5)
    res["Delta^1/2 a Omega=J a* Omega"] = max(
        float(np.linalg.norm(half @ (a @ D.Omega) - D.J(a.conj().T @ D.Omega))) for a in A.basis
    )
    return Report(res, tol)


def kms_residual(A: FiniteVNAlgebra, D: ModularData) -> float:
    """max |<Omega, a Delta b Omega> - <Omega, b a Omega>| over basis pairs."""
    w = D.Omega
    worst = 0.0
    for a in A.basis:
        for b in A.basis:
            lhs = np.vdot(w, a @ (D.Delta @ (b @ w)))
            rhs = np.vdot(w, b @ (a @ w))
            worst = max(worst, abs(lhs - rhs))
    return float(worst)


def transport_modular(u, A: FiniteVNAlgebra, B: FiniteVNAlgebra, omega_a, omega_b,
                      tol: float = TOL_OP) -> Report:
    """Check u J_A u* = J_B and u Delta_A u* = Delta_B for a unitary u with uAu* = B."""
    u = np.asarray(u, dtype=complex)
    omega_a = np.asarray(omega_a, dtype=complex)
    omega_b = np.asarray(omega_b, dtype=complex)
    pre = {
        "unitary": op_norm(u.conj().T @ u - np.eye(u.shape[0])),
        "uAu*=B": max(span_residual(np.array([u @ a @ u.conj().T for a in A.basis]), B),
                      span_residual(np.array([u.conj().T @ b @ u for b in B.basis]), A)),
        "u Omega_A=Omega_B": float(np.linalg.norm(u @ omega_a - omega_b)),
    }
    bad = [k for k, v in pre.items() if v > tol]
    if bad:
        return Report({}, tol, notes={"precondition": "failed: " + ", ".join(bad)})
    Da = compute_modular(A, omega_a)
    Db = compute_modular(B, omega_b)
    res = {
        "uJu*=J_B": op_distance(u @ Da.J @ u.conj().T, Db.J),
        "uDeltau*=Delta_B": op_norm(u @ Da.Delta @ u.conj().T - Db.Delta),
    }
    return Report(res, tol)


# ---------------------------------------------------------------------------
# fixtures


def matrix_units(n: int) -> list[np.ndarray]:
    out = []
    for i in range(n):
        for j in range(n):
            E = np.zeros((n, n), dtype=complex)
            E[i, j] = 1.0
            out.append(E)
    return out


def left_factor(n: int, m: int | None = None) -> FiniteVNAlgebra:
    """``M_n ⊗ 1_m``."""
    m = n if m is None else m
    return algebra_closure([np.kron(E, np.eye(m)) for E in matrix_units(n)])


def right_factor(n: int, m: int | None = None) -> FiniteVNAlgebra:
    """``1_m ⊗ M_n``."""
    m = n if m is None else m
    return algebra_closure([np.kron(np.eye(m), E) for E in matrix_units(n)])


def schmidt_vector(weights: Sequence[float]) -> np.ndarray:
    """``sum_i sqrt(w_i) e_i ⊗ e_i``."""
    w = np.asarray(weights, dtype=float)
    n = len(w)
    v = np.zeros(n * n, dtype=complex)
    for i in range(n):
        v[i * n + i] = np.sqrt(w[i])
    return v / np.linalg.norm(v)


def swap_operator(n: int) -> np.ndarray:
    P = np.zeros((n * n, n * n))
    for i in range(n):
        for j in range(n):
            P[j * n + i, i * n + j] = 1.0
    return P


def _haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_fixture(rng: np.random.Generator, max_dim: int = 16, min_weight: float = 0.05
                   ) -> tuple[FiniteVNAlgebra, np.ndarray]:
    """Random ``⊕_k M_{n_k} ⊗ 1_{n_k}`` in a random basis with a faithful vector.

    The vector has full Schmidt rank in every block, so it is cyclic and
    separating; weights are bounded below to keep Delta well conditioned.
    """
    while True:
        blocks = []
        total = 0
        while True:
            n = int(rng.integers(1, 5))
            if total + n * n > max_dim:
                break
            blocks.append(n)
            total += n * n
            if rng.random() < 0.35:
                break
        if blocks:
            break
    d = total
    gens = []
    omega = np.zeros(d, dtype=complex)
    offset = 0
    for n in blocks:
        for E in matrix_units(n):
            G = np.zeros((d, d), dtype=complex)
            G[offset:offset + n * n, offset:offset + n * n] = np.kron(E, np.eye(n))
            gens.append(G)
        w = rng.uniform(min_weight, 1.0, size=n)
        v = schmidt_vector(w) * rng.uniform(0.5, 1.0)
        # local unitary on the commutant leg keeps the vector cyclic and separating
        omega[offset:offset + n * n] = np.kron(np.eye(n), _haar_unitary(rng, n)) @ v
        offset += n * n
    U = _haar_unitary(rng, d)
    gens = [U @ G @ U.conj().T for G in gens]
    omega = U @ omega
    return algebra_closure(gens), omega / np.linalg.norm(omega)
