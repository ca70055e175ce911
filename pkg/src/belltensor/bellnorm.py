"""The game-locality norm of a measurement tuple, its vector norms, the
Bell-locality predicate, and a see-saw lower-bound oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularMatrixError, ValidationError
from .games import GameMatrix, classical_bias
from .linalg import hermitian_part, matrix_abs
from .measurements import MeasurementTuple

BELL_LOCAL_SLACK = 1e-9


def _check_shapes(A: MeasurementTuple, M: GameMatrix):
    if A.n != M.n:
        raise ValidationError(
            f"tuple has {A.n} observables but game has {M.n} questions")


def _game_columns(A: MeasurementTuple, M: GameMatrix) -> np.ndarray:
    """C_y = sum_x M_xy A_x for each question y, as an (n, d, d) array."""
    return np.einsum("xy,xij->yij", M.m, A.stack())


def m_bell_norm(A: MeasurementTuple, M: GameMatrix) -> float:
    """Largest quantum bias of game M with Alice's observables fixed to A.

    Computed as the top eigenvalue of sum_y |sum_x M_xy A_x|.  The value is
    well defined for singular games too, but is only a norm when M is
    invertible (check M.invertible).
    """
    _check_shapes(A, M)
    total = np.zeros((A.dim, A.dim), dtype=complex)
    for C in _game_columns(A, M):
        total += matrix_abs(C)
    return float(np.linalg.eigvalsh(total)[-1])


def vector_m_norm(p, M: GameMatrix) -> float:
    """||M^T p||_1; a norm on R^N when M is invertible."""
    p = np.asarray(p, dtype=float)
    if p.shape != (M.n,):
        raise ValidationError(f"vector has shape {p.shape}, game expects ({M.n},)")
    return float(np.abs(M.m.T @ p).sum())


def vector_m_dual_norm(p, M: GameMatrix) -> float:
    """The dual norm ||M^{-1} p||_inf; requires an invertible game."""
    p = np.asarray(p, dtype=float)
    if p.shape != (M.n,):
        raise ValidationError(f"vector has shape {p.shape}, game expects ({M.n},)")
    if not M.invertible:
        raise SingularMatrixError("dual norm requires an invertible game")
    return float(np.max(np.abs(M.inverse @ p)))


def is_bell_local(A: MeasurementTuple, M: GameMatrix) -> bool:
    """True when Alice cannot violate the Bell inequality of M with tuple A."""
    return m_bell_norm(A, M) <= classical_bias(M) + BELL_LOCAL_SLACK


# --- see-saw oracle ----------------------------------------------------------

@dataclass
class SeesawResult:
    value: float
    bob: MeasurementTuple
    state: np.ndarray  # bipartite state on C^d (x) C^d, flattened
    iterations: int
    converged: bool
    history: list  # objective after each state update of the best restart


def _hermitian_sign(T: np.ndarray) -> np.ndarray:
    """V diag(sign(w)) V* with sign(0) := +1."""
    T = hermitian_part(T)
    w, V = np.linalg.eigh(T)
    s = np.where(w < 0.0, -1.0, 1.0)
    return hermitian_part((V * s) @ V.conj().T)


def seesaw_bias(A: MeasurementTuple, M: GameMatrix, restarts: int = 20,
                iters: int = 200, seed: int = 0,
                tol: float = 1e-12) -> SeesawResult:
    """Alternating maximization over the shared state and Bob's observables.

    Bob's dimension equals Alice's.  For fixed Bob observables the state is
    the top eigenvector of sum_y C_y (x) B_y; for a fixed state each B_y is
    the Hermitian sign of the partial contraction of C_y against it.  Always
    a lower bound on m_bell_norm(A, M); the best value over restarts is
    returned.
    """
    _check_shapes(A, M)
    if restarts < 1:
        raise ValidationError("need at least one restart")
    d = A.dim
    n = A.n
    cols = _game_columns(A, M)

    best: SeesawResult | None = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        bob = []
        for _ in range(n):
            X = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            bob.append(_hermitian_sign(X + X.conj().T))

        history: list[float] = []
        K = None
        converged = False
        for it in range(iters):
            big = sum(np.kron(C, B) for C, B in zip(cols, bob))
            w, V = np.linalg.eigh(hermitian_part(big))
            value = float(w[-1])
            psi = V[:, -1]
            history.append(value)
            if len(history) >= 2 and value - history[-2] < tol:
                converged = True
                break
            K = psi.reshape(d, d)
            # <psi| C (x) B |psi> = Tr[(K* C K)^T B]
            bob = [_hermitian_sign((K.conj().T @ C @ K).T) for C in cols]
        else:
            psi = V[:, -1]

        result = SeesawResult(
            value=history[-1],
            bob=MeasurementTuple(bob),
            state=psi.copy(),
            iterations=len(history),
            converged=converged,
            history=history,
        )
        if best is None or result.value > best.value:
            best = result
    return best
