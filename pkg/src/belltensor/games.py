"""Bell functionals (game matrices), their biases and related quantities."""

from __future__ import annotations

import json

import numpy as np

from . import sdp
from .errors import (DegenerateGameError, SingularMatrixError, SizeError,
                     ValidationError)
from .linalg import real_inverse, real_matrix_from_json, real_matrix_to_json

MAX_QUESTIONS = 24

# Krivine's upper bound on the real Grothendieck constant; used only as a
# sanity bound on quantum/classical bias ratios, never as an equality target.
GROTHENDIECK_BOUND = 1.7823


class GameMatrix:
    """Real N x N payoff matrix of a two-player correlation game.

    Immutable; the inverse is computed at construction time and cached
    (None when the matrix is singular).
    """

    __slots__ = ("m", "inverse")

    def __init__(self, m):
        m = np.array(m, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"game matrix must be square, got {m.shape}")
        if m.shape[0] < 2:
            raise ValidationError("games need at least two questions per side")
        m.setflags(write=False)
        self.m = m
        try:
            inv = real_inverse(m)
            inv.setflags(write=False)
        except SingularMatrixError:
            inv = None
        self.inverse = inv

    @property
    def n(self) -> int:
        return self.m.shape[0]

    @property
    def invertible(self) -> bool:
        return self.inverse is not None

    def __repr__(self):
        return f"GameMatrix(n={self.n}, invertible={self.invertible})"


def _as_matrix(M) -> np.ndarray:
    return M.m if isinstance(M, GameMatrix) else np.asarray(M, dtype=float)


def _sign_vectors(n: int):
    """All sign vectors z in {+-1}^n with z[0] = +1 (z and -z are equivalent)."""
    out = np.ones((2 ** (n - 1), n))
    for k in range(2 ** (n - 1)):
        for x in range(1, n):
            if (k >> (x - 1)) & 1:
                out[k, x] = -1.0
    return out


def classical_bias(M) -> float:
    """Classical bias: max over sign vectors z of ||M^T z||_1 (exhaustive)."""
    m = _as_matrix(M)
    n = m.shape[0]
    if n > MAX_QUESTIONS:
        raise SizeError(f"classical bias enumeration infeasible for N={n} > "
                        f"{MAX_QUESTIONS}")
    best = 0.0
    total = 2 ** (n - 1)
    chunk = 1 << 14
    for start in range(0, total, chunk):
        ks = np.arange(start, min(start + chunk, total))
        z = np.ones((ks.size, n))
        for x in range(1, n):
            z[:, x] = 1.0 - 2.0 * ((ks >> (x - 1)) & 1)
        vals = np.abs(z @ m).sum(axis=1)
        best = max(best, float(vals.max()))
    return best


def linf_injective_norm(M) -> float:
    """Entrywise max-abs norm (the l_inf (x)_eps l_inf injective norm)."""
    m = _as_matrix(M)
    return float(np.max(np.abs(m))) if m.size else 0.0


def normalize(M: GameMatrix) -> GameMatrix:
    """Rescale a game so its classical bias is 1."""
    beta = classical_bias(M)
    if beta <= 0.0:
        raise DegenerateGameError("cannot normalize a game with zero classical bias")
    return GameMatrix(_as_matrix(M) / beta)


def uncertainty_product(M: GameMatrix) -> float:
    """Product of the classical bias of M and the max-abs entry of M^{-1}.

    At least sqrt(N/2) for every invertible game; equal to 1 exactly for
    scalar multiples of 2x2 Hadamard matrices.
    """
    if not isinstance(M, GameMatrix):
        M = GameMatrix(M)
    if not M.invertible:
        raise SingularMatrixError("uncertainty product requires an invertible game")
    return classical_bias(M) * linf_injective_norm(M.inverse)


def is_scaled_hadamard(M, tol: float = 1e-9) -> bool:
    """True iff all entries of M have equal magnitude and M M^T is that
    magnitude squared times N times the identity."""
    m = _as_matrix(M)
    n = m.shape[0]
    a = float(np.max(np.abs(m)))
    if a == 0.0:
        return False
    if np.max(np.abs(np.abs(m) - a)) > tol:
        return False
    target = a * a * n * np.eye(n)
    return bool(np.max(np.abs(m @ m.T - target)) <= tol * max(1.0, a * a * n))


def quantum_bias_sdp(M) -> float:
    """Quantum bias via the Tsirelson (Gram matrix) semidefinite relaxation.

    Maximizes <M, gamma> over gamma the off-diagonal block of a PSD matrix
    with unit diagonal.
    """
    m = _as_matrix(M)
    n = m.shape[0]
    if n > MAX_QUESTIONS:
        raise SizeError(f"quantum bias SDP capped at N={MAX_QUESTIONS}, got {n}")
    # <C, G> = sum_xy M_xy G[x, n+y] once C mirrors M/2 into both cross blocks.
    C = np.zeros((2 * n, 2 * n))
    C[:n, n:] = m / 2
    C = C + C.T
    b = sdp.SdpBuilder("max")
    b.add_block("gram", 2 * n)
    b.set_objective(blocks={"gram": C})
    for i in range(2 * n):
        E = np.zeros((2 * n, 2 * n))
        E[i, i] = 1.0
        b.add_scalar_constraint(block_mats={"gram": E}, rhs=1.0)
    sol = sdp.solve(b.build())
    if sol.status != "optimal":
        from .errors import SolverError
        raise SolverError(f"quantum bias SDP did not converge: {sol.status}",
                          residuals=sol.residuals)
    return float(sol.primal_value)


# --- named games ------------------------------------------------------------

def chsh() -> GameMatrix:
    """The CHSH game matrix (with the 1/2 prefactor)."""
    return GameMatrix(0.5 * np.array([[1.0, 1.0], [1.0, -1.0]]))


def deformed_chsh(t: float) -> GameMatrix:
    """One-parameter deformation [[1, 1], [1, -t]]; singular at t = -1."""
    return GameMatrix([[1.0, 1.0], [1.0, -float(t)]])


def biased_chsh(p: float, q: float) -> GameMatrix:
    """Biased CHSH game G(p, q); singular on the boundary of [0, 1]^2."""
    p = float(p)
    q = float(q)
    if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
        raise ValidationError(f"biased game parameters must be in [0,1], "
                              f"got p={p}, q={q}")
    return GameMatrix([[p * q, p * (1 - q)],
                       [q * (1 - p), -(1 - p) * (1 - q)]])


def i3322() -> GameMatrix:
    """Pure correlation part of the I_3322 inequality (with the 1/4 prefactor)."""
    return GameMatrix(0.25 * np.array([[1.0, 1.0, 1.0],
                                       [1.0, 1.0, -1.0],
                                       [1.0, -1.0, 0.0]]))


def game_from_id(spec: str) -> GameMatrix:
    """Resolve a game from a string id or a JSON file path.

    Ids: "chsh", "mt:<t>", "gpq:<p>:<q>", "i3322"; anything else is treated
    as a path to a RealMatrix JSON file.
    """
    if spec == "chsh":
        return chsh()
    if spec == "i3322":
        return i3322()
    if spec.startswith("mt:"):
        try:
            return deformed_chsh(float(spec[3:]))
        except ValueError as exc:
            raise ValidationError(f"bad deformed-CHSH id {spec!r}") from exc
    if spec.startswith("gpq:"):
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValidationError(f"bad biased-game id {spec!r}; "
                                  "expected gpq:<p>:<q>")
        try:
            return biased_chsh(float(parts[1]), float(parts[2]))
        except ValueError as exc:
            raise ValidationError(f"bad biased-game id {spec!r}") from exc
    try:
        with open(spec) as fh:
            return GameMatrix(real_matrix_from_json(json.load(fh)))
    except OSError as exc:
        raise ValidationError(f"unknown game id and unreadable path: {spec!r} "
                              f"({exc})") from exc


def game_to_json(M: GameMatrix) -> dict:
    return real_matrix_to_json(M.m)
