"""Measurement compatibility: the epsilon-star SDP pair for two effects, the
compatibility norm of an observable tuple, the white-noise robustness
threshold, and joint-POVM certificates."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import sdp
from .errors import CertificateError, SizeError, SolverError, ValidationError
from .linalg import (check_hermitian, hermitian_from_json, hermitian_part,
                     hermitian_to_json)
from .measurements import MeasurementTuple, observable_from_effect

MAX_COMPAT_OBSERVABLES = 4

COMPATIBLE_TOL = 1e-7
ELEMENT_PSD_SLACK = 1e-7
SUM_TOL = 1e-8
MARGINAL_TOL = 1e-7


def sign_vectors(n: int):
    """All sign vectors in {+1, -1}^n, plus-first lexicographic order."""
    return list(itertools.product((1, -1), repeat=n))


def sign_key(eps) -> str:
    """String key for a sign vector, e.g. (+1, -1, +1) -> "+-+"."""
    return "".join("+" if e > 0 else "-" for e in eps)


def key_to_signs(key: str) -> tuple:
    if not key or any(c not in "+-" for c in key):
        raise ValidationError(f"bad sign-vector key {key!r}")
    return tuple(1 if c == "+" else -1 for c in key)


def _checked_effect(E, name: str) -> np.ndarray:
    E = check_hermitian(E)
    observable_from_effect(E)  # raises unless 0 <= E <= I
    return E


def epsilon_star_primal(P, Q) -> float:
    """Smallest epsilon admitting an approximate joint measurement.

    Minimizes epsilon over delta >= 0 subject to
    delta + I - Q - P >= 0, Q + epsilon I - delta >= 0 and
    P + epsilon I - delta >= 0.  Nonpositive exactly when the two effects
    are compatible.
    """
    P = _checked_effect(P, "P")
    Q = _checked_effect(Q, "Q")
    if P.shape != Q.shape:
        raise ValidationError(f"effect dimensions differ: {P.shape} vs {Q.shape}")
    d = P.shape[0]
    I = np.eye(d)

    b = sdp.SdpBuilder("min")
    b.add_block("delta", d)
    for label in ("s0", "sq", "sp"):
        b.add_block(label, d)
    b.add_scalar("eps")
    b.set_objective(scalars={"eps": 1.0})
    # s0 = delta + I - Q - P
    b.add_matrix_constraint({"s0": 1.0, "delta": -1.0}, rhs=I - Q - P)
    # sq = Q + eps I - delta
    b.add_matrix_constraint({"sq": 1.0, "delta": 1.0}, rhs=Q,
                            scalar_mats={"eps": -I})
    # sp = P + eps I - delta
    b.add_matrix_constraint({"sp": 1.0, "delta": 1.0}, rhs=P,
                            scalar_mats={"eps": -I})
    sol = sdp.solve(b.build())
    if sol.status != "optimal":
        raise SolverError(f"epsilon-star primal SDP: {sol.status}",
                          residuals=sol.residuals)
    return float(sol.primal_value)


def epsilon_star_dual(P, Q) -> float:
    """Dual of epsilon_star_primal; equal to it by strong duality.

    Maximizes Tr[X(Q + P - I)] - Tr[YQ] - Tr[PZ] over PSD X, Y, Z with
    X <= Y + Z and Tr[Y + Z] = 1.
    """
    P = _checked_effect(P, "P")
    Q = _checked_effect(Q, "Q")
    if P.shape != Q.shape:
        raise ValidationError(f"effect dimensions differ: {P.shape} vs {Q.shape}")
    d = P.shape[0]
    I = np.eye(d)

    b = sdp.SdpBuilder("max")
    for label in ("X", "Y", "Z", "W"):
        b.add_block(label, d)
    b.set_objective(blocks={"X": Q + P - I, "Y": -Q, "Z": -P})
    # W = Y + Z - X encodes X <= Y + Z
    b.add_matrix_constraint({"W": 1.0, "X": 1.0, "Y": -1.0, "Z": -1.0},
                            rhs=np.zeros((d, d)))
    b.add_scalar_constraint(block_mats={"Y": I, "Z": I}, rhs=1.0)
    sol = sdp.solve(b.build())
    if sol.status != "optimal":
        raise SolverError(f"epsilon-star dual SDP: {sol.status}",
                          residuals=sol.residuals)
    return float(sol.primal_value)


def _compat_sdp(A: MeasurementTuple) -> tuple[float, dict]:
    """Solve the compatibility-norm SDP, returning (t, blocks by sign key)."""
    n, d = A.n, A.dim
    if n > MAX_COMPAT_OBSERVABLES:
        raise SizeError(f"compatibility norm uses 2^N blocks; "
                        f"N={n} exceeds the cap of {MAX_COMPAT_OBSERVABLES}")
    eps_list = sign_vectors(n)
    labels = [sign_key(e) for e in eps_list]
    I = np.eye(d)

    b = sdp.SdpBuilder("min")
    for label in labels:
        b.add_block(label, d)
    b.add_scalar("t")
    b.set_objective(scalars={"t": 1.0})
    b.add_matrix_constraint({label: 1.0 for label in labels},
                            rhs=np.zeros((d, d)), scalar_mats={"t": -I})
    for x in range(n):
        coeffs = {label: float(e[x]) for label, e in zip(labels, eps_list)}
        b.add_matrix_constraint(coeffs, rhs=A.observables[x])
    sol = sdp.solve(b.build())
    if sol.status != "optimal":
        raise SolverError(f"compatibility norm SDP: {sol.status}",
                          residuals=sol.residuals)
    blocks = {label: sol.block_values[label] for label in labels}
    return float(sol.scalar_values["t"]), blocks


def compatibility_norm(A: MeasurementTuple, return_blocks: bool = False):
    """The compatibility norm ||A||_c of an observable tuple.

    The smallest t admitting a decomposition A_x = sum_eps eps_x H_eps with
    H_eps >= 0 and sum_eps H_eps = t I.  At most 1 exactly when the tuple is
    compatible.  With return_blocks=True also returns the optimal H_eps as a
    dict keyed by sign vectors ("+-" style).
    """
    if A.is_zero():
        if return_blocks:
            d, n = A.dim, A.n
            uniform = {sign_key(e): np.zeros((d, d)) for e in sign_vectors(n)}
            return 0.0, uniform
        return 0.0
    t, blocks = _compat_sdp(A)
    return (t, blocks) if return_blocks else t


def gamma_threshold(A: MeasurementTuple) -> float:
    """Largest eta such that the noisy tuple eta*A is compatible: 1/||A||_c."""
    if A.is_zero():
        raise ValidationError("noise threshold is undefined for the zero tuple")
    return 1.0 / compatibility_norm(A)


def gamma_from_epsilon(eps_star: float) -> float:
    """Noise threshold of an effect pair from its epsilon-star: 1/(1+2 eps*)."""
    return 1.0 / (1.0 + 2.0 * float(eps_star))


# --- joint-POVM certificates -------------------------------------------------

@dataclass
class JointPovm:
    """A 2^n-outcome parent measurement indexed by sign vectors.

    Marginalizing over the signs of coordinate x recovers the effect pair of
    the x-th certified measurement.
    """

    n: int
    dim: int
    elements: dict  # sign key -> (dim, dim) Hermitian ndarray

    def marginal(self, x: int) -> np.ndarray:
        """sum of elements over sign vectors with eps_x = +1."""
        if not 0 <= x < self.n:
            raise ValidationError(f"marginal index {x} out of range for n={self.n}")
        total = np.zeros((self.dim, self.dim), dtype=complex)
        for key, X in self.elements.items():
            if key[x] == "+":
                total = total + X
        return total

    def verify(self, A: MeasurementTuple,
               psd_slack: float = ELEMENT_PSD_SLACK,
               sum_tol: float = SUM_TOL,
               marginal_tol: float = MARGINAL_TOL):
        """Check all certificate invariants against A; raise on failure."""
        if A.n != self.n or A.dim != self.dim:
            raise CertificateError(
                f"certificate shape (n={self.n}, dim={self.dim}) does not "
                f"match tuple (n={A.n}, dim={A.dim})")
        residuals = {}
        min_eig = 0.0
        total = np.zeros((self.dim, self.dim), dtype=complex)
        for key, X in self.elements.items():
            w = np.linalg.eigvalsh(X)
            min_eig = min(min_eig, float(w[0]))
            total = total + X
        residuals["min_eigenvalue"] = min_eig
        residuals["sum_deviation"] = float(
            np.max(np.abs(total - np.eye(self.dim))))
        for x in range(self.n):
            target = (np.eye(self.dim) + A.observables[x]) / 2.0
            residuals[f"marginal_{x}"] = float(
                np.max(np.abs(self.marginal(x) - target)))

        problems = []
        if residuals["min_eigenvalue"] < -psd_slack:
            problems.append(f"element eigenvalue {residuals['min_eigenvalue']:.3e}")
        if residuals["sum_deviation"] > sum_tol:
            problems.append(f"sum deviates from I by {residuals['sum_deviation']:.3e}")
        for x in range(self.n):
            r = residuals[f"marginal_{x}"]
            if r > marginal_tol:
                problems.append(f"marginal {x} off by {r:.3e}")
        if problems:
            raise CertificateError(
                "joint POVM certificate invalid: " + "; ".join(problems),
                residuals=residuals)
        return residuals


def joint_povm_from_decomposition(A: MeasurementTuple, blocks: dict) -> JointPovm:
    """Assemble and verify a joint-POVM certificate from candidate elements.

    `blocks` maps sign keys to Hermitian matrices that should be PSD, sum to
    the identity and have the marginals of A.  Raises CertificateError with
    per-constraint residuals when they do not.
    """
    expected = {sign_key(e) for e in sign_vectors(A.n)}
    if set(blocks) != expected:
        raise ValidationError(
            f"certificate keys {sorted(blocks)} do not cover the sign "
            f"vectors of length {A.n}")
    elements = {k: check_hermitian(v) for k, v in blocks.items()}
    povm = JointPovm(n=A.n, dim=A.dim, elements=elements)
    povm.verify(A)
    return povm


def is_compatible(A: MeasurementTuple):
    """Decide compatibility of a valid tuple; certify the positive answer.

    Returns (flag, certificate) where certificate is a verified JointPovm
    when the tuple is compatible and None otherwise.  The certificate
    elements are the SDP blocks shifted by (1 - t) I / 2^n, which restores
    sum-to-identity while preserving the marginals of A exactly.
    """
    if not A.is_valid():
        raise ValidationError(
            f"tuple is not a valid measurement tuple: max observable norm "
            f"{A.epsilon_norm():.12g} > 1")
    t, blocks = compatibility_norm(A, return_blocks=True)
    if t > 1.0 + COMPATIBLE_TOL:
        return False, None
    shift = max(0.0, 1.0 - t) / 2 ** A.n
    elements = {k: hermitian_part(H + shift * np.eye(A.dim))
                for k, H in blocks.items()}
    return True, joint_povm_from_decomposition(A, elements)


# --- serialization -----------------------------------------------------------

def joint_povm_to_json(povm: JointPovm) -> dict:
    return {
        "n": povm.n,
        "dim": povm.dim,
        "elements": {k: hermitian_to_json(X) for k, X in povm.elements.items()},
    }


def joint_povm_from_json(obj: dict) -> JointPovm:
    try:
        n = int(obj["n"])
        dim = int(obj["dim"])
        elements = {k: hermitian_from_json(v) for k, v in obj["elements"].items()}
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed joint POVM JSON: {exc}") from exc
    for key in elements:
        if len(key) != n:
            raise ValidationError(f"sign key {key!r} has length != n={n}")
        key_to_signs(key)
    return JointPovm(n=n, dim=dim, elements=elements)
