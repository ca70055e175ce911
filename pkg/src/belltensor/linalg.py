"""Dense Hermitian and real matrix kernels.

Everything here operates on plain numpy arrays; matrices are small
(d <= 16 in practice), so robustness is preferred over asymptotics.
"""

from __future__ import annotations

import numpy as np

from .errors import SingularMatrixError, ValidationError

HERMITICITY_TOL = 1e-12
ABS_CLAMP = 1e-12
SINGULARITY_SCALE = 1e-12


def hermitian_part(H: np.ndarray) -> np.ndarray:
    """Return the Hermitian part (H + H*) / 2."""
    H = np.asarray(H, dtype=complex)
    return (H + H.conj().T) / 2


def check_hermitian(H, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Validate that H is a square Hermitian matrix and return it symmetrized.

    Symmetrization (H + H*)/2 absorbs round-off before any decomposition.
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {H.shape}")
    if H.shape[0] < 1:
        raise ValidationError("matrix dimension must be >= 1")
    scale = max(1.0, float(np.max(np.abs(H))) if H.size else 1.0)
    deviation = float(np.max(np.abs(H - H.conj().T)))
    if deviation > tol * scale:
        raise ValidationError(
            f"matrix is not Hermitian: max |H - H*| = {deviation:.3e} "
            f"exceeds tolerance {tol:.1e} (scale {scale:.3e})"
        )
    return hermitian_part(H)


def hermitian_eig(H) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues sorted descending, orthonormal eigenvector columns)
    such that H = V diag(w) V*.
    """
    H = check_hermitian(H)
    w, V = np.linalg.eigh(H)
    return w[::-1].copy(), V[:, ::-1].copy()


def lambda_max(H) -> float:
    """Largest eigenvalue of a Hermitian matrix."""
    H = check_hermitian(H)
    return float(np.linalg.eigvalsh(H)[-1])


def matrix_abs(H) -> np.ndarray:
    """Matrix absolute value |H| = V diag(|w|) V* of a Hermitian matrix.

    Negative eigenvalues of magnitude below ABS_CLAMP are clamped to zero so
    the output stays positive semidefinite under round-off.
    """
    H = check_hermitian(H)
    w, V = np.linalg.eigh(H)
    w_abs = np.where((w < 0) & (w > -ABS_CLAMP), 0.0, np.abs(w))
    return hermitian_part((V * w_abs) @ V.conj().T)


def operator_norm(H) -> float:
    """Operator (spectral) norm of a Hermitian matrix: max |eigenvalue|."""
    H = check_hermitian(H)
    w = np.linalg.eigvalsh(H)
    return float(np.max(np.abs(w))) if w.size else 0.0


def real_inverse(M) -> np.ndarray:
    """Inverse of a square real matrix.

    Raises SingularMatrixError when |det M| < 1e-12 * (max |entry|)^N.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {M.shape}")
    n = M.shape[0]
    det = float(np.linalg.det(M))
    scale = float(np.max(np.abs(M))) if M.size else 0.0
    if scale == 0.0 or abs(det) < SINGULARITY_SCALE * scale ** n:
        raise SingularMatrixError(
            f"matrix is singular or near-singular: |det| = {abs(det):.3e}",
            det_estimate=abs(det),
        )
    return np.linalg.inv(M)


# --- JSON serialization -----------------------------------------------------

def hermitian_to_json(H) -> dict:
    """Serialize a Hermitian matrix as {"dim", "re", "im"}."""
    H = np.asarray(H, dtype=complex)
    return {
        "dim": H.shape[0],
        "re": H.real.tolist(),
        "im": H.imag.tolist(),
    }


def hermitian_from_json(obj: dict) -> np.ndarray:
    """Load a Hermitian matrix from the {"dim", "re", "im"} format."""
    try:
        d = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed Hermitian matrix JSON: {exc}") from exc
    if re.shape != (d, d) or im.shape != (d, d):
        raise ValidationError(
            f"Hermitian matrix JSON shape mismatch: dim={d}, "
            f"re {re.shape}, im {im.shape}"
        )
    return check_hermitian(re + 1j * im)


def real_matrix_to_json(M) -> dict:
    """Serialize a real matrix as {"rows", "cols", "entries"}."""
    M = np.asarray(M, dtype=float)
    return {"rows": M.shape[0], "cols": M.shape[1], "entries": M.tolist()}


def real_matrix_from_json(obj: dict) -> np.ndarray:
    """Load a real matrix from the {"rows", "cols", "entries"} format."""
    try:
        rows = int(obj["rows"])
        cols = int(obj["cols"])
        entries = np.asarray(obj["entries"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed real matrix JSON: {exc}") from exc
    if entries.shape != (rows, cols):
        raise ValidationError(
            f"real matrix JSON shape mismatch: declared {(rows, cols)}, "
            f"got {entries.shape}"
        )
    return entries
