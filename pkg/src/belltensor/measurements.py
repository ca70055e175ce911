"""Dichotomic observables, POVM/observable conversion and noise models."""

from __future__ import annotations

import json

import numpy as np

from .errors import ValidationError
from .linalg import (check_hermitian, hermitian_from_json, hermitian_to_json,
                     operator_norm)

VALIDITY_SLACK = 1e-10

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


class MeasurementTuple:
    """An N-tuple of dichotomic observables on a common dimension d.

    Validity (operator norm of every observable at most 1) is a flag checked
    on demand, not a construction precondition: parameter sweeps build tuples
    whose norms exceed 1 on purpose.
    """

    __slots__ = ("observables",)

    def __init__(self, observables):
        obs = tuple(check_hermitian(A) for A in observables)
        if not obs:
            raise ValidationError("a measurement tuple needs at least one observable")
        d = obs[0].shape[0]
        for A in obs[1:]:
            if A.shape[0] != d:
                raise ValidationError(
                    f"observables live on different dimensions: {d} vs {A.shape[0]}")
        for A in obs:
            A.setflags(write=False)
        self.observables = obs

    @property
    def n(self) -> int:
        return len(self.observables)

    @property
    def dim(self) -> int:
        return self.observables[0].shape[0]

    def epsilon_norm(self) -> float:
        """Injective norm of the tuple: max over observables of the operator norm."""
        return max(operator_norm(A) for A in self.observables)

    def is_valid(self, slack: float = VALIDITY_SLACK) -> bool:
        """True when every observable encodes a genuine dichotomic POVM."""
        return self.epsilon_norm() <= 1.0 + slack

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(np.max(np.abs(A)) <= tol for A in self.observables)

    def stack(self) -> np.ndarray:
        """The observables as an (n, d, d) array."""
        return np.stack(self.observables)

    def __iter__(self):
        return iter(self.observables)

    def __repr__(self):
        return f"MeasurementTuple(n={self.n}, dim={self.dim})"


def observable_from_effect(E) -> np.ndarray:
    """Map the "+1" effect E of a dichotomic POVM to its observable 2E - I."""
    E = check_hermitian(E)
    w = np.linalg.eigvalsh(E)
    bad = [float(x) for x in w if x < -VALIDITY_SLACK or x > 1.0 + VALIDITY_SLACK]
    if bad:
        raise ValidationError(
            f"effect eigenvalues outside [0, 1]: {bad}")
    return 2.0 * E - np.eye(E.shape[0])


def effect_from_observable(A) -> np.ndarray:
    """Inverse map: E = (I + A) / 2, requiring ||A|| <= 1."""
    A = check_hermitian(A)
    nrm = operator_norm(A)
    if nrm > 1.0 + VALIDITY_SLACK:
        raise ValidationError(
            f"observable norm {nrm:.12g} exceeds 1; not a valid dichotomic observable")
    return (np.eye(A.shape[0]) + A) / 2.0


def add_noise(A: MeasurementTuple, eta: float) -> MeasurementTuple:
    """Mix white noise into each measurement; on observables this is scaling."""
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise ValidationError(f"noise parameter must be in [0, 1], got {eta}")
    return MeasurementTuple(eta * X for X in A.observables)


def pauli_tuple(x: float, y: float, z: float) -> MeasurementTuple:
    """The noisy Pauli triple (x sigma_X, y sigma_Y, z sigma_Z) on d = 2."""
    return MeasurementTuple([float(x) * PAULI_X, float(y) * PAULI_Y,
                             float(z) * PAULI_Z])


def tuple_to_json(A: MeasurementTuple) -> dict:
    return {"dim": A.dim, "observables": [hermitian_to_json(X) for X in A]}


def tuple_from_json(obj: dict) -> MeasurementTuple:
    try:
        obs = [hermitian_from_json(o) for o in obj["observables"]]
        d = int(obj["dim"])
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed measurement tuple JSON: {exc}") from exc
    t = MeasurementTuple(obs)
    if t.dim != d:
        raise ValidationError(
            f"tuple JSON declares dim={d} but observables have dim={t.dim}")
    return t


def tuple_from_shorthand(spec: str) -> MeasurementTuple:
    """Build a tuple from "pauli:x,y,z" shorthand or a JSON file path.

    The shorthand takes one to three coefficients, scaling sigma_X, sigma_Y
    and sigma_Z in that order; "pauli:1,0.5" is the pair (X, Y/2).
    """
    if spec.startswith("pauli:"):
        parts = spec[len("pauli:"):].split(",")
        if not 1 <= len(parts) <= 3:
            raise ValidationError(
                f"pauli shorthand needs one to three coefficients, got {spec!r}")
        try:
            coeffs = [float(p) for p in parts]
        except ValueError as exc:
            raise ValidationError(f"bad pauli shorthand {spec!r}") from exc
        paulis = (PAULI_X, PAULI_Y, PAULI_Z)
        return MeasurementTuple([c * s for c, s in zip(coeffs, paulis)])
    try:
        with open(spec) as fh:
            return tuple_from_json(json.load(fh))
    except OSError as exc:
        raise ValidationError(
            f"unknown tuple shorthand and unreadable path: {spec!r} ({exc})") from exc
