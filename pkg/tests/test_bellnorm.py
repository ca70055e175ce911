"""Tests for the game-locality norm, vector norms and the see-saw oracle."""

import itertools
import math

import numpy as np
import pytest

from belltensor import bellnorm, games
from belltensor.errors import SingularMatrixError, ValidationError
from belltensor.measurements import (MeasurementTuple, PAULI_X, PAULI_Y,
                                     pauli_tuple)


def traceless_qubit(rng, scale=1.0):
    H = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    H = (H + H.conj().T) / 2
    H -= (np.trace(H).real / 2) * np.eye(2)
    return H * scale / np.max(np.abs(np.linalg.eigvalsh(H)))


def test_chsh_value_on_pauli_pair():
    A = MeasurementTuple([PAULI_X, PAULI_Y])
    assert abs(bellnorm.m_bell_norm(A, games.chsh()) - math.sqrt(2.0)) < 1e-12


def test_deformed_chsh_closed_form():
    rng = np.random.default_rng(0)
    for _ in range(100):
        y = rng.uniform(-1.0, 1.0)
        t = rng.uniform(-4.0, 4.0)
        A = MeasurementTuple([PAULI_X, y * PAULI_Y])
        val = bellnorm.m_bell_norm(A, games.normalize(games.deformed_chsh(t)))
        expected = (math.hypot(1, y * t) + math.hypot(1, y)) / (2 + abs(t - 1))
        assert abs(val - expected) < 1e-12


def test_degenerate_y_zero_never_violates():
    A = MeasurementTuple([PAULI_X, 0.0 * PAULI_Y])
    for t in (-4.0, -1.0, 0.0, 1.0, 4.0):
        M = games.normalize(games.deformed_chsh(t))
        val = bellnorm.m_bell_norm(A, M)
        assert abs(val - 2.0 / (2.0 + abs(t - 1.0))) < 1e-12
        assert bellnorm.is_bell_local(A, M)


def test_rank_one_tuple_factorizes():
    rng = np.random.default_rng(1)
    for _ in range(50):
        n = int(rng.integers(2, 5))
        d = int(rng.integers(2, 5))
        p = rng.normal(size=n)
        B = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        B = (B + B.conj().T) / 2
        A = MeasurementTuple([p_x * B for p_x in p])
        M = games.GameMatrix(rng.uniform(-1.0, 1.0, size=(n, n)))
        lhs = bellnorm.m_bell_norm(A, M)
        rhs = bellnorm.vector_m_norm(p, M) * np.max(np.abs(np.linalg.eigvalsh(B)))
        assert abs(lhs - rhs) < 1e-10


def test_vector_norm_examples_and_oracle():
    assert abs(bellnorm.vector_m_norm([1.0, 0.0], games.chsh()) - 1.0) < 1e-15
    assert bellnorm.vector_m_norm([0.0, 0.0], games.chsh()) == 0.0
    for t in (-3.0, 0.0, 2.0):
        assert abs(bellnorm.vector_m_norm([1.0, 0.0],
                                          games.deformed_chsh(t)) - 2.0) < 1e-12
    rng = np.random.default_rng(2)
    for _ in range(50):
        n = int(rng.integers(2, 5))
        M = games.GameMatrix(rng.uniform(-1.0, 1.0, size=(n, n)))
        p = rng.normal(size=n)
        assert abs(bellnorm.vector_m_norm(p, M)
                   - np.abs(M.m.T @ p).sum()) < 1e-13


def test_dual_norm_examples():
    assert abs(bellnorm.vector_m_dual_norm([1.0, 0.0], games.chsh()) - 1.0) < 1e-12
    assert bellnorm.vector_m_dual_norm([0.0, 0.0], games.chsh()) == 0.0
    with pytest.raises(SingularMatrixError):
        bellnorm.vector_m_dual_norm([1.0, 0.0], games.deformed_chsh(-1.0))


def test_dual_norm_mesh_search():
    # sup{<p, q> : ||q||_M <= 1} over a fine mesh approaches the dual norm.
    rng = np.random.default_rng(3)
    M = games.GameMatrix(rng.uniform(-1.0, 1.0, size=(2, 2))
                         + 2.0 * np.eye(2))
    for _ in range(10):
        p = rng.normal(size=2)
        dual = bellnorm.vector_m_dual_norm(p, M)
        best = 0.0
        for qx in np.linspace(-3, 3, 601):
            for qy in np.linspace(-3, 3, 601):
                q = np.array([qx, qy])
                nq = bellnorm.vector_m_norm(q, M)
                if 0 < nq:
                    best = max(best, float(p @ q) / nq)
        assert abs(best - dual) < 1e-3


def test_duality_inequality_random():
    rng = np.random.default_rng(4)
    for _ in range(200):
        n = int(rng.integers(2, 5))
        M = games.GameMatrix(rng.uniform(-1.0, 1.0, size=(n, n)))
        if not M.invertible:
            continue
        p = rng.normal(size=n)
        q = rng.normal(size=n)
        nq = bellnorm.vector_m_norm(q, M)
        if nq < 1e-9:
            continue
        q = q / nq
        assert p @ q <= bellnorm.vector_m_dual_norm(p, M) + 1e-10


def test_is_bell_local_boundary():
    A = MeasurementTuple([PAULI_X, PAULI_Y])
    assert not bellnorm.is_bell_local(A, games.chsh())
    t_star = (9.0 - 4.0 * math.sqrt(2.0)) / 7.0
    assert bellnorm.is_bell_local(A, games.normalize(games.deformed_chsh(t_star)))
    assert not bellnorm.is_bell_local(
        A, games.normalize(games.deformed_chsh(t_star + 1e-3)))
    zero = MeasurementTuple([np.zeros((2, 2)), np.zeros((2, 2))])
    assert bellnorm.is_bell_local(zero, games.chsh())


def test_shape_mismatch():
    with pytest.raises(ValidationError):
        bellnorm.m_bell_norm(pauli_tuple(1, 1, 1), games.chsh())
    with pytest.raises(ValidationError):
        bellnorm.vector_m_norm([1.0, 0.0, 0.0], games.chsh())


def test_norm_axioms_closed_form():
    rng = np.random.default_rng(5)
    for _ in range(100):
        n = int(rng.integers(2, 4))
        M = games.GameMatrix(rng.uniform(-1.0, 1.0, size=(n, n)))
        A = MeasurementTuple([traceless_qubit(rng, rng.uniform(0.1, 1))
                              for _ in range(n)])
        B = MeasurementTuple([traceless_qubit(rng, rng.uniform(0.1, 1))
                              for _ in range(n)])
        na = bellnorm.m_bell_norm(A, M)
        c = rng.uniform(-2.0, 2.0)
        cA = MeasurementTuple([c * X for X in A])
        assert abs(bellnorm.m_bell_norm(cA, M) - abs(c) * na) < 1e-12
        AB = MeasurementTuple([X + Y for X, Y in zip(A, B)])
        assert (bellnorm.m_bell_norm(AB, M)
                <= na + bellnorm.m_bell_norm(B, M) + 1e-9)


def test_seesaw_reaches_chsh_value():
    A = MeasurementTuple([PAULI_X, PAULI_Y])
    res = bellnorm.seesaw_bias(A, games.chsh(), restarts=20, iters=200, seed=0)
    assert abs(res.value - math.sqrt(2.0)) < 1e-4
    assert res.converged
    assert res.bob.n == 2 and res.bob.dim == 2
    assert abs(np.linalg.norm(res.state) - 1.0) < 1e-10


def test_seesaw_zero_tuple():
    zero = MeasurementTuple([np.zeros((2, 2)), np.zeros((2, 2))])
    res = bellnorm.seesaw_bias(zero, games.chsh(), restarts=2, iters=10)
    assert abs(res.value) < 1e-12


def test_seesaw_monotone_and_bounded():
    rng = np.random.default_rng(6)
    for k in range(20):
        n = int(rng.integers(2, 4))
        A = MeasurementTuple([traceless_qubit(rng, rng.uniform(0.1, 1))
                              for _ in range(n)])
        M = games.GameMatrix(rng.uniform(-1.0, 1.0, size=(n, n)))
        res = bellnorm.seesaw_bias(A, M, restarts=5, iters=100, seed=k)
        target = bellnorm.m_bell_norm(A, M)
        assert res.value <= target + 1e-9
        assert all(b - a >= -1e-12
                   for a, b in zip(res.history, res.history[1:]))


def test_seesaw_deterministic():
    A = pauli_tuple(0.7, 0.4, 0.9)
    M = games.normalize(games.i3322())
    r1 = bellnorm.seesaw_bias(A, M, restarts=3, iters=50, seed=42)
    r2 = bellnorm.seesaw_bias(A, M, restarts=3, iters=50, seed=42)
    assert r1.value == r2.value
    assert r1.history == r2.history


def test_seesaw_restart_validation():
    with pytest.raises(ValidationError):
        bellnorm.seesaw_bias(MeasurementTuple([PAULI_X, PAULI_Y]),
                             games.chsh(), restarts=0)
