"""Self-verification suite: twelve numbered reproduction criteria.

Each criterion re-derives a closed-form value or inequality with the
library's own operations and checks it at a stated tolerance.  `run_all`
executes any subset and reports one pass/fail record per criterion.
"""

from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import bellnorm, compat, games, measurements, scan
from .errors import SingularMatrixError
from .measurements import (MeasurementTuple, PAULI_X, PAULI_Y, PAULI_Z,
                           pauli_tuple)


@dataclass
class CriterionResult:
    name: str
    passed: bool
    seconds: float
    detail: dict = field(default_factory=dict)


def _random_observable(rng, d: int, scale: float = 1.0) -> np.ndarray:
    """Random Hermitian matrix rescaled to operator norm `scale`."""
    H = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    H = (H + H.conj().T) / 2
    top = float(np.max(np.abs(np.linalg.eigvalsh(H))))
    return H * (scale / top) if top > 0 else H


def _random_tuple(rng, n: int, d: int) -> MeasurementTuple:
    return MeasurementTuple(
        [_random_observable(rng, d, rng.uniform(0.1, 1.0)) for _ in range(n)])


def _haar_unitary(rng, d: int) -> np.ndarray:
    Z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def _traceless_qubit(rng, scale: float) -> np.ndarray:
    H = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    H = (H + H.conj().T) / 2
    H -= (np.trace(H).real / 2) * np.eye(2)
    return H * (scale / float(np.max(np.abs(np.linalg.eigvalsh(H)))))


def _qubit_block_tuple(rng, n: int, d: int, unitary=None) -> MeasurementTuple:
    """Random tuple of traceless observables sharing a two-dimensional
    support: a Haar rotation of traceless 2x2 blocks padded with zeros.

    On this class the closed-form game-locality norm is attained by an
    explicit quantum strategy (the maximally entangled state on the support
    does it), so it can be compared against strategy-based oracles and
    against the compatibility norm at tight tolerances.  For generic
    higher-dimensional tuples the closed form is only an upper bound on the
    attainable bias.
    """
    U = _haar_unitary(rng, d) if unitary is None else unitary
    obs = []
    for _ in range(n):
        full = np.zeros((d, d), dtype=complex)
        full[:2, :2] = _traceless_qubit(rng, rng.uniform(0.1, 1.0))
        obs.append(U @ full @ U.conj().T)
    return MeasurementTuple(obs)


def _random_effect(rng, d: int) -> np.ndarray:
    """Random effect 0 <= E <= I via a squashed random Hermitian."""
    H = _random_observable(rng, d, rng.uniform(0.1, 1.0))
    return (np.eye(d) + H) / 2


def _random_invertible_game(rng, n: int) -> games.GameMatrix:
    while True:
        M = games.GameMatrix(rng.uniform(-1.0, 1.0, size=(n, n)))
        if M.invertible:
            return M


# --- criteria ----------------------------------------------------------------

def criterion_01_pauli_pair():
    """||(sX, y sY)||_c = sqrt(1+y^2): SDP route 1e-5, CHSH route 1e-9."""
    chsh = games.chsh()
    worst_sdp = worst_chsh = 0.0
    for y in np.linspace(-1.0, 1.0, 50):
        A = MeasurementTuple([PAULI_X, y * PAULI_Y])
        target = math.hypot(1.0, y)
        worst_sdp = max(worst_sdp, abs(compat.compatibility_norm(A) - target))
        worst_chsh = max(worst_chsh, abs(bellnorm.m_bell_norm(A, chsh) - target))
    passed = worst_sdp <= 1e-5 and worst_chsh <= 1e-9
    return passed, {"worst_sdp": worst_sdp, "worst_chsh": worst_chsh}


def criterion_02_pauli_triple(seed: int = 0):
    """||(x sX, y sY, z sZ)||_c = sqrt(x^2+y^2+z^2) within 1e-5."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(100):
        x, y, z = rng.uniform(0.0, 1.0, size=3)
        val = compat.compatibility_norm(pauli_tuple(x, y, z))
        worst = max(worst, abs(val - math.sqrt(x * x + y * y + z * z)))
    return worst <= 1e-5, {"worst": worst}


def criterion_03_chsh_equivalence(seed: int = 0):
    """|  ||A||_c - ||A||_CHSH | <= 1e-5 on 500 random valid qubit pairs."""
    rng = np.random.default_rng(seed)
    chsh = games.chsh()
    worst = 0.0
    for _ in range(500):
        A = _qubit_block_tuple(rng, 2, 2)
        worst = max(worst, abs(compat.compatibility_norm(A)
                               - bellnorm.m_bell_norm(A, chsh)))
    return worst <= 1e-5, {"worst": worst}


def criterion_04_deformed_closed_form():
    """Deformed-CHSH closed form on a 201x161 grid; t* boundary at y=1."""
    worst = 0.0
    t_grid = np.linspace(-4.0, 4.0, 161)
    for y in np.linspace(-1.0, 1.0, 201):
        A = MeasurementTuple([PAULI_X, y * PAULI_Y])
        for t in t_grid:
            val = bellnorm.m_bell_norm(A, games.normalize(games.deformed_chsh(t)))
            worst = max(worst, abs(val - scan.deformed_closed_form(y, t)))

    # Bisection for the y=1 violation boundary.
    A1 = MeasurementTuple([PAULI_X, PAULI_Y])

    def excess(t):
        return bellnorm.m_bell_norm(
            A1, games.normalize(games.deformed_chsh(t))) - 1.0

    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = (lo + hi) / 2
        if excess(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    t_star = (lo + hi) / 2
    t_star_err = abs(t_star - scan.deformed_violation_threshold())
    passed = worst <= 1e-9 and t_star_err <= 1e-6
    return passed, {"worst": worst, "t_star": t_star, "t_star_err": t_star_err}


def criterion_05_biased_closed_form():
    """Biased-game closed form on a (y,p,q) grid incl. the p=1/2 line."""
    worst = worst_half = 0.0
    p_grid = np.linspace(0.0, 1.0, 21)
    q_grid = np.linspace(0.0, 1.0, 21)
    for y in np.linspace(-1.0, 1.0, 41):
        A = MeasurementTuple([PAULI_X, y * PAULI_Y])
        for p in p_grid:
            for q in q_grid:
                val = bellnorm.m_bell_norm(
                    A, games.normalize(games.biased_chsh(p, q)))
                worst = max(worst, abs(val - scan.biased_closed_form(y, p, q)))
        for q in q_grid:
            val = bellnorm.m_bell_norm(
                A, games.normalize(games.biased_chsh(0.5, q)))
            simple = math.hypot(1.0, y) / (2.0 * max(q, 1.0 - q))
            worst_half = max(worst_half, abs(val - simple))
    passed = worst <= 1e-9 and worst_half <= 1e-9
    return passed, {"worst": worst, "worst_half_line": worst_half}


def criterion_06_i3322_thresholds():
    """Compatibility vs violation thresholds for s(sX, sY, sZ) and I3322."""
    triple = pauli_tuple(1.0, 1.0, 1.0)
    s_compat = 1.0 / compat.compatibility_norm(triple)
    s_violate = 1.0 / bellnorm.m_bell_norm(triple, games.normalize(games.i3322()))
    err_c = abs(s_compat - 1.0 / math.sqrt(3.0))
    err_m = abs(s_violate - 4.0 / (math.sqrt(2.0) + 2.0 * math.sqrt(3.0)))
    gap = s_violate - s_compat
    passed = err_c <= 1e-5 and err_m <= 1e-6 and gap > 0.0
    return passed, {"s_compat": s_compat, "s_violate": s_violate,
                    "err_compat": err_c, "err_violate": err_m, "gap": gap}


def criterion_07_comparison_theorems(seed: int = 0):
    """||A||_M <= ||A||_c beta(M) and ||A||_c <= ||A||_M max|M^-1|."""
    rng = np.random.default_rng(seed)
    failures = 0
    worst = -math.inf
    for _ in range(1000):
        n = int(rng.integers(2, 4))
        d = int(rng.integers(2, 4))
        A = _qubit_block_tuple(rng, n, d)
        M = _random_invertible_game(rng, n)
        nm = bellnorm.m_bell_norm(A, M)
        nc = compat.compatibility_norm(A)
        lhs1 = nm - nc * games.classical_bias(M)
        lhs2 = nc - nm * games.linf_injective_norm(M.inverse)
        worst = max(worst, lhs1, lhs2)
        if lhs1 > 1e-6 or lhs2 > 1e-6:
            failures += 1
    return failures == 0, {"failures": failures, "worst_excess": worst}


def criterion_08_strong_duality(seed: int = 0):
    """epsilon primal/dual agreement and two-route Gamma consistency."""
    rng = np.random.default_rng(seed)
    worst_gap = worst_gamma = 0.0
    for _ in range(200):
        P = _random_effect(rng, 2)
        Q = _random_effect(rng, 2)
        ep = compat.epsilon_star_primal(P, Q)
        ed = compat.epsilon_star_dual(P, Q)
        worst_gap = max(worst_gap, abs(ep - ed))
        A = MeasurementTuple([measurements.observable_from_effect(P),
                              measurements.observable_from_effect(Q)])
        if A.is_zero(tol=1e-12):
            continue
        g1 = compat.gamma_from_epsilon(ed)
        g2 = compat.gamma_threshold(A)
        worst_gamma = max(worst_gamma, abs(g1 - g2))
    passed = worst_gap <= 1e-6 and worst_gamma <= 1e-5
    return passed, {"worst_duality_gap": worst_gap,
                    "worst_gamma_mismatch": worst_gamma}


def criterion_09_uncertainty(seed: int = 0):
    """beta(M) max|M^-1| >= sqrt(N/2); equality characterizes Hadamards."""
    rng = np.random.default_rng(seed)
    worst_slack = math.inf
    for n in range(2, 7):
        bound = math.sqrt(n / 2.0)
        for _ in range(500):
            M = _random_invertible_game(rng, n)
            worst_slack = min(worst_slack,
                              games.uncertainty_product(M) - bound)
    if worst_slack < -1e-9:
        return False, {"worst_slack": worst_slack}

    # Equality case: among random N=2 candidates plus the scaled-CHSH
    # family, product == 1 exactly for scaled 2x2 Hadamard matrices.
    mismatches = 0
    candidates = []
    for _ in range(10_000):
        candidates.append(rng.uniform(-1.0, 1.0, size=(2, 2)))
    for a in (0.25, 0.5, 1.0, 3.0):
        candidates.append(a * 2.0 * games.chsh().m)
    for M in candidates:
        try:
            prod = games.uncertainty_product(games.GameMatrix(M))
        except SingularMatrixError:
            continue
        is_one = abs(prod - 1.0) <= 1e-9
        if is_one != games.is_scaled_hadamard(M):
            mismatches += 1
    return mismatches == 0, {"worst_slack": worst_slack,
                             "equality_mismatches": mismatches}


def criterion_10_seesaw(seed: int = 0):
    """See-saw lower bound reaches ||A||_M within 1e-4; monotone history."""
    rng = np.random.default_rng(seed)
    worst_gap = 0.0
    monotone_failures = 0
    for k in range(100):
        n = int(rng.integers(2, 4))
        d = int(rng.integers(2, 4))
        A = _qubit_block_tuple(rng, n, d)
        M = _random_invertible_game(rng, n)
        target = bellnorm.m_bell_norm(A, M)
        res = bellnorm.seesaw_bias(A, M, restarts=20, iters=200, seed=k)
        worst_gap = max(worst_gap, target - res.value)
        if any(b - a < -1e-12 for a, b in zip(res.history, res.history[1:])):
            monotone_failures += 1
    passed = worst_gap <= 1e-4 and monotone_failures == 0
    return passed, {"worst_gap": worst_gap,
                    "monotone_failures": monotone_failures}


def criterion_11_quantum_bias(seed: int = 0):
    """beta*(CHSH) = sqrt 2; classical/Grothendieck sandwich on random games."""
    err_chsh = abs(games.quantum_bias_sdp(games.chsh()) - math.sqrt(2.0))
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(200):
        n = int(rng.integers(2, 4))
        M = games.GameMatrix(rng.uniform(-1.0, 1.0, size=(n, n)))
        beta = games.classical_bias(M)
        beta_q = games.quantum_bias_sdp(M)
        if not (beta - 1e-7 <= beta_q <= games.GROTHENDIECK_BOUND * beta + 1e-7):
            failures += 1
    passed = err_chsh <= 1e-5 and failures == 0
    return passed, {"err_chsh": err_chsh, "sandwich_failures": failures}


def criterion_12_norm_axioms(seed: int = 0):
    """Triangle, homogeneity, definiteness for ||.||_M, ||p||_M, ||.||_c."""
    rng = np.random.default_rng(seed)
    detail = {}
    passed = True

    # Game-locality norm on tuples (closed form; tight tolerances).
    worst_tri = worst_hom = 0.0
    definite_ok = True
    for _ in range(1000):
        n, d = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        M = _random_invertible_game(rng, n)
        U = _haar_unitary(rng, d)
        A = _qubit_block_tuple(rng, n, d, unitary=U)
        B = _qubit_block_tuple(rng, n, d, unitary=U)
        AB = MeasurementTuple([X + Y for X, Y in zip(A, B)])
        na, nb = bellnorm.m_bell_norm(A, M), bellnorm.m_bell_norm(B, M)
        worst_tri = max(worst_tri, bellnorm.m_bell_norm(AB, M) - na - nb)
        c = rng.uniform(-2.0, 2.0)
        cA = MeasurementTuple([c * X for X in A])
        worst_hom = max(worst_hom,
                        abs(bellnorm.m_bell_norm(cA, M) - abs(c) * na))
        definite_ok = definite_ok and na > 0.0
    detail["m_norm"] = {"worst_triangle": worst_tri,
                        "worst_homogeneity": worst_hom,
                        "definite": definite_ok}
    passed = passed and worst_tri <= 1e-9 and worst_hom <= 1e-9 and definite_ok

    # Vector norm ||p||_M = ||M^T p||_1.
    worst_tri = worst_hom = 0.0
    definite_ok = True
    for _ in range(1000):
        n = int(rng.integers(2, 5))
        M = _random_invertible_game(rng, n)
        p = rng.normal(size=n)
        q = rng.normal(size=n)
        np_, nq = bellnorm.vector_m_norm(p, M), bellnorm.vector_m_norm(q, M)
        worst_tri = max(worst_tri, bellnorm.vector_m_norm(p + q, M) - np_ - nq)
        c = rng.uniform(-2.0, 2.0)
        worst_hom = max(worst_hom,
                        abs(bellnorm.vector_m_norm(c * p, M) - abs(c) * np_))
        definite_ok = definite_ok and (np_ > 0.0 or not p.any())
    detail["vector_norm"] = {"worst_triangle": worst_tri,
                             "worst_homogeneity": worst_hom,
                             "definite": definite_ok}
    passed = passed and worst_tri <= 1e-12 and worst_hom <= 1e-12 and definite_ok

    # Compatibility norm (SDP; looser tolerances).
    worst_tri = worst_hom = 0.0
    worst_sandwich = 0.0
    definite_ok = True
    for _ in range(1000):
        A = _random_tuple(rng, 2, 2)
        B = _random_tuple(rng, 2, 2)
        AB = MeasurementTuple([X + Y for X, Y in zip(A, B)])
        na, nb = compat.compatibility_norm(A), compat.compatibility_norm(B)
        worst_tri = max(worst_tri, compat.compatibility_norm(AB) - na - nb)
        eta = rng.uniform(0.0, 1.0)
        etaA = MeasurementTuple([eta * X for X in A])
        worst_hom = max(worst_hom,
                        abs(compat.compatibility_norm(etaA) - eta * na))
        worst_sandwich = max(worst_sandwich, A.epsilon_norm() - na)
        definite_ok = definite_ok and na > 0.0
    detail["compat_norm"] = {"worst_triangle": worst_tri,
                             "worst_homogeneity": worst_hom,
                             "worst_sandwich": worst_sandwich,
                             "definite": definite_ok}
    passed = (passed and worst_tri <= 1e-6 and worst_hom <= 1e-6
              and worst_sandwich <= 1e-7 and definite_ok)
    return passed, detail


CRITERIA = (
    ("01-pauli-pair-compat-norm", criterion_01_pauli_pair),
    ("02-pauli-triple-compat-norm", criterion_02_pauli_triple),
    ("03-chsh-norm-equivalence", criterion_03_chsh_equivalence),
    ("04-deformed-chsh-closed-form", criterion_04_deformed_closed_form),
    ("05-biased-chsh-closed-form", criterion_05_biased_closed_form),
    ("06-i3322-thresholds", criterion_06_i3322_thresholds),
    ("07-comparison-theorems", criterion_07_comparison_theorems),
    ("08-strong-duality", criterion_08_strong_duality),
    ("09-uncertainty-relation", criterion_09_uncertainty),
    ("10-seesaw-oracle", criterion_10_seesaw),
    ("11-quantum-bias", criterion_11_quantum_bias),
    ("12-norm-axioms", criterion_12_norm_axioms),
)


def run_all(names=None, stream=sys.stdout) -> list[CriterionResult]:
    """Run the verification criteria (all by default), printing one line each."""
    selected = [(n, f) for n, f in CRITERIA if names is None or n in names]
    results = []
    for name, fn in selected:
        t0 = time.perf_counter()
        passed, detail = fn()
        dt = time.perf_counter() - t0
        results.append(CriterionResult(name, passed, dt, detail))
        if stream is not None:
            status = "PASS" if passed else "FAIL"
            print(f"{status} criterion-{name} ({dt:.1f}s)", file=stream)
    return results
