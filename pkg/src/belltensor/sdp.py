"""Small dense semidefinite-programming layer.

Problems have complex Hermitian PSD block variables, optional free real
scalars, affine equality constraints and a linear objective.  Solving is
delegated to interior-point backends via cvxpy; compiled programs are cached
by problem structure with the right-hand sides and objective coefficients as
parameters, so families of problems differing only in their data re-solve in
milliseconds.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import cvxpy as cp

from .errors import SolverError, ValidationError
from .linalg import hermitian_part

GAP_TOL = 1e-8
PSD_SLACK = 1e-10

_SOLVERS = ("CLARABEL", "SCS", "CVXOPT")


@dataclass(frozen=True)
class MatrixConstraint:
    """sum_b coeff_b * X_b + sum_s s * G_s == rhs (all matrices Hermitian)."""

    block_coeffs: tuple[tuple[str, float], ...]
    scalar_mats: tuple[tuple[str, bytes], ...]  # label -> matrix bytes
    rhs: bytes
    dim: int


@dataclass(frozen=True)
class ScalarConstraint:
    """sum_b Re<C_b, X_b> + sum_s coeff_s * s == rhs."""

    block_mats: tuple[tuple[str, bytes], ...]
    scalar_coeffs: tuple[tuple[str, float], ...]
    rhs: float


@dataclass(frozen=True)
class SdpProblem:
    blocks: tuple[tuple[str, int], ...]
    scalars: tuple[str, ...]
    sense: str  # "min" | "max"
    objective_blocks: tuple[tuple[str, bytes], ...]
    objective_scalars: tuple[tuple[str, float], ...]
    constraints: tuple[MatrixConstraint | ScalarConstraint, ...]

    def block_dim(self, label: str) -> int:
        for name, d in self.blocks:
            if name == label:
                return d
        raise KeyError(label)


@dataclass
class SdpSolution:
    status: str  # "optimal" | "infeasible" | "max-iterations"
    primal_value: float
    dual_value: float
    block_values: dict[str, np.ndarray]
    scalar_values: dict[str, float]
    residuals: dict[str, float] = field(default_factory=dict)


def _mat_bytes(M: np.ndarray, dim: int) -> bytes:
    M = np.asarray(M, dtype=complex)
    if M.shape != (dim, dim):
        raise ValidationError(f"coefficient shape {M.shape} != ({dim}, {dim})")
    return hermitian_part(M).astype(np.complex128).tobytes()


def _mat_from_bytes(b: bytes, dim: int) -> np.ndarray:
    return np.frombuffer(b, dtype=np.complex128).reshape(dim, dim)


class SdpBuilder:
    """Incremental construction of an SdpProblem."""

    def __init__(self, sense: str = "min"):
        if sense not in ("min", "max"):
            raise ValidationError(f"sense must be 'min' or 'max', got {sense!r}")
        self.sense = sense
        self._blocks: dict[str, int] = {}
        self._scalars: list[str] = []
        self._obj_blocks: dict[str, bytes] = {}
        self._obj_scalars: dict[str, float] = {}
        self._constraints: list[MatrixConstraint | ScalarConstraint] = []

    def add_block(self, label: str, dim: int) -> str:
        if label in self._blocks or label in self._scalars:
            raise ValidationError(f"duplicate variable label {label!r}")
        if dim < 1:
            raise ValidationError("block dimension must be >= 1")
        self._blocks[label] = int(dim)
        return label

    def add_scalar(self, label: str) -> str:
        if label in self._blocks or label in self._scalars:
            raise ValidationError(f"duplicate variable label {label!r}")
        self._scalars.append(label)
        return label

    def set_objective(self, blocks: dict | None = None, scalars: dict | None = None):
        for label, C in (blocks or {}).items():
            self._obj_blocks[label] = _mat_bytes(C, self._blocks[label])
        for label, c in (scalars or {}).items():
            if label not in self._scalars:
                raise ValidationError(f"unknown scalar {label!r}")
            self._obj_scalars[label] = float(c)

    def add_matrix_constraint(self, block_coeffs: dict, rhs,
                              scalar_mats: dict | None = None):
        rhs = np.asarray(rhs, dtype=complex)
        dim = rhs.shape[0]
        for label in block_coeffs:
            if self._blocks.get(label) != dim:
                raise ValidationError(
                    f"block {label!r} has dim {self._blocks.get(label)}, "
                    f"constraint has dim {dim}")
        self._constraints.append(MatrixConstraint(
            block_coeffs=tuple(sorted((k, float(v)) for k, v in block_coeffs.items())),
            scalar_mats=tuple(sorted(
                (k, _mat_bytes(G, dim)) for k, G in (scalar_mats or {}).items())),
            rhs=_mat_bytes(rhs, dim),
            dim=dim,
        ))

    def add_scalar_constraint(self, block_mats: dict | None = None,
                              scalar_coeffs: dict | None = None, rhs: float = 0.0):
        self._constraints.append(ScalarConstraint(
            block_mats=tuple(sorted(
                (k, _mat_bytes(C, self._blocks[k])) for k, C in (block_mats or {}).items())),
            scalar_coeffs=tuple(sorted(
                (k, float(v)) for k, v in (scalar_coeffs or {}).items())),
            rhs=float(rhs),
        ))

    def build(self) -> SdpProblem:
        if not self._blocks:
            raise ValidationError("problem needs at least one PSD block")
        return SdpProblem(
            blocks=tuple(self._blocks.items()),
            scalars=tuple(self._scalars),
            sense=self.sense,
            objective_blocks=tuple(sorted(self._obj_blocks.items())),
            objective_scalars=tuple(sorted(self._obj_scalars.items())),
            constraints=tuple(self._constraints),
        )


# --- compiled-program cache -------------------------------------------------

class _Compiled:
    """A cvxpy program for one problem structure; data enters via parameters."""

    def __init__(self, problem: SdpProblem):
        self.structure = _structure_key(problem)
        # 1x1 "Hermitian" blocks are kept real to avoid needless complex
        # canonicalization in the backend.
        self.block_vars = {
            label: cp.Variable((d, d), hermitian=True) if d > 1
            else cp.Variable((1, 1), symmetric=True)
            for label, d in problem.blocks
        }
        self.scalar_vars = {label: cp.Variable() for label in problem.scalars}

        def _mat_param(d):
            if d > 1:
                return cp.Parameter((d, d), hermitian=True)
            return cp.Parameter((1, 1), symmetric=True)

        self.obj_params = {
            label: _mat_param(problem.block_dim(label))
            for label, _ in problem.objective_blocks
        }
        self.obj_scalar_params = {
            label: cp.Parameter() for label, _ in problem.objective_scalars
        }
        obj = 0
        for label in self.obj_params:
            obj = obj + cp.real(cp.trace(self.obj_params[label].H @ self.block_vars[label]))
        for label in self.obj_scalar_params:
            obj = obj + self.obj_scalar_params[label] * self.scalar_vars[label]

        constraints = [X >> 0 for X in self.block_vars.values()]
        self.rhs_params: list[cp.Parameter] = []
        self.eq_constraints = []
        for con in problem.constraints:
            if isinstance(con, MatrixConstraint):
                rhs_p = _mat_param(con.dim)
                expr = 0
                for label, coeff in con.block_coeffs:
                    expr = expr + coeff * self.block_vars[label]
                for label, gbytes in con.scalar_mats:
                    G = _mat_from_bytes(gbytes, con.dim)
                    expr = expr + self.scalar_vars[label] * G
                c = expr == rhs_p
            else:
                rhs_p = cp.Parameter()
                expr = 0
                for label, cbytes in con.block_mats:
                    C = _mat_from_bytes(cbytes, problem.block_dim(label))
                    expr = expr + cp.real(cp.trace(C.conj().T @ self.block_vars[label]))
                for label, coeff in con.scalar_coeffs:
                    expr = expr + coeff * self.scalar_vars[label]
                c = expr == rhs_p
            self.rhs_params.append(rhs_p)
            self.eq_constraints.append(c)
            constraints.append(c)

        objective = cp.Minimize(obj) if problem.sense == "min" else cp.Maximize(obj)
        self.problem = cp.Problem(objective, constraints)

    def load(self, problem: SdpProblem):
        def _assign(param, mat):
            param.value = mat if param.is_complex() else mat.real.copy()

        for label, cbytes in problem.objective_blocks:
            _assign(self.obj_params[label],
                    _mat_from_bytes(cbytes, problem.block_dim(label)))
        for label, c in problem.objective_scalars:
            self.obj_scalar_params[label].value = c
        for p, con in zip(self.rhs_params, problem.constraints):
            if isinstance(con, MatrixConstraint):
                _assign(p, _mat_from_bytes(con.rhs, con.dim))
            else:
                p.value = con.rhs


def _structure_key(problem: SdpProblem):
    obj_shape = (tuple(label for label, _ in problem.objective_blocks),
                 tuple(label for label, _ in problem.objective_scalars))
    cons_shape = []
    for con in problem.constraints:
        if isinstance(con, MatrixConstraint):
            cons_shape.append(("M", con.block_coeffs, con.scalar_mats, con.dim))
        else:
            cons_shape.append(("S", con.block_mats, con.scalar_coeffs))
    return (problem.blocks, problem.scalars, problem.sense, obj_shape,
            tuple(cons_shape))


_CACHE: dict = {}
_CACHE_LIMIT = 64


def _compiled_for(problem: SdpProblem) -> _Compiled:
    key = _structure_key(problem)
    prog = _CACHE.get(key)
    if prog is None:
        if len(_CACHE) >= _CACHE_LIMIT:
            _CACHE.clear()
        prog = _Compiled(problem)
        _CACHE[key] = prog
    return prog


# --- solving ----------------------------------------------------------------

def _try_solve(prog: _Compiled, solver: str) -> str:
    kwargs = {}
    if solver == "SCS":
        kwargs = {"eps": 1e-10, "max_iters": 200_000}
    with warnings.catch_warnings():
        # Inaccurate-solution warnings are redundant with our own residual
        # checks and status mapping below.
        warnings.simplefilter("ignore", UserWarning)
        prog.problem.solve(solver=solver, **kwargs)
    return prog.problem.status


def solve(problem: SdpProblem, solver: str | None = None) -> SdpSolution:
    """Solve an SdpProblem, returning values, blocks and residuals.

    Tries interior-point backends in order until one reports a conclusive
    status; raises SolverError if none does.
    """
    prog = _compiled_for(problem)
    prog.load(problem)

    status = None
    errors = []
    for name in ([solver] if solver else _SOLVERS):
        try:
            status = _try_solve(prog, name)
        except Exception as exc:  # backend-specific failures vary widely
            errors.append(f"{name}: {exc}")
            status = None
            continue
        if status in ("optimal", "infeasible", "unbounded"):
            break
    if status is None:
        raise SolverError("all SDP backends failed: " + "; ".join(errors))

    if status in ("infeasible", "infeasible_inaccurate"):
        return SdpSolution("infeasible", float("nan"), float("nan"), {}, {})
    if status == "unbounded":
        raise SolverError("SDP is unbounded; problem is ill-posed")
    if status not in ("optimal", "optimal_inaccurate"):
        return SdpSolution("max-iterations", float("nan"), float("nan"), {}, {})

    block_values = {
        label: hermitian_part(np.atleast_2d(var.value))
        for label, var in prog.block_vars.items()
    }
    scalar_values = {
        label: float(var.value) for label, var in prog.scalar_vars.items()
    }
    primal = float(prog.problem.value)

    # Dual value of the conic dual: sum over equality multipliers of <y, rhs>.
    dual = 0.0
    dual_ok = True
    for c, con in zip(prog.eq_constraints, problem.constraints):
        y = c.dual_value
        if y is None:
            dual_ok = False
            break
        if isinstance(con, MatrixConstraint):
            rhs = _mat_from_bytes(con.rhs, con.dim)
            dual += float(np.real(np.vdot(np.atleast_2d(y), rhs)))
        else:
            dual += float(np.real(y)) * con.rhs
    if not dual_ok:
        dual = primal
    elif problem.sense == "min":
        dual = -dual

    residuals = _residuals(problem, block_values, scalar_values)
    residuals["gap"] = abs(primal - dual)

    tight = (residuals["primal_infeasibility"] <= 1e-7
             and residuals["gap"] <= 1e-6 * (1 + abs(primal)))
    if status == "optimal_inaccurate" and not tight:
        return SdpSolution("max-iterations", primal, dual, block_values,
                           scalar_values, residuals)
    return SdpSolution("optimal", primal, dual, block_values, scalar_values,
                       residuals)


def _residuals(problem: SdpProblem, blocks: dict, scalars: dict) -> dict:
    infeas = 0.0
    for con in problem.constraints:
        if isinstance(con, MatrixConstraint):
            acc = -_mat_from_bytes(con.rhs, con.dim)
            for label, coeff in con.block_coeffs:
                acc = acc + coeff * blocks[label]
            for label, gbytes in con.scalar_mats:
                acc = acc + scalars[label] * _mat_from_bytes(gbytes, con.dim)
            infeas = max(infeas, float(np.max(np.abs(acc))))
        else:
            acc = -con.rhs
            for label, cbytes in con.block_mats:
                C = _mat_from_bytes(cbytes, problem.block_dim(label))
                acc += float(np.real(np.vdot(C, blocks[label])))
            for label, coeff in con.scalar_coeffs:
                acc += coeff * scalars[label]
            infeas = max(infeas, abs(acc))
    min_eig = 0.0
    for X in blocks.values():
        w = np.linalg.eigvalsh(X)
        min_eig = min(min_eig, float(w[0]))
    return {"primal_infeasibility": infeas, "min_block_eigenvalue": min_eig}


def to_debug_json(problem: SdpProblem) -> dict:
    """Dump a problem in a JSON-friendly form for reproducing solver issues."""
    cons = []
    for con in problem.constraints:
        if isinstance(con, MatrixConstraint):
            cons.append({
                "kind": "matrix",
                "dim": con.dim,
                "block_coeffs": dict(con.block_coeffs),
                "scalar_mats": {
                    k: _mat_from_bytes(b, con.dim).real.tolist()
                    for k, b in con.scalar_mats},
                "rhs_re": _mat_from_bytes(con.rhs, con.dim).real.tolist(),
                "rhs_im": _mat_from_bytes(con.rhs, con.dim).imag.tolist(),
            })
        else:
            cons.append({
                "kind": "scalar",
                "scalar_coeffs": dict(con.scalar_coeffs),
                "rhs": con.rhs,
            })
    return {
        "sense": problem.sense,
        "blocks": [{"label": k, "dim": d} for k, d in problem.blocks],
        "scalars": list(problem.scalars),
        "constraints": cons,
    }
