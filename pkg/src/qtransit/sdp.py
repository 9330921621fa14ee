"""Dense-block semidefinite programming with equality constraints.

Problems are stated over Hermitian PSD blocks X_1..X_k:

    max/min  sum_i tr(C_i X_i)
    s.t.     sum_i tr(A_ji X_i) = b_j  for each constraint j
             X_i >= 0

Solving is delegated to conic solvers (CLARABEL first, SCS as fallback) with
all problem assembly, capacity limits, status mapping, certificate search and
post-solve validation handled here. An infeasible status is only ever
reported together with a verified Farkas certificate; anything the solvers
cannot settle cleanly is reported as a numerical failure, never as a verdict.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

__all__ = [
    "SdpProblem",
    "SdpSolution",
    "Certificate",
    "solve",
    "reduce_equalities",
    "find_infeasibility_certificate",
    "verify_certificate",
    "svec",
    "smat",
    "OPTIMAL",
    "INFEASIBLE",
    "CAPACITY_ERROR",
    "NUMERICAL_FAILURE",
]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
CAPACITY_ERROR = "capacity_error"
NUMERICAL_FAILURE = "numerical_failure"

MAX_CONSTRAINTS = 10_000
MAX_BLOCK_DIM = 300
MAX_MATRIX_ENTRIES = 50_000_000

HERM_ATOL = 1e-8
RESIDUAL_TOL = 1e-7
GAP_TOL = 1e-6
PSD_TOL = 1e-9
REPAIR_LIMIT = 1e-6
CERT_MARGIN = 1e-7


def _hermitize(mat, what):
    m = np.asarray(mat, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{what} must be square, got shape {m.shape}")
    if np.abs(m - m.conj().T).max() > HERM_ATOL * max(1.0, np.abs(m).max()):
        raise ValueError(f"{what} is not Hermitian")
    return 0.5 * (m + m.conj().T)


def svec(mat: np.ndarray) -> np.ndarray:
    """Isometric real coordinates of a Hermitian matrix.

    Stacks the diagonal, then sqrt(2) * real and sqrt(2) * imaginary parts of
    the strict upper triangle, so plain dot products equal tr(A B).
    """
    m = np.asarray(mat)
    d = m.shape[0]
    iu = np.triu_indices(d, k=1)
    r2 = math.sqrt(2.0)
    return np.concatenate([m.diagonal().real, r2 * m[iu].real, r2 * m[iu].imag])


def smat(vec: np.ndarray, dim: int) -> np.ndarray:
    """Inverse of svec."""
    v = np.asarray(vec, dtype=float)
    out = np.zeros((dim, dim), dtype=complex)
    out[np.diag_indices(dim)] = v[:dim]
    iu = np.triu_indices(dim, k=1)
    k = len(iu[0])
    r2 = math.sqrt(2.0)
    upper = (v[dim : dim + k] + 1j * v[dim + k : dim + 2 * k]) / r2
    out[iu] = upper
    out[(iu[1], iu[0])] = upper.conj()
    return out


@dataclass(frozen=True)
class SdpProblem:
    """Standard-form problem over Hermitian PSD blocks."""

    block_dims: tuple[int, ...]
    objective: tuple
    constraints: tuple
    sense: str = "max"
    feasibility_only: bool = False

    def __post_init__(self):
        dims = tuple(int(d) for d in self.block_dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError("block dimensions must be positive")
        if self.sense not in ("max", "min"):
            raise ValueError("sense must be max or min")
        if self.feasibility_only:
            obj = tuple(np.zeros((d, d), dtype=complex) for d in dims)
        else:
            if len(self.objective) != len(dims):
                raise ValueError("objective needs one matrix per block")
            obj = tuple(
                _hermitize(c, f"objective block {i}") if c is not None
                else np.zeros((dims[i], dims[i]), dtype=complex)
                for i, c in enumerate(self.objective)
            )
        for i, (c, d) in enumerate(zip(obj, dims)):
            if c.shape != (d, d):
                raise ValueError(f"objective block {i} has shape {c.shape}, expected {(d, d)}")
        cons = []
        for j, (maps, rhs) in enumerate(self.constraints):
            if len(maps) != len(dims):
                raise ValueError(f"constraint {j} needs one map per block (None allowed)")
            fixed = []
            for i, a in enumerate(maps):
                if a is None:
                    fixed.append(None)
                    continue
                h = _hermitize(a, f"constraint {j} map {i}")
                if h.shape != (dims[i], dims[i]):
                    raise ValueError(f"constraint {j} map {i} has the wrong shape")
                fixed.append(h)
            r = float(rhs)
            if not math.isfinite(r):
                raise ValueError(f"constraint {j} right-hand side is not finite")
            cons.append((tuple(fixed), r))
        object.__setattr__(self, "block_dims", dims)
        object.__setattr__(self, "objective", obj)
        object.__setattr__(self, "constraints", tuple(cons))

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)

    def capacity_problem(self) -> str | None:
        if self.n_constraints > MAX_CONSTRAINTS:
            return f"{self.n_constraints} constraints exceed the {MAX_CONSTRAINTS} cap"
        big = [d for d in self.block_dims if d > MAX_BLOCK_DIM]
        if big:
            return f"block dimension {max(big)} exceeds the {MAX_BLOCK_DIM} cap"
        entries = self.n_constraints * sum(d * d for d in self.block_dims)
        if entries > MAX_MATRIX_ENTRIES:
            return f"constraint matrix would hold {entries} entries"
        return None


@dataclass(frozen=True)
class Certificate:
    """Farkas ray proving that no PSD blocks satisfy the equalities.

    y is scaled to unit max-norm; feasibility of the ray means every
    sum_j y_j A_ji is negative semidefinite while b . y stays positive, so
    any feasible X would give 0 >= sum y_j tr(A_j X) = b . y > 0.
    """

    y: np.ndarray
    margin: float
    psd_violation: float

    @property
    def verified(self) -> bool:
        return self.margin > CERT_MARGIN and self.psd_violation <= RESIDUAL_TOL


@dataclass(frozen=True)
class SdpSolution:
    status: str
    blocks: tuple | None = None
    value: float | None = None
    duality_gap: float | None = None
    certificate: Certificate | None = None
    message: str = ""

    @property
    def is_feasible(self) -> bool:
        return self.status == OPTIMAL


def _embed(mat: np.ndarray) -> np.ndarray:
    """Real-symmetric doubling [[Re, -Im], [Im, Re]] of a Hermitian matrix."""
    re, im = mat.real, mat.imag
    return np.block([[re, -im], [im, re]])


def _double_problem(p: SdpProblem) -> SdpProblem:
    dims = tuple(2 * d for d in p.block_dims)
    obj = tuple(0.5 * _embed(c) for c in p.objective)
    cons = tuple(
        (tuple(None if a is None else 0.5 * _embed(a) for a in maps), rhs)
        for maps, rhs in p.constraints
    )
    return SdpProblem(dims, obj, cons, p.sense, p.feasibility_only)


def _fold_doubled_blocks(blocks, dims):
    out = []
    for big, d in zip(blocks, dims):
        re = 0.5 * (big[:d, :d] + big[d:, d:])
        im = 0.5 * (big[d:, :d] - big[:d, d:])
        out.append(re + 1j * im)
    return tuple(out)


def _vectorized_data(p: SdpProblem):
    """Sparse row-per-constraint matrix over stacked column-major block vecs."""
    sizes = [d * d for d in p.block_dims]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    rows, cols, vals = [], [], []
    for j, (maps, _) in enumerate(p.constraints):
        for i, a in enumerate(maps):
            if a is None:
                continue
            flat = np.ascontiguousarray(a).reshape(-1)  # row-major pairs vec('F')
            nz = np.nonzero(flat)[0]
            rows.extend([j] * len(nz))
            cols.extend(offsets[i] + nz)
            vals.extend(flat[nz])
    m = sp.csr_matrix(
        (np.asarray(vals, dtype=complex), (rows, cols)),
        shape=(p.n_constraints, int(offsets[-1])),
    )
    b = np.array([rhs for _, rhs in p.constraints])
    cvecs = np.concatenate([np.ascontiguousarray(c).reshape(-1) for c in p.objective])
    return m, b, cvecs, offsets


def _is_real_problem(p: SdpProblem) -> bool:
    return all(np.abs(c.imag).max() == 0 for c in p.objective) and all(
        a is None or np.abs(a.imag).max() == 0 for maps, _ in p.constraints for a in maps
    )


def _assemble(p: SdpProblem):
    import cvxpy as cp

    real_data = _is_real_problem(p)
    variables = [
        cp.Variable((d, d), symmetric=True) if real_data else cp.Variable((d, d), hermitian=True)
        for d in p.block_dims
    ]
    cons = [v >> 0 for v in variables]
    M, b, cvec, _ = _vectorized_data(p)
    z = cp.hstack([cp.vec(v, order="F") for v in variables])
    eq = None
    if p.n_constraints:
        if real_data:
            eq = sp.csr_matrix(M.real) @ z == b
        else:
            eq = cp.real(M @ z) == b
        cons.append(eq)
    # Row-major coefficients against column-major vecs contract to tr(C X).
    if real_data:
        objective = cvec.real @ z
    else:
        objective = cp.real(cvec @ z)
    goal = cp.Maximize(objective) if p.sense == "max" else cp.Minimize(objective)
    return cp.Problem(goal, cons), variables, eq, b


def _quiet_solve(problem, **kwargs):
    # accuracy is checked independently after every solve, so the solver's
    # own inaccuracy warning is redundant noise
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        problem.solve(**kwargs)


_SOLVER_CASCADE = (
    ("CLARABEL", {}),
    ("SCS", {"eps_abs": 1e-9, "eps_rel": 1e-9, "max_iters": 200_000}),
)


def solve(p: SdpProblem, method: str = "direct") -> SdpSolution:
    """Solve a block SDP; see the module docstring for the status contract."""
    import cvxpy as cp

    if method not in ("direct", "doubled"):
        raise ValueError("method must be direct or doubled")
    capacity = p.capacity_problem()
    if capacity is not None:
        return SdpSolution(status=CAPACITY_ERROR, message=capacity)
    if method == "doubled":
        inner = solve(_double_problem(p), method="direct")
        if inner.status != OPTIMAL:
            return inner
        return SdpSolution(
            status=OPTIMAL,
            blocks=_fold_doubled_blocks(inner.blocks, p.block_dims),
            value=inner.value,
            duality_gap=inner.duality_gap,
            message=inner.message + " (doubled embedding)",
        )

    prob, variables, eq, b = _assemble(p)
    attempts = []
    farkas_state = {"tried": False, "cert": None}

    def farkas():
        # at most one certificate search per solve; any solver stumble on a
        # genuinely infeasible instance should end here quickly instead of
        # grinding through the remaining solvers
        if not farkas_state["tried"]:
            farkas_state["tried"] = True
            farkas_state["cert"] = find_infeasibility_certificate(p)
        return farkas_state["cert"]

    saw_infeasible_claim = False
    last_failure = None
    for name, options in _SOLVER_CASCADE:
        try:
            _quiet_solve(prob, solver=getattr(cp, name), **options)
            status = prob.status
            attempts.append((name, status))
        except (cp.error.SolverError, ValueError) as exc:
            attempts.append((name, f"error: {exc}"))
            status = None
        note = "; ".join(f"{s}:{st}" for s, st in attempts)
        if status == cp.UNBOUNDED:
            return SdpSolution(
                status=NUMERICAL_FAILURE, message=f"objective unbounded ({note})"
            )
        if status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
            result = _validated_solution(p, variables, eq, note)
            if result.status == OPTIMAL:
                return result
            last_failure = result
        elif status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
            saw_infeasible_claim = True
        cert = farkas()
        if cert is not None and cert.verified:
            return SdpSolution(status=INFEASIBLE, certificate=cert, message=note)
    if last_failure is not None:
        return last_failure
    note = "; ".join(f"{s}:{st}" for s, st in attempts)
    if saw_infeasible_claim:
        return SdpSolution(
            status=NUMERICAL_FAILURE,
            message=f"solver reported infeasible but no certificate verified ({note})",
        )
    return SdpSolution(status=NUMERICAL_FAILURE, message=f"no solver converged ({note})")


def _validated_solution(p: SdpProblem, variables, eq, note: str) -> SdpSolution:
    """Re-derive value, residual and gap from the raw blocks; repair small
    violations; refuse anything outside the advertised tolerances."""
    raw = []
    for v in variables:
        m = np.asarray(v.value, dtype=complex)
        raw.append(0.5 * (m + m.conj().T))
    first = _assess_blocks(p, raw, eq, note)
    if first.status == OPTIMAL:
        return first
    polished = _polish_blocks(p, raw)
    if polished is not None:
        second = _assess_blocks(p, polished, eq, note + "; polished")
        if second.status == OPTIMAL:
            return second
    return first


def _assess_blocks(p: SdpProblem, candidate, eq, note: str) -> SdpSolution:
    blocks = []
    min_eig = 0.0
    for m in candidate:
        w, vecs = np.linalg.eigh(m)
        low = float(w.min())
        min_eig = min(min_eig, low)
        if -REPAIR_LIMIT <= low < 0:
            # boundary optima come back a hair outside the cone; project
            m = (vecs * np.maximum(w, 0.0)) @ vecs.conj().T
            m = 0.5 * (m + m.conj().T)
        blocks.append(m)
    value = float(sum(np.trace(c @ bl).real for c, bl in zip(p.objective, blocks)))
    residual = 0.0
    gap = 0.0
    if p.n_constraints:
        zval = np.concatenate([np.asarray(bl).reshape(-1, order="F") for bl in blocks])
        M, bvec, _, _ = _vectorized_data(p)
        residual = float(np.abs((M @ zval).real - bvec).max())
        y = None if eq is None else eq.dual_value
        if y is not None:
            # cvxpy reports equality duals in the Maximize convention; the
            # minimizing dual objective carries the opposite sign.
            dual_obj = float(bvec @ np.asarray(y))
            if p.sense == "min":
                dual_obj = -dual_obj
            gap = abs(dual_obj - value)
    scale = 1.0 + abs(value)
    if min_eig < -REPAIR_LIMIT or residual > RESIDUAL_TOL * scale or gap > GAP_TOL * scale:
        return SdpSolution(
            status=NUMERICAL_FAILURE,
            blocks=tuple(blocks),
            value=value,
            duality_gap=gap,
            message=(
                f"solution failed validation: min eig {min_eig:.2e}, residual "
                f"{residual:.2e}, gap {gap:.2e} ({note})"
            ),
        )
    return SdpSolution(
        status=OPTIMAL,
        blocks=tuple(blocks),
        value=value,
        duality_gap=gap,
        message=note,
    )


def _polish_blocks(p: SdpProblem, blocks, iters: int = 2000):
    """Alternate least-norm equality correction with PSD-cone projection.

    Interior point solvers stopping a factor of a few outside the residual
    gate usually sit next to a genuinely feasible point; when the affine
    space and the cone do intersect nearby, the alternating projections
    land on it. Accepts once the remaining cone violation is small enough
    that the final clip inside _assess_blocks keeps the equality residual
    under its gate; returns None on stagnation (disjoint sets) or timeout.
    """
    rows, b, splits = _svec_rows(p)
    if rows.shape[0] == 0:
        return None
    gram = rows @ rows.T
    w, q = np.linalg.eigh(gram)
    good = w > 1e-12 * max(float(w[-1]), 1.0)
    basis = q[:, good]
    inv_w = 1.0 / w[good]
    dims = p.block_dims
    x = np.concatenate([svec(bl) for bl in blocks])
    mark = None
    for it in range(iters):
        resid = rows @ x - b
        x = x - rows.T @ (basis @ (inv_w * (basis.T @ resid)))
        mats = [smat(x[splits[i] : splits[i + 1]], d) for i, d in enumerate(dims)]
        worst = 0.0
        clipped = []
        for m in mats:
            ev, vecs = np.linalg.eigh(m)
            worst = min(worst, float(ev.min()))
            clipped.append((vecs * np.maximum(ev, 0.0)) @ vecs.conj().T)
        if worst >= -0.2 * RESIDUAL_TOL:
            return mats
        if it % 100 == 99:
            if mark is not None and worst - mark < 0.02 * abs(mark):
                return None
            mark = worst
        x = np.concatenate([svec(m) for m in clipped])
    return None


def _svec_rows(p: SdpProblem):
    """All equality constraints as real rows in stacked svec coordinates."""
    sizes = [d * d for d in p.block_dims]
    splits = np.cumsum([0] + sizes)
    rows = np.zeros((p.n_constraints, splits[-1]), dtype=float)
    b = np.zeros(p.n_constraints, dtype=float)
    for j, (maps, rhs) in enumerate(p.constraints):
        b[j] = rhs
        for i, a in enumerate(maps):
            if a is not None:
                rows[j, splits[i] : splits[i + 1]] = svec(a)
    return rows, b, splits


def reduce_equalities(p: SdpProblem, rtol: float = 1e-10) -> tuple[SdpProblem, Certificate | None]:
    """Orthogonalize the equality constraints, dropping dependent rows.

    Constraint families built from overlapping marginal pins repeat
    information (the trace of a tripartite state is fixed once per marginal,
    the shared subsystem twice over). Interior point solvers want full row
    rank, so the rows are combined through an eigendecomposition of their
    Gram matrix. A direction whose row content vanishes but whose right-hand
    side does not is a ready-made refutation: it comes back as the second
    element and the reduced problem should not be solved.
    """
    m = p.n_constraints
    if m <= 1:
        return p, None
    rows, b, splits = _svec_rows(p)
    gram = rows @ rows.T
    w, q = np.linalg.eigh(gram)
    w = np.maximum(w, 0.0)
    thr = rtol * max(float(w[-1]), 1.0)
    kept = w > thr
    b_scale = 1.0 + float(np.abs(b).max())
    best_cert = None
    for idx in np.flatnonzero(~kept):
        residual = float(q[:, idx] @ b)
        if abs(residual) <= 1e-7 * b_scale:
            continue
        y = q[:, idx] * math.copysign(1.0, residual)
        y = y / np.abs(y).max()
        margin, violation = _certificate_quality(p, y)
        cert = Certificate(y=y, margin=margin, psd_violation=violation)
        if best_cert is None or cert.margin - cert.psd_violation > best_cert.margin - best_cert.psd_violation:
            best_cert = cert
        if cert.verified:
            return p, cert
    if best_cert is not None:
        return p, best_cert
    basis = q[:, kept]
    # Unit-norm rows: the combined constraint matrix becomes orthonormal,
    # which is the best conditioning the solver can hope for.
    scale = np.sqrt(w[kept])
    new_rows = (basis.T @ rows) / scale[:, None]
    new_b = (basis.T @ b) / scale
    new_cons = []
    for row, rhs in zip(new_rows, new_b):
        maps = []
        for i, d in enumerate(p.block_dims):
            seg = row[splits[i] : splits[i + 1]]
            maps.append(smat(seg, d) if np.abs(seg).max(initial=0.0) > 0.0 else None)
        new_cons.append((tuple(maps), float(rhs)))
    reduced = SdpProblem(
        block_dims=p.block_dims,
        objective=p.objective,
        constraints=tuple(new_cons),
        sense=p.sense,
        feasibility_only=p.feasibility_only,
    )
    return reduced, None


def find_infeasibility_certificate(p: SdpProblem) -> Certificate | None:
    """Search for a Farkas ray: max b.y with sum_j y_j A_ji <= 0, |y| <= 1."""
    import cvxpy as cp

    m = p.n_constraints
    if m == 0:
        return None
    M, b, _, offsets = _vectorized_data(p)
    y = cp.Variable(m)
    cons = [cp.abs(y) <= 1]
    for i, d in enumerate(p.block_dims):
        block_cols = M[:, offsets[i] : offsets[i + 1]]
        expr = cp.reshape(block_cols.T @ y, (d, d), order="C")
        herm = 0.5 * (expr + cp.conj(cp.transpose(expr)))
        cons.append(herm << 0)
    prob = cp.Problem(cp.Maximize(b @ y), cons)
    try:
        _quiet_solve(prob, solver=cp.CLARABEL)
        if prob.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
            raise cp.error.SolverError(prob.status)
    except (cp.error.SolverError, ValueError):
        try:
            _quiet_solve(prob, solver=cp.SCS, eps_abs=1e-9, eps_rel=1e-9, max_iters=200_000)
        except (cp.error.SolverError, ValueError):
            return None
    if y.value is None:
        return None
    yv = np.asarray(y.value, dtype=float)
    peak = np.abs(yv).max()
    if peak > 1.0:
        yv = yv / peak
    margin, violation = _certificate_quality(p, yv)
    return Certificate(y=yv, margin=margin, psd_violation=violation)


def _certificate_quality(p: SdpProblem, y: np.ndarray):
    margin = float(sum(yj * rhs for yj, (_, rhs) in zip(y, p.constraints)))
    violation = 0.0
    for i, d in enumerate(p.block_dims):
        acc = np.zeros((d, d), dtype=complex)
        for yj, (maps, _) in zip(y, p.constraints):
            if maps[i] is not None:
                acc += yj * maps[i]
        if d:
            top = float(np.linalg.eigvalsh(acc).max())
            violation = max(violation, top)
    return margin, violation


def verify_certificate(p: SdpProblem, cert: Certificate, tol: float = RESIDUAL_TOL) -> bool:
    """Recheck a Farkas ray against the problem data from scratch."""
    y = np.asarray(cert.y, dtype=float)
    if y.shape != (p.n_constraints,):
        return False
    margin, violation = _certificate_quality(p, y)
    return margin > CERT_MARGIN and violation <= tol
