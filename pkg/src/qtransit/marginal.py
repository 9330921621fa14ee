"""Tripartite marginal problems and the transitivity verdict pipeline.

Given two bipartite states that agree on their shared subsystem, the set of
tripartite states reproducing both is a spectrahedron. Everything here is a
question about that set: is it nonempty, does it contain a state whose AC
marginal is PPT, is it a single point, and what do the answers say about
nonlocality, steering and entanglement flowing from the AB and BC pairs to
the unmeasured AC pair.

All searches reduce to equality-constrained SDPs over one or two PSD blocks.
Before solving, the feasible set is restricted to the subspace where any
compatible state must live (the intersection of the two marginal supports,
tensored with the remaining party), and linearly dependent pins are merged;
both steps are loss-free and keep the interior point solver comfortable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import sdp
from .bellopt import horodecki_chsh, make_functional, seesaw_optimize
from .bounds import LvParams, fef, lv_lower_bound, min_k_for_violation, steering_threshold
from .errors import (
    CapacityError,
    DomainError,
    IncompatibleMarginalsError,
    SolverFailure,
)
from .qcore import DensityOp, Ket, Layout, is_ppt, partial_trace, permute_subsystems
from .rng import derive_seed

__all__ = [
    "MarginalSpec",
    "TransitivityVerdict",
    "VerdictConfig",
    "compatible_extremal_overlap",
    "find_compatible_state",
    "exists_compatible_ppt_ac",
    "symmetric_extension_feasible",
    "extension_threshold",
    "transitivity_verdict",
    "w_copies_verdict",
    "FORCED_NONLOCAL",
    "REFUTED_BY_SEPARABLE_AC",
    "UNDETERMINED",
]

FORCED_NONLOCAL = "forced_nonlocal"
REFUTED_BY_SEPARABLE_AC = "refuted_by_separable_ac"
UNDETERMINED = "undetermined"

LOCAL_COMPAT_TOL = 1e-9
MARGINAL_CHECK_TOL = 1e-7
DEFAULT_UNIQUENESS_TOL = 1e-5

# Cuts where a PPT marginal is guaranteed separable.
_EXACT_PPT_CUTS = {(2, 2), (2, 3), (3, 2)}


@dataclass(frozen=True)
class MarginalSpec:
    """A locally compatible pair of bipartite marginals on AB and BC."""

    rho_ab: DensityOp
    rho_bc: DensityOp

    def __post_init__(self):
        if len(self.rho_ab.layout.dims) != 2 or len(self.rho_bc.layout.dims) != 2:
            raise DomainError("both marginals must be bipartite")
        shared_left = self.rho_ab.layout.dims[1]
        shared_right = self.rho_bc.layout.dims[0]
        if shared_left != shared_right:
            raise DomainError(
                f"shared subsystem dimensions disagree: {shared_left} vs {shared_right}"
            )
        at_b_from_ab = partial_trace(self.rho_ab, (1,)).mat
        at_b_from_bc = partial_trace(self.rho_bc, (0,)).mat
        gap = float(np.abs(at_b_from_ab - at_b_from_bc).max())
        if gap > LOCAL_COMPAT_TOL:
            raise DomainError(
                f"marginals disagree on the shared subsystem by {gap:.2e}"
            )

    @property
    def dims(self) -> tuple[int, int, int]:
        return (
            self.rho_ab.layout.dims[0],
            self.rho_ab.layout.dims[1],
            self.rho_bc.layout.dims[1],
        )

    @property
    def layout(self) -> Layout:
        return Layout(self.dims)

    @property
    def total_dim(self) -> int:
        d_a, d_b, d_c = self.dims
        return d_a * d_b * d_c


def _hermitian_basis(d):
    for m in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[m, m] = 1.0
        yield e
    for m in range(d):
        for n in range(m + 1, d):
            re = np.zeros((d, d), dtype=complex)
            re[m, n] = re[n, m] = 0.5
            yield re
            im = np.zeros((d, d), dtype=complex)
            im[m, n] = 0.5j
            im[n, m] = -0.5j
            yield im


def _entry_pins(target: np.ndarray):
    """Hermitian basis elements paired with their traced values on target."""
    t = np.asarray(target, dtype=complex)
    for f in _hermitian_basis(t.shape[0]):
        yield f, float(np.einsum("ij,ji->", t, f).real)


def _support_projector(mat: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(mat)
    keep = w > 1e-10 * max(float(w[-1]), 1.0)
    vs = v[:, keep]
    return vs @ vs.conj().T


def _support_isometry(spec: MarginalSpec) -> np.ndarray | None:
    """Isometry onto the subspace every compatible state is supported on.

    A PSD operator's support lies inside supp(marginal) tensored with the
    traced-out party, so restricting the variable to the intersection of the
    two lifted supports changes nothing about the feasible set. Returns None
    when the intersection is already the full space.
    """
    d_a, d_b, d_c = spec.dims
    p1 = np.kron(_support_projector(spec.rho_ab.mat), np.eye(d_c))
    p2 = np.kron(np.eye(d_a), _support_projector(spec.rho_bc.mat))
    w, v = np.linalg.eigh(p1 + p2)
    keep = w > 2.0 - 1e-7
    r = int(keep.sum())
    if r == 0:
        raise IncompatibleMarginalsError(
            "the marginal supports share no tripartite subspace"
        )
    if r == spec.total_dim:
        return None
    return v[:, keep]


def _lift_ab(f: np.ndarray, dims) -> np.ndarray:
    return np.kron(f, np.eye(dims[2]))


def _lift_bc(f: np.ndarray, dims) -> np.ndarray:
    return np.kron(np.eye(dims[0]), f)


def _lift_ac(f: np.ndarray, dims) -> np.ndarray:
    d_a, d_b, d_c = dims
    f4 = np.asarray(f, dtype=complex).reshape(d_a, d_c, d_a, d_c)
    out = np.einsum("acxz,bd->abcxdz", f4, np.eye(d_b))
    d = d_a * d_b * d_c
    return out.reshape(d, d)


def _pt_second(f: np.ndarray, d_a: int, d_c: int) -> np.ndarray:
    """Partial transpose on the second factor of an AC operator."""
    f4 = np.asarray(f, dtype=complex).reshape(d_a, d_c, d_a, d_c)
    return f4.transpose(0, 3, 2, 1).reshape(d_a * d_c, d_a * d_c)


def _compress(mat: np.ndarray, isometry: np.ndarray | None) -> np.ndarray:
    if isometry is None:
        return mat
    return isometry.conj().T @ mat @ isometry


def _marginal_rows(spec: MarginalSpec, isometry, extra_blocks: int):
    """Equality pins tying the tripartite block to both input marginals."""
    dims = spec.dims
    pad = (None,) * extra_blocks
    rows = []
    for f, value in _entry_pins(spec.rho_ab.mat):
        rows.append(((_compress(_lift_ab(f, dims), isometry),) + pad, value))
    for f, value in _entry_pins(spec.rho_bc.mat):
        rows.append(((_compress(_lift_bc(f, dims), isometry),) + pad, value))
    return rows


def _check_capacity(spec: MarginalSpec, n_rows: int):
    if spec.total_dim > sdp.MAX_BLOCK_DIM:
        raise CapacityError(
            f"tripartite dimension {spec.total_dim} exceeds the "
            f"{sdp.MAX_BLOCK_DIM} block cap"
        )
    if n_rows > sdp.MAX_CONSTRAINTS:
        raise CapacityError(
            f"{n_rows} marginal pins exceed the {sdp.MAX_CONSTRAINTS} cap"
        )


def _pin_count(spec: MarginalSpec, with_ppt: bool) -> int:
    d_a, d_b, d_c = spec.dims
    n = (d_a * d_b) ** 2 + (d_b * d_c) ** 2
    if with_ppt:
        n += (d_a * d_c) ** 2
    return n


def _solve_reduced(problem: sdp.SdpProblem) -> sdp.SdpSolution:
    reduced, cert = sdp.reduce_equalities(problem)
    if cert is not None:
        if cert.verified:
            return sdp.SdpSolution(status=sdp.INFEASIBLE, certificate=cert)
        reduced = problem
    return sdp.solve(reduced)


def _lift_block(block: np.ndarray, isometry, spec: MarginalSpec) -> DensityOp:
    full = block if isometry is None else isometry @ block @ isometry.conj().T
    return DensityOp.from_noisy(full, spec.layout)


def _check_optimizer(rho: DensityOp, spec: MarginalSpec):
    ab = partial_trace(rho, (0, 1)).mat
    bc = partial_trace(rho, (1, 2)).mat
    drift = max(
        float(np.abs(ab - spec.rho_ab.mat).max()),
        float(np.abs(bc - spec.rho_bc.mat).max()),
    )
    if drift > MARGINAL_CHECK_TOL:
        raise SolverFailure(
            f"optimizer drifts from the pinned marginals by {drift:.2e}"
        )


def _target_matrix(target, spec: MarginalSpec) -> np.ndarray:
    if isinstance(target, Ket):
        op = target.density()
    elif isinstance(target, DensityOp):
        op = target
    else:
        raise DomainError("target must be a Ket or a DensityOp")
    if op.layout.dims != spec.dims:
        raise DomainError(
            f"target lives on {op.layout.dims}, the marginals on {spec.dims}"
        )
    return op.mat


def compatible_extremal_overlap(
    spec: MarginalSpec,
    target,
    sense: str = "max",
    support_presolve: bool = True,
):
    """Extremize tr(rho_ABC target) over all states with the given marginals.

    Running both senses on a pure target decides uniqueness of the global
    state: both extremes sitting at 1 means nothing but the target itself is
    compatible. Returns (value, optimizer); raises
    IncompatibleMarginalsError with a Farkas certificate when no compatible
    state exists at all.
    """
    if sense not in ("min", "max"):
        raise ValueError("sense must be min or max")
    tmat = _target_matrix(target, spec)
    _check_capacity(spec, _pin_count(spec, with_ppt=False))
    isometry = _support_isometry(spec) if support_presolve else None
    rows = _marginal_rows(spec, isometry, extra_blocks=0)
    dim = spec.total_dim if isometry is None else isometry.shape[1]
    problem = sdp.SdpProblem(
        block_dims=(dim,),
        objective=(_compress(tmat, isometry),),
        constraints=tuple(rows),
        sense=sense,
    )
    sol = _solve_reduced(problem)
    if sol.status == sdp.CAPACITY_ERROR:
        raise CapacityError(sol.message)
    if sol.status == sdp.INFEASIBLE:
        raise IncompatibleMarginalsError(
            "no tripartite state reproduces both marginals",
            certificate=sol.certificate,
        )
    if sol.status != sdp.OPTIMAL:
        raise SolverFailure(sol.message or "overlap optimization failed")
    rho = _lift_block(sol.blocks[0], isometry, spec)
    _check_optimizer(rho, spec)
    return float(sol.value), rho


def find_compatible_state(spec: MarginalSpec, support_presolve: bool = True) -> DensityOp:
    """Any state with the requested marginals, from a feasibility solve."""
    _check_capacity(spec, _pin_count(spec, with_ppt=False))
    isometry = _support_isometry(spec) if support_presolve else None
    rows = _marginal_rows(spec, isometry, extra_blocks=0)
    dim = spec.total_dim if isometry is None else isometry.shape[1]
    problem = sdp.SdpProblem(
        block_dims=(dim,),
        objective=(None,),
        constraints=tuple(rows),
        feasibility_only=True,
    )
    sol = _solve_reduced(problem)
    if sol.status == sdp.CAPACITY_ERROR:
        raise CapacityError(sol.message)
    if sol.status == sdp.INFEASIBLE:
        raise IncompatibleMarginalsError(
            "no tripartite state reproduces both marginals",
            certificate=sol.certificate,
        )
    if sol.status != sdp.OPTIMAL:
        raise SolverFailure(sol.message or "feasibility solve failed")
    rho = _lift_block(sol.blocks[0], isometry, spec)
    _check_optimizer(rho, spec)
    return rho


def exists_compatible_ppt_ac(
    spec: MarginalSpec, support_presolve: bool = True
) -> tuple[bool, DensityOp | None]:
    """Search for a compatible state whose AC marginal stays PSD under
    partial transposition.

    A feasible answer refutes transitivity outright on qubit-qubit and
    qubit-qutrit AC cuts, where PPT and separable coincide; on larger cuts
    the flag certifies PPT-compatibility only. Returns (flag, witness); the
    witness is the full tripartite state.
    """
    d_a, d_b, d_c = spec.dims
    d_ac = d_a * d_c
    _check_capacity(spec, _pin_count(spec, with_ppt=True))
    isometry = _support_isometry(spec) if support_presolve else None
    rows = _marginal_rows(spec, isometry, extra_blocks=1)
    # Second block: Y = (tr_B X)^{T_C}, PSD by construction. The pairing
    # tr(M^{T_C} F) = tr(M F^{T_C}) moves the transpose onto the basis.
    for f in _hermitian_basis(d_ac):
        lifted = _compress(_lift_ac(_pt_second(f, d_a, d_c), spec.dims), isometry)
        rows.append(((-lifted, f), 0.0))
    dim = spec.total_dim if isometry is None else isometry.shape[1]
    problem = sdp.SdpProblem(
        block_dims=(dim, d_ac),
        objective=(None, None),
        constraints=tuple(rows),
        feasibility_only=True,
    )
    sol = _solve_reduced(problem)
    if sol.status == sdp.CAPACITY_ERROR:
        raise CapacityError(sol.message)
    if sol.status == sdp.INFEASIBLE:
        return False, None
    if sol.status != sdp.OPTIMAL:
        raise SolverFailure(sol.message or "PPT-compatibility solve failed")
    rho = _lift_block(sol.blocks[0], isometry, spec)
    _check_optimizer(rho, spec)
    ac = partial_trace(rho, (0, 2))
    if not is_ppt(ac, (1,), tol=1e-6):
        raise SolverFailure("witness AC marginal fails the PPT re-check")
    return True, rho


def _embed_two_site(f: np.ndarray, first: int, second: int, n_sites: int) -> np.ndarray:
    """Lift a two-qubit operator onto sites (first, second) of a register."""
    rest = [i for i in range(n_sites) if i not in (first, second)]
    full = np.kron(f, np.eye(2 ** len(rest), dtype=complex))
    order = [first, second] + rest
    perm = [order.index(i) for i in range(n_sites)]
    t = full.reshape((2,) * (2 * n_sites))
    t = t.transpose(perm + [n_sites + p for p in perm])
    d = 2**n_sites
    return t.reshape(d, d)


def symmetric_extension_feasible(
    rho: DensityOp, side: str = "A", copies: int = 2
) -> bool:
    """Whether a two-qubit state extends to several copies of one side.

    True when some PSD operator on (copies of the chosen side + the other
    side) reproduces rho between every copy and the fixed side. Averaging
    such an extension over permutations of the copies keeps it PSD and
    keeps every pair marginal, so one symmetric under copy exchange exists
    exactly when this relaxed search succeeds; the symmetry constraint
    itself never needs to be imposed.
    """
    if side not in ("A", "B"):
        raise DomainError("side must be A or B")
    if copies not in (2, 3, 4):
        raise DomainError("copies must be 2, 3 or 4")
    if rho.layout.dims != (2, 2):
        raise DomainError("symmetric extension search needs a two-qubit state")
    # Internally the extended side comes first, so a B-side search swaps.
    pair = rho.mat if side == "A" else permute_subsystems(rho, (1, 0)).mat
    n_sites = copies + 1
    rows = []
    for copy in range(copies):
        for f, value in _entry_pins(pair):
            rows.append(((_embed_two_site(f, copy, copies, n_sites),), value))
    problem = sdp.SdpProblem(
        block_dims=(2**n_sites,),
        objective=(None,),
        constraints=tuple(rows),
        feasibility_only=True,
    )
    sol = _solve_reduced(problem)
    if sol.status == sdp.CAPACITY_ERROR:
        raise CapacityError(sol.message)
    if sol.status == sdp.INFEASIBLE:
        return False
    if sol.status != sdp.OPTIMAL:
        raise SolverFailure(sol.message or "extension solve failed")
    return True


def extension_threshold(
    state_fn,
    side: str = "A",
    copies: int = 2,
    lo: float = 0.0,
    hi: float = 1.0,
    resolution: float = 1e-4,
) -> float:
    """Bisect for the parameter where state_fn's output turns extendible.

    Assumes feasibility is monotone in the parameter (infeasible below,
    feasible above), which holds for the families studied here.
    """
    if symmetric_extension_feasible(state_fn(lo), side, copies):
        return lo
    if not symmetric_extension_feasible(state_fn(hi), side, copies):
        raise DomainError("family is not extendible anywhere on the bracket")
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if symmetric_extension_feasible(state_fn(mid), side, copies):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class VerdictConfig:
    """Knobs for the transitivity pipeline.

    candidate overrides the pure state whose uniqueness is tested (top
    eigenvector of a feasibility solve otherwise); functionals names the
    Bell functionals the see-saw tries on inputs that are not two-qubit;
    seed is required whenever a see-saw or a d > 2 overlap optimizer runs.
    """

    candidate: Ket | None = None
    uniqueness_tol: float = DEFAULT_UNIQUENESS_TOL
    seed: int | None = None
    restarts: int | None = None
    functionals: tuple[str, ...] = ("chsh",)
    attempt_refutation: bool = True
    support_presolve: bool = True


@dataclass(frozen=True)
class TransitivityVerdict:
    """Outcome of the pipeline, with enough evidence to re-check it.

    ac_status concerns nonlocality: forced_nonlocal means every compatible
    AC marginal is nonlocal, refuted_by_separable_ac that some compatible
    state has a PPT (separable, on small cuts) AC marginal. The steering
    and entanglement flags answer the analogous questions for those
    resources; None means the one-sided criteria could not decide.
    """

    inputs_nonlocal: dict
    ac_status: str
    steering_transitive: bool | None
    entanglement_transitive: bool | None
    witness: DensityOp | None
    evidence: dict

    def to_dict(self, include_witness: bool = False) -> dict:
        out = {
            "inputs_nonlocal": self.inputs_nonlocal,
            "ac_status": self.ac_status,
            "steering_transitive": self.steering_transitive,
            "entanglement_transitive": self.entanglement_transitive,
            "evidence": self.evidence,
        }
        if include_witness and self.witness is not None:
            out["witness"] = {
                "dims": list(self.witness.layout.dims),
                "mat_re": self.witness.mat.real.tolist(),
                "mat_im": self.witness.mat.imag.tolist(),
            }
        return out


def _nonlocality_check(rho: DensityOp, config: VerdictConfig, label: str) -> dict:
    dims = rho.layout.dims
    if dims == (2, 2):
        value = horodecki_chsh(rho)
        return {
            "method": "horodecki",
            "value": float(value),
            "local_bound": 2.0,
            "certified": bool(value > 2.0 + 1e-12),
        }
    if config.seed is None:
        raise DomainError(
            f"certifying nonlocality of the {label} marginal needs a seed"
        )
    best = None
    for name in config.functionals:
        f = make_functional(name)
        res = seesaw_optimize(
            rho,
            f,
            restarts=config.restarts,
            seed=derive_seed(config.seed, "seesaw", label, name),
        )
        margin = res.value - f.local_bound
        if best is None or margin > best["value"] - best["local_bound"]:
            best = {
                "method": f"seesaw:{name}",
                "value": float(res.value),
                "local_bound": float(f.local_bound),
                "certified": bool(margin > 1e-7),
            }
    return best


def _steering_check(rho: DensityOp, config: VerdictConfig, label: str) -> dict:
    dims = rho.layout.dims
    if dims[0] != dims[1]:
        return {
            "method": "none",
            "certified": None,
            "note": "entangled-fraction criterion needs equal local dimensions",
        }
    d = dims[0]
    if d == 2:
        value = fef(rho)
    else:
        if config.seed is None:
            return {
                "method": "none",
                "certified": None,
                "note": "entangled-fraction optimizer needs a seed",
            }
        value = fef(rho, seed=derive_seed(config.seed, "fef", label))
    threshold = steering_threshold(d)
    return {
        "method": "fef",
        "value": float(value),
        "threshold": float(threshold),
        "certified": bool(value > threshold + 1e-9),
    }


def _entanglement_check(rho: DensityOp) -> dict:
    npt = not is_ppt(rho, (1,))
    return {"method": "partial-transpose", "npt": npt, "certified": npt}


def _top_eigenvector(rho: DensityOp) -> Ket:
    _, vecs = np.linalg.eigh(rho.mat)
    return Ket(vecs[:, -1], rho.layout)


def transitivity_verdict(
    spec: MarginalSpec, config: VerdictConfig | None = None
) -> TransitivityVerdict:
    """Run the full pipeline on a pair of marginals.

    Three stages: certify each input nonlocal (Horodecki for two-qubit
    pairs, see-saw otherwise); look for a compatible state with a PPT AC
    marginal, which refutes transitivity; failing that, test whether the
    compatible set is a single pure state and, if so, apply the
    nonlocality, steering and entanglement criteria to its forced AC
    marginal. Every certificate used is recorded in the evidence.
    """
    config = config or VerdictConfig()
    d_a, _, d_c = spec.dims
    inputs_nonlocal = {
        "AB": _nonlocality_check(spec.rho_ab, config, "AB"),
        "BC": _nonlocality_check(spec.rho_bc, config, "BC"),
    }
    inputs_steering = {
        "AB": _steering_check(spec.rho_ab, config, "AB"),
        "BC": _steering_check(spec.rho_bc, config, "BC"),
    }
    inputs_entangled = {
        "AB": _entanglement_check(spec.rho_ab),
        "BC": _entanglement_check(spec.rho_bc),
    }
    ac_cut_exact = (d_a, d_c) in _EXACT_PPT_CUTS
    evidence = {
        "provenance": "numeric",
        "inputs": {
            "nonlocality": inputs_nonlocal,
            "steering": inputs_steering,
            "entanglement": inputs_entangled,
        },
        "refutation": {"attempted": bool(config.attempt_refutation)},
        "uniqueness": {"checked": False},
        "ac_cut": [d_a, d_c],
        "ppt_exact_at_cut": ac_cut_exact,
    }

    if config.attempt_refutation:
        ppt_found, witness = exists_compatible_ppt_ac(
            spec, support_presolve=config.support_presolve
        )
        evidence["refutation"]["ppt_compatible_found"] = ppt_found
        if ppt_found:
            return TransitivityVerdict(
                inputs_nonlocal=inputs_nonlocal,
                ac_status=REFUTED_BY_SEPARABLE_AC,
                steering_transitive=False if ac_cut_exact else None,
                entanglement_transitive=False if ac_cut_exact else None,
                witness=witness,
                evidence=evidence,
            )

    if config.candidate is not None:
        candidate = config.candidate
        source = "config"
    else:
        candidate = _top_eigenvector(
            find_compatible_state(spec, support_presolve=config.support_presolve)
        )
        source = "solver"
    low, _ = compatible_extremal_overlap(
        spec, candidate, "min", support_presolve=config.support_presolve
    )
    high, _ = compatible_extremal_overlap(
        spec, candidate, "max", support_presolve=config.support_presolve
    )
    unique = low >= 1.0 - config.uniqueness_tol and high - low <= config.uniqueness_tol
    evidence["uniqueness"] = {
        "checked": True,
        "candidate_source": source,
        "min_overlap": float(low),
        "max_overlap": float(high),
        "declared": bool(unique),
    }
    if not unique:
        return TransitivityVerdict(
            inputs_nonlocal=inputs_nonlocal,
            ac_status=UNDETERMINED,
            steering_transitive=None,
            entanglement_transitive=None,
            witness=None,
            evidence=evidence,
        )

    forced = candidate.density()
    ac = partial_trace(forced, (0, 2))
    ac_nonlocal = _nonlocality_check(ac, config, "AC")
    ac_steering = _steering_check(ac, config, "AC")
    ac_entangled = _entanglement_check(ac)
    evidence["ac"] = {
        "nonlocality": ac_nonlocal,
        "steering": ac_steering,
        "entanglement": ac_entangled,
    }

    inputs_certified = all(v["certified"] for v in inputs_nonlocal.values())
    forced_nonlocal = inputs_certified and ac_nonlocal["certified"]

    def _one_sided(inputs: dict, ac_check: dict) -> bool | None:
        flags = [v["certified"] for v in inputs.values()] + [ac_check["certified"]]
        if all(f is True for f in flags):
            return True
        return None

    steering_flag = _one_sided(inputs_steering, ac_steering)
    entanglement_flag = _one_sided(inputs_entangled, ac_entangled)
    if not ac_entangled["npt"] and ac_cut_exact:
        # PPT on an exact cut means separable, hence neither entangled nor
        # steerable; with entangled inputs that is a hard refutation.
        if all(v["certified"] for v in inputs_entangled.values()):
            entanglement_flag = False
        if all(v["certified"] is True for v in inputs_steering.values()):
            steering_flag = False
    return TransitivityVerdict(
        inputs_nonlocal=inputs_nonlocal,
        ac_status=FORCED_NONLOCAL if forced_nonlocal else UNDETERMINED,
        steering_transitive=steering_flag,
        entanglement_transitive=entanglement_flag,
        witness=forced,
        evidence=evidence,
    )


def w_copies_verdict(k: int, variant: str = "tight") -> TransitivityVerdict:
    """Analytic verdict for k parallel copies of the two-qubit pair shared
    by neighbours of a three-qubit W state.

    The tripartite space at k copies has dimension 8^k, hopeless for any
    solver, so this route is closed form: the pair marginal has fully
    entangled fraction 2/3 exactly, each tensor power pins the product of
    W states as the only compatible global state, and the forced AC
    marginal equals the inputs. Nonlocality of the k-copy marginal comes
    from the certified local-variables bound, which first exceeds one at
    29 copies (tight variant; 31 loose). Steering (2/3 > 5/8 already on a
    single copy) and entanglement (positivity lost under partial
    transposition survives tensoring) transfer at every k.
    """
    if k < 1:
        raise DomainError("copy count must be at least 1")
    fraction = 2.0 / 3.0
    params = LvParams(F=fraction, d=2, k=k, variant=variant)
    bound = lv_lower_bound(params)
    certified = bound is not None and bound > 1.0
    nonlocal_check = {
        "method": f"lv-bound:{variant}",
        "value": None if bound is None else float(bound),
        "local_bound": 1.0,
        "certified": bool(certified),
    }
    steering_check = {
        "method": "fef",
        "value": fraction,
        "threshold": float(steering_threshold(2)),
        "certified": True,
    }
    entanglement_check = {"method": "partial-transpose", "npt": True, "certified": True}
    inputs_nonlocal = {"AB": nonlocal_check, "BC": dict(nonlocal_check)}
    evidence = {
        "provenance": "analytic",
        "copies": k,
        "variant": variant,
        "min_copies_for_nonlocality": min_k_for_violation(fraction, 2, variant),
        "inputs": {
            "nonlocality": inputs_nonlocal,
            "steering": {"AB": steering_check, "BC": dict(steering_check)},
            "entanglement": {"AB": entanglement_check, "BC": dict(entanglement_check)},
        },
        "uniqueness": {
            "checked": True,
            "declared": True,
            "candidate_source": "closed-form",
        },
        "refutation": {"attempted": False},
        "ac": {
            "nonlocality": nonlocal_check,
            "steering": steering_check,
            "entanglement": entanglement_check,
        },
    }
    return TransitivityVerdict(
        inputs_nonlocal=inputs_nonlocal,
        ac_status=FORCED_NONLOCAL if certified else UNDETERMINED,
        steering_transitive=True,
        entanglement_transitive=True,
        witness=None,
        evidence=evidence,
    )
