"""Bell scenario machinery: correlations, local bounds, named functionals,
the two-qubit CHSH criterion and a see-saw violation search.

Correlation tables are dense float arrays with the setting axes first, so a
bipartite table has shape (X, Y, A, B) and entry [x, y, a, b] = P(a, b|x, y).
The JSON wire format nests in the same row-major order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import CapacityError, SignalingError
from .qcore import DensityOp
from .rng import derive_seed, rng_from

__all__ = [
    "Scenario",
    "Correlation",
    "BellFunctional",
    "Assemblage",
    "SeesawResult",
    "born_correlation",
    "is_nonsignaling",
    "marginal_of",
    "local_bound",
    "horodecki_chsh",
    "seesaw_optimize",
    "make_functional",
    "random_projective_povm",
    "default_restarts",
    "correlation_to_dict",
    "correlation_from_dict",
    "save_correlation",
    "load_correlation",
]

PSD_ATOL = 1e-9
COMPLETE_ATOL = 1e-9
NS_DEFAULT_TOL = 1e-9
STRATEGY_CAP = 10**7

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True)
class Scenario:
    """Numbers of settings and outcomes per party, two or three parties."""

    settings: tuple[int, ...]
    outcomes: tuple[int, ...]

    def __post_init__(self):
        s = tuple(int(v) for v in self.settings)
        o = tuple(int(v) for v in self.outcomes)
        if len(s) != len(o):
            raise ValueError("settings and outcomes must list the same parties")
        if len(s) not in (2, 3):
            raise ValueError("only bipartite and tripartite scenarios supported")
        if any(v < 1 for v in s) or any(v < 1 for v in o):
            raise ValueError("every party needs at least one setting and outcome")
        object.__setattr__(self, "settings", s)
        object.__setattr__(self, "outcomes", o)

    @property
    def n_parties(self) -> int:
        return len(self.settings)

    @property
    def table_shape(self) -> tuple[int, ...]:
        return self.settings + self.outcomes


def _frozen_array(arr, dtype=float) -> np.ndarray:
    out = np.asarray(arr, dtype=dtype).copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Correlation:
    """Conditional outcome distribution for every setting combination."""

    scenario: Scenario
    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.shape != self.scenario.table_shape:
            raise ValueError(
                f"table shape {t.shape} does not match scenario {self.scenario.table_shape}"
            )
        if t.min() < -1e-9:
            raise ValueError(f"negative probability {t.min()}")
        t = np.clip(t, 0.0, None)
        n = self.scenario.n_parties
        sums = t.sum(axis=tuple(range(n, 2 * n)))
        if np.abs(sums - 1.0).max() > 1e-9:
            raise ValueError("outcome distributions must sum to one per setting")
        object.__setattr__(self, "table", _frozen_array(t))


@dataclass(frozen=True)
class BellFunctional:
    """Linear functional on correlations with a cached local bound.

    kind is "inequality" when local_bound is the exact deterministic maximum
    and "game" when it is only an analytic upper cap on the classical value
    (all coefficients nonnegative in that case).
    """

    scenario: Scenario
    coeffs: np.ndarray
    local_bound: float
    kind: str = "inequality"

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != self.scenario.table_shape:
            raise ValueError("coefficient shape does not match scenario")
        if self.kind not in ("inequality", "game"):
            raise ValueError(f"kind must be inequality or game, got {self.kind!r}")
        if self.kind == "game" and c.min() < 0:
            raise ValueError("game functionals need nonnegative coefficients")
        object.__setattr__(self, "coeffs", _frozen_array(c))
        object.__setattr__(self, "local_bound", float(self.local_bound))

    def value(self, corr: Correlation) -> float:
        if corr.scenario != self.scenario:
            raise ValueError("correlation and functional live in different scenarios")
        return float((self.coeffs * corr.table).sum())

    def scaled(self, lam: float) -> "BellFunctional":
        if lam <= 0:
            raise ValueError("scale factor must be positive")
        return BellFunctional(self.scenario, self.coeffs * lam, self.local_bound * lam, self.kind)


@dataclass(frozen=True)
class Assemblage:
    """One POVM per party and setting; effects indexed [party][setting][outcome]."""

    effects: tuple

    def __post_init__(self):
        frozen = []
        for party in self.effects:
            rows = []
            for povm in party:
                ops = tuple(_frozen_array(e, dtype=complex) for e in povm)
                d = ops[0].shape[0]
                total = np.zeros((d, d), dtype=complex)
                for e in ops:
                    if e.shape != (d, d):
                        raise ValueError("ragged effect dimensions within a party")
                    if np.abs(e - e.conj().T).max() > PSD_ATOL:
                        raise ValueError("effects must be Hermitian")
                    if np.linalg.eigvalsh(e).min() < -PSD_ATOL:
                        raise ValueError("effects must be PSD")
                    total += e
                if np.abs(total - np.eye(d)).max() > COMPLETE_ATOL:
                    raise ValueError("POVM effects must sum to the identity")
                rows.append(ops)
            frozen.append(tuple(rows))
        object.__setattr__(self, "effects", tuple(frozen))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(party[0][0].shape[0] for party in self.effects)

    @property
    def scenario_shape(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        settings = tuple(len(party) for party in self.effects)
        outcomes = tuple(len(party[0]) for party in self.effects)
        return settings, outcomes


def born_correlation(rho: DensityOp, asm: Assemblage) -> Correlation:
    """Outcome distribution tr(rho E_a (x) E_b (...)) for all setting choices."""
    dims = rho.layout.dims
    if dims != asm.dims:
        raise ValueError(f"state dims {dims} do not match assemblage dims {asm.dims}")
    settings, outcomes = asm.scenario_shape
    if any(len(povm) != outcomes[p] for p, party in enumerate(asm.effects) for povm in party):
        raise ValueError("every setting of a party must share one outcome count")
    scen = Scenario(settings, outcomes)
    n = len(dims)
    stacked = [
        np.stack([np.stack(list(povm)) for povm in party])  # (settings, outcomes, d, d)
        for party in asm.effects
    ]
    rt = rho.mat.reshape(dims + dims)
    if n == 2:
        table = np.einsum("ijkl,xaki,yblj->xyab", rt, stacked[0], stacked[1]).real
    elif n == 3:
        table = np.einsum(
            "ijklmn,xali,ybmj,zcnk->xyzabc", rt, stacked[0], stacked[1], stacked[2]
        ).real
    else:
        raise ValueError("born_correlation handles two or three parties")
    return Correlation(scen, table)


def is_nonsignaling(corr: Correlation, tol: float = NS_DEFAULT_TOL) -> bool:
    """True when each party's outcome marginal ignores the others' settings."""
    n = corr.scenario.n_parties
    t = corr.table
    for p in range(n):
        summed = t.sum(axis=n + p)  # drop party p's outcome axis
        ref = summed.take(0, axis=p)
        dev = np.abs(summed - np.expand_dims(ref, p)).max()
        if dev > tol:
            return False
    return True


def marginal_of(corr: Correlation, parties, tol: float = NS_DEFAULT_TOL) -> Correlation:
    """Reduced correlation on the given parties, in the order given.

    Only well defined for nonsignaling input; a signaling table has no
    unique marginal, so that case raises.
    """
    n = corr.scenario.n_parties
    parties = tuple(int(p) for p in parties)
    if len(set(parties)) != len(parties) or any(p < 0 or p >= n for p in parties):
        raise ValueError(f"parties must be distinct indices below {n}")
    if not is_nonsignaling(corr, tol):
        raise SignalingError("correlation signals; marginals are not well defined")
    dropped = [p for p in range(n) if p not in parties]
    t = corr.table
    n_cur = n
    for p in sorted(dropped, reverse=True):
        t = t.sum(axis=n_cur + p)
        t = t.take(0, axis=p)
        n_cur -= 1
    kept_sorted = sorted(parties)
    order = [kept_sorted.index(p) for p in parties]
    m = len(parties)
    t = t.transpose([order[i] for i in range(m)] + [m + order[i] for i in range(m)])
    scen = Scenario(
        tuple(corr.scenario.settings[p] for p in parties),
        tuple(corr.scenario.outcomes[p] for p in parties),
    )
    return Correlation(scen, t)


def _strategies(settings: int, outcomes: int) -> np.ndarray:
    """All deterministic assignments setting -> outcome, one row each."""
    count = outcomes**settings
    radix = outcomes ** np.arange(settings - 1, -1, -1, dtype=np.int64)
    return (np.arange(count, dtype=np.int64)[:, None] // radix) % outcomes


def local_bound(f: BellFunctional) -> float:
    """Exact maximum of the functional over deterministic local strategies.

    The last party is optimized per setting (its best deterministic reply
    decomposes), so only the other parties are enumerated.
    """
    scen = f.scenario
    total = 1
    for m, o in zip(scen.settings, scen.outcomes):
        total *= o**m
    if total > STRATEGY_CAP:
        raise CapacityError(
            f"{total} deterministic strategies exceed the {STRATEGY_CAP} enumeration cap"
        )
    beta = f.coeffs
    if scen.n_parties == 2:
        return _local_bound_2(beta, scen)
    return _local_bound_3(beta, scen)


def _local_bound_2(beta: np.ndarray, scen: Scenario) -> float:
    mA, _ = scen.settings
    sA = _strategies(mA, scen.outcomes[0])
    best = -math.inf
    xs = np.arange(mA)
    for chunk in np.array_split(sA, max(1, len(sA) // 4096)):
        # pick party A's outcome per setting, then the best reply per y
        picked = beta[xs[None, :], :, chunk, :]      # (chunk, mA, Y, B)
        reduced = picked.sum(axis=1)                 # (chunk, Y, B)
        vals = reduced.max(axis=2).sum(axis=1)       # optimal b for each y
        best = max(best, float(vals.max()))
    return best


def _local_bound_3(beta: np.ndarray, scen: Scenario) -> float:
    mA, mB, _ = scen.settings
    oA, oB, _ = scen.outcomes
    best = -math.inf
    xs = np.arange(mA)
    ys = np.arange(mB)
    sB = _strategies(mB, oB)
    for a_assign in _strategies(mA, oA):
        # beta with A's reply fixed: (Y, Z, B, C)
        fixed = beta[xs, :, :, a_assign, :, :].sum(axis=0)
        picked = fixed[ys[None, :], :, sB, :]        # (SB, Y, Z, C)
        reduced = picked.sum(axis=1)                 # (SB, Z, C)
        vals = reduced.max(axis=2).sum(axis=1)
        best = max(best, float(vals.max()))
    return best


def horodecki_chsh(rho: DensityOp) -> float:
    """Largest CHSH value reachable from a two-qubit state with traceless
    dichotomic (spin) observables: 2 sqrt(t1 + t2) for the two largest
    eigenvalues of T^T T, where T is the Pauli correlation matrix.

    The state violates CHSH iff this exceeds 2. Values below 2 certify no
    violation; the operational maximum over all two-outcome POVMs is then
    exactly 2, reached by trivial deterministic measurements.
    """
    if rho.layout.dims != (2, 2):
        raise ValueError(f"needs a 2x2 layout, got {rho.layout.dims}")
    T = np.empty((3, 3))
    for i, si in enumerate(_PAULI):
        for j, sj in enumerate(_PAULI):
            T[i, j] = np.trace(rho.mat @ np.kron(si, sj)).real
    w = np.linalg.eigvalsh(T.T @ T)
    return float(2.0 * math.sqrt(max(w[-1] + w[-2], 0.0)))


# --- see-saw -----------------------------------------------------------------

_DEFAULT_RESTARTS = {
    (2, 2): 36,
    (2, 3): 81,
    (3, 2): 256,
    (3, 3): 576,
    (4, 2): 900,
    (4, 3): 2056,
    (5, 2): 2304,
    (5, 3): 5184,
}


def default_restarts(dim: int, settings: int) -> int:
    """Search effort matched to the local dimension and setting count."""
    return _DEFAULT_RESTARTS.get((dim, settings), 100)


@dataclass
class SeesawResult:
    value: float
    assemblage: Assemblage
    converged: bool
    best_restart: int
    best_seed: int
    restart_values: np.ndarray = field(repr=False)

    def __iter__(self):
        # allow `value, asm = seesaw_optimize(...)`
        return iter((self.value, self.assemblage))


def random_projective_povm(rng, dim: int, outcomes: int):
    """Projective POVM with a Haar-random eigenbasis and random effect ranks."""
    rng = rng_from(rng)
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, _ = np.linalg.qr(g)
    if outcomes <= dim:
        cuts = np.sort(rng.choice(np.arange(1, dim), size=outcomes - 1, replace=False))
        ranks = np.diff(np.concatenate(([0], cuts, [dim])))
    else:
        ranks = np.bincount(rng.integers(0, outcomes, size=dim), minlength=outcomes)
    out, start = [], 0
    for r in ranks:
        cols = q[:, start : start + r]
        out.append(cols @ cols.conj().T)
        start += r
    return out


def seesaw_optimize(
    rho: DensityOp,
    f: BellFunctional,
    restarts: int | None = None,
    max_iters: int = 500,
    tol: float = 1e-8,
    seed=None,
    update_rule: str = "auto",
) -> SeesawResult:
    """Alternating maximization of a Bell functional over local measurements.

    Each sweep fixes all parties but one and replaces that party's POVMs with
    the optimizer of its local operator: the sign decomposition for two
    outcomes (ties broken toward +1), a small per-setting SDP otherwise.
    The value never decreases, so the result is a certified lower bound on
    the quantum maximum. The first restart climbs from the trivial
    deterministic measurement; the others are Haar-random projective starts
    seeded per restart, so results are independent of scheduling.
    """
    scen = f.scenario
    dims = rho.layout.dims
    if len(dims) != scen.n_parties:
        raise ValueError("state and functional disagree on the party count")
    if seed is None:
        raise ValueError("seesaw_optimize needs an explicit seed")
    binary = all(o == 2 for o in scen.outcomes)
    if update_rule == "auto":
        update_rule = "projective" if binary else "general"
    if update_rule == "projective" and not binary:
        raise ValueError("the projective sign-decomposition rule needs two outcomes")
    if update_rule not in ("projective", "general"):
        raise ValueError(f"unknown update rule {update_rule!r}")
    if restarts is None:
        restarts = default_restarts(max(dims), max(scen.settings))
    if update_rule == "projective" and scen.n_parties == 2:
        return _seesaw_binary_bipartite(rho, f, restarts, max_iters, tol, seed)
    return _seesaw_general(rho, f, restarts, max_iters, tol, seed, update_rule)


def _binary_decomposition(coeffs: np.ndarray):
    """Split beta(a,b|x,y) into constant, marginal and correlator weights."""
    sgn = np.array([1.0, -1.0])
    const = coeffs.sum() / 4.0
    alpha = np.einsum("xyab,a->x", coeffs, sgn) / 4.0
    gamma = np.einsum("xyab,b->y", coeffs, sgn) / 4.0
    corr = np.einsum("xyab,a,b->xy", coeffs, sgn, sgn) / 4.0
    return const, alpha, gamma, corr


def _random_observables(rng, count: int, settings: int, dim: int) -> np.ndarray:
    """Stack of (count, settings) random +/-1 observables from Haar projectors."""
    g = rng.normal(size=(count, settings, dim, dim)) + 1j * rng.normal(
        size=(count, settings, dim, dim)
    )
    q, _ = np.linalg.qr(g)
    ranks = rng.integers(1, dim, size=(count, settings)) if dim > 1 else np.ones((count, settings))
    mask = np.arange(dim)[None, None, :] < ranks[:, :, None]
    proj = np.einsum("rmik,rmk,rmjk->rmij", q, mask.astype(float), q.conj())
    return 2.0 * proj - np.eye(dim)


def _sign_update(L: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(L)
    s = np.where(w >= 0.0, 1.0, -1.0)
    return np.einsum("...ik,...k,...jk->...ij", v, s, v.conj())


def _seesaw_binary_bipartite(rho, f, restarts, max_iters, tol, seed) -> SeesawResult:
    dA, dB = rho.layout.dims
    mA, mB = f.scenario.settings
    const, alpha, gamma, corr = _binary_decomposition(f.coeffs)
    rt = rho.mat.reshape(dA, dB, dA, dB)
    redA = np.einsum("ijkj->ik", rt)  # pairs as tr(O_x redA)
    redB = np.einsum("ijil->jl", rt)

    rngs = [rng_from(derive_seed(seed, r)) for r in range(restarts)]
    OA = np.stack([_random_observables(g, 1, mA, dA)[0] for g in rngs])
    OB = np.stack([_random_observables(g, 1, mB, dB)[0] for g in rngs])
    # restart 0 climbs from the trivial deterministic point, so the search
    # never reports less than the plain local value that point reaches
    OA[0] = np.eye(dA)
    OB[0] = np.eye(dB)

    def value_of(OA, OB):
        GA = np.einsum("ijkl,rxki->rxjl", rt, OA)
        t3 = np.einsum("xy,rxjl,rylj->r", corr, GA, OB).real
        t1 = np.einsum("x,rxik,ki->r", alpha, OA, redA).real
        t2 = np.einsum("y,ryjl,lj->r", gamma, OB, redB).real
        return const + t1 + t2 + t3

    vals = value_of(OA, OB)
    converged = False
    for _ in range(max_iters):
        GB = np.einsum("ijkl,rylj->ryik", rt, OB)
        LA = np.einsum("xy,ryik->rxik", corr, GB) + alpha[None, :, None, None] * redA
        OA = _sign_update(LA)
        GA = np.einsum("ijkl,rxki->rxjl", rt, OA)
        LB = np.einsum("xy,rxjl->ryjl", corr, GA) + gamma[None, :, None, None] * redB
        OB = _sign_update(LB)
        new = value_of(OA, OB)
        gain = new - vals
        assert gain.min() > -1e-9, "see-saw sweep decreased the objective"
        vals = new
        if gain.max() < tol:
            converged = True
            break

    best = int(np.argmax(vals))
    eye_a, eye_b = np.eye(dA), np.eye(dB)
    effA = tuple(
        ((eye_a + OA[best, x]) / 2, (eye_a - OA[best, x]) / 2) for x in range(mA)
    )
    effB = tuple(
        ((eye_b + OB[best, y]) / 2, (eye_b - OB[best, y]) / 2) for y in range(mB)
    )
    asm = Assemblage((effA, effB))
    return SeesawResult(
        value=float(vals[best]),
        assemblage=asm,
        converged=converged,
        best_restart=best,
        best_seed=derive_seed(seed, best),
        restart_values=vals,
    )


def _local_operators(rt, dims, effects, party, coeffs, scen):
    """Per-(setting, outcome) operators K with value = sum_x,a tr(E_a|x K_a|x)."""
    n = len(dims)
    if n == 2:
        other = 1 - party
        stacked = np.stack([np.stack(list(p)) for p in effects[other]])
        if party == 0:
            G = np.einsum("ijkl,yblj->ybik", rt, stacked)
            K = np.einsum("xyab,ybik->xaik", coeffs, G)
        else:
            G = np.einsum("ijkl,xaki->xajl", rt, stacked)
            K = np.einsum("xyab,xajl->ybjl", coeffs, G)
        return K
    others = [p for p in range(3) if p != party]
    s1 = np.stack([np.stack(list(p)) for p in effects[others[0]]])
    s2 = np.stack([np.stack(list(p)) for p in effects[others[1]]])
    if party == 0:
        G = np.einsum("ijklmn,ybmj,zcnk->ybzcil", rt, s1, s2)
        K = np.einsum("xyzabc,ybzcil->xail", coeffs, G)
    elif party == 1:
        G = np.einsum("ijklmn,xali,zcnk->xazcjm", rt, s1, s2)
        K = np.einsum("xyzabc,xazcjm->ybjm", coeffs, G)
    else:
        G = np.einsum("ijklmn,xali,ybmj->xaybkn", rt, s1, s2)
        K = np.einsum("xyzabc,xaybkn->zckn", coeffs, G)
    return K


def _povm_sdp_update(K):
    """Maximize sum_a tr(E_a K_a) over POVMs; K indexed (outcome, d, d)."""
    import cvxpy as cp

    o, d, _ = K.shape
    Ks = [0.5 * (k + k.conj().T) for k in K]
    E = [cp.Variable((d, d), hermitian=True) for _ in range(o)]
    cons = [e >> 0 for e in E]
    cons.append(sum(E) == np.eye(d))
    obj = cp.Maximize(sum(cp.real(cp.trace(E[a] @ Ks[a])) for a in range(o)))
    prob = cp.Problem(obj, cons)
    try:
        prob.solve(solver=cp.CLARABEL)
    except cp.error.SolverError:
        prob.solve(solver=cp.SCS, eps_abs=1e-9, eps_rel=1e-9)
    return [np.asarray(e.value) for e in E]


def _seesaw_general(rho, f, restarts, max_iters, tol, seed, rule) -> SeesawResult:
    scen = f.scenario
    dims = rho.layout.dims
    n = scen.n_parties
    rt = rho.mat.reshape(dims + dims)

    best_val, best_asm, best_r, all_vals, any_unconverged = -math.inf, None, 0, [], False
    for r in range(restarts):
        rng = rng_from(derive_seed(seed, r))
        if r == 0:
            # trivial deterministic start, mirroring the batched path
            effects = [
                [
                    [np.eye(dims[p]) if a == 0 else np.zeros((dims[p], dims[p])) for a in range(scen.outcomes[p])]
                    for _ in range(scen.settings[p])
                ]
                for p in range(n)
            ]
        else:
            effects = [
                [random_projective_povm(rng, dims[p], scen.outcomes[p]) for _ in range(scen.settings[p])]
                for p in range(n)
            ]
        val = f.value(born_correlation(rho, _as_assemblage(effects)))
        done = False
        for _ in range(max_iters):
            for p in range(n):
                K = _local_operators(rt, dims, effects, p, f.coeffs, scen)
                for x in range(scen.settings[p]):
                    Kx = K[x]
                    if rule == "projective":
                        D = Kx[0] - Kx[1]
                        O = _sign_update(0.5 * (D + D.conj().T))
                        eye = np.eye(dims[p])
                        effects[p][x] = [(eye + O) / 2, (eye - O) / 2]
                    else:
                        effects[p][x] = _povm_sdp_update(np.asarray(Kx))
            new = f.value(born_correlation(rho, _as_assemblage(effects)))
            assert new > val - 1e-7, "see-saw sweep decreased the objective"
            gain, val = new - val, new
            if gain < tol:
                done = True
                break
        any_unconverged |= not done
        all_vals.append(val)
        if val > best_val:
            best_val, best_asm, best_r = val, _as_assemblage(effects), r
    return SeesawResult(
        value=float(best_val),
        assemblage=best_asm,
        converged=not any_unconverged,
        best_restart=best_r,
        best_seed=derive_seed(seed, best_r),
        restart_values=np.array(all_vals),
    )


def _as_assemblage(effects) -> Assemblage:
    return Assemblage(tuple(tuple(tuple(povm) for povm in party) for party in effects))


# --- named functionals -------------------------------------------------------


def _chsh_coeffs() -> np.ndarray:
    beta = np.empty((2, 2, 2, 2))
    for x, y, a, b in product(range(2), repeat=4):
        beta[x, y, a, b] = (-1.0) ** (a + b + x * y)
    return beta


def _i3322_coeffs() -> np.ndarray:
    """Collins-Gisin form: joint terms plus folded-in marginal penalties."""
    joint = np.array([[1, 1, 1], [1, 1, -1], [1, -1, 0]], dtype=float)
    beta = np.zeros((3, 3, 2, 2))
    beta[:, :, 1, 1] += joint
    beta[0, 0, 1, :] += -1.0  # -P_A(1|x=0), expanded at y=0
    beta[0, 0, :, 1] += -2.0  # -2 P_B(1|y=0), expanded at x=0
    beta[0, 1, :, 1] += -1.0  # -P_B(1|y=1), expanded at x=0
    return beta


def _s_ext_coeffs() -> np.ndarray:
    """Four-setting four-outcome CHSH extension on paired binary labels."""
    beta = np.empty((4, 4, 4, 4))
    for x, y, a, b in product(range(4), repeat=4):
        a1, b2, x1, y2 = a >> 1, b & 1, x >> 1, y & 1
        beta[x, y, a, b] = (-1.0) ** (a1 + b2 + x1 * y2)
    return beta


def make_functional(name: str, **params) -> BellFunctional:
    """Named Bell functionals: chsh, i3322, s_ext, kv (with ell, eta)."""
    key = name.lower()
    if key == "chsh":
        scen = Scenario((2, 2), (2, 2))
        f = BellFunctional(scen, _chsh_coeffs(), 0.0)
        return BellFunctional(scen, f.coeffs, local_bound(f))
    if key == "i3322":
        scen = Scenario((3, 3), (2, 2))
        f = BellFunctional(scen, _i3322_coeffs(), 0.0)
        return BellFunctional(scen, f.coeffs, local_bound(f))
    if key == "s_ext":
        scen = Scenario((4, 4), (4, 4))
        f = BellFunctional(scen, _s_ext_coeffs(), 0.0)
        return BellFunctional(scen, f.coeffs, local_bound(f))
    if key == "kv":
        from . import kvgame

        missing = [k for k in ("ell", "eta") if k not in params]
        if missing:
            raise ValueError(f"kv functional needs parameters {missing}")
        return kvgame.kv_functional(params["ell"], params["eta"])
    raise ValueError(f"unknown functional {name!r}")


# --- wire format ---------------------------------------------------------------


def correlation_to_dict(corr: Correlation) -> dict:
    return {
        "parties": corr.scenario.n_parties,
        "settings": list(corr.scenario.settings),
        "outcomes": list(corr.scenario.outcomes),
        "P": corr.table.tolist(),
    }


def correlation_from_dict(data: dict) -> Correlation:
    scen = Scenario(tuple(data["settings"]), tuple(data["outcomes"]))
    if int(data.get("parties", scen.n_parties)) != scen.n_parties:
        raise ValueError("party count disagrees with the settings list")
    return Correlation(scen, np.asarray(data["P"], dtype=float))


def save_correlation(corr: Correlation, path) -> None:
    with open(path, "w") as fh:
        json.dump(correlation_to_dict(corr), fh)


def load_correlation(path) -> Correlation:
    with open(path) as fh:
        return correlation_from_dict(json.load(fh))
