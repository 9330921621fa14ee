"""Level-1 moment-matrix outer approximation of the quantum set.

Membership and white-noise visibility for bipartite correlations, phrased as
feasibility and linear-objective problems over a single moment matrix. The
operator basis is the identity plus one projector per setting with the last
outcome dropped, which keeps the matrix strictly feasible at white noise.
Quantum correlations always admit a real symmetric moment matrix (average a
complex one with its conjugate), so the matrix variable is kept real.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .bellopt import Correlation, correlation_from_dict, is_nonsignaling
from .errors import DomainError, SignalingError, SolverFailure
from .sdp import INFEASIBLE, OPTIMAL, SdpProblem, solve

__all__ = [
    "MomentBasis",
    "moment_basis",
    "q1_membership",
    "q1_visibility",
    "load_coretti_correlation",
    "VISIBILITY_CAP",
]

VISIBILITY_CAP = 10.0


@dataclass(frozen=True)
class MomentBasis:
    """Ordered level-1 operator list: identity, then per-setting projectors.

    Each non-identity label is (party, setting, outcome) with the last
    outcome of every setting omitted.
    """

    labels: tuple

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, party: int, setting: int, outcome: int) -> int:
        return self.labels.index((party, setting, outcome))


def moment_basis(corr: Correlation) -> MomentBasis:
    scen = corr.scenario
    labels = [None]
    for party in range(2):
        for setting in range(scen.settings[party]):
            for outcome in range(scen.outcomes[party] - 1):
                labels.append((party, setting, outcome))
    return MomentBasis(labels=tuple(labels))


def _require_bipartite_ns(corr: Correlation, tol: float):
    if len(corr.scenario.settings) != 2:
        raise DomainError("level-1 moment matrices are defined for two parties only")
    if not is_nonsignaling(corr, tol=tol):
        raise SignalingError("correlation signals between the parties")


def _marginals(corr: Correlation):
    t = corr.table
    pa = t.sum(axis=3)[:, 0, :]  # P_A(a|x), any y
    pb = t.sum(axis=2)[0, :, :]  # P_B(b|y), any x
    return pa, pb


def _pin(n, i, j, value, rows):
    a = np.zeros((n, n))
    if i == j:
        a[i, i] = 1.0
    else:
        a[i, j] = 0.5
        a[j, i] = 0.5
    rows.append((a, float(value)))


def _moment_pins(corr: Correlation, basis: MomentBasis):
    """Equality pins (matrix, target) for the moment matrix of corr."""
    n = basis.size
    pa, pb = _marginals(corr)
    margs = (pa, pb)
    rows = []
    _pin(n, 0, 0, 1.0, rows)
    for i, lab in enumerate(basis.labels):
        if lab is None:
            continue
        party, x, a = lab
        _pin(n, 0, i, margs[party][x, a], rows)
        _pin(n, i, i, margs[party][x, a], rows)
        for j in range(i + 1, n):
            other = basis.labels[j]
            if other[0] == party and other[1] == x:
                _pin(n, i, j, 0.0, rows)  # orthogonal outcomes of one setting
            elif other[0] == 1 and party == 0:
                _, y, b = other
                _pin(n, i, j, corr.table[x, y, a, b], rows)
    return rows


def q1_membership(corr: Correlation, tol: float = 1e-9) -> bool:
    """Whether a PSD level-1 moment matrix reproduces the correlation."""
    _require_bipartite_ns(corr, tol)
    basis = moment_basis(corr)
    pins = _moment_pins(corr, basis)
    problem = SdpProblem(
        (basis.size,),
        None,
        tuple(((a,), rhs) for a, rhs in pins),
        feasibility_only=True,
    )
    sol = solve(problem)
    if sol.status == OPTIMAL:
        return True
    if sol.status == INFEASIBLE:
        return False
    raise SolverFailure(f"membership SDP did not resolve: {sol.status} ({sol.message})")


def _white_noise_table(corr: Correlation) -> np.ndarray:
    scen = corr.scenario
    oa, ob = scen.outcomes
    return np.full(scen.table_shape, 1.0 / (oa * ob))


def _visibility_direct(corr: Correlation) -> float:
    """One SDP: moment pins become affine in the mixing weight."""
    basis = moment_basis(corr)
    n = basis.size
    pins = _moment_pins(corr, basis)
    noise = Correlation(corr.scenario, _white_noise_table(corr))
    noise_pins = _moment_pins(noise, basis)
    blocks = (n, 1, 1)  # moment matrix, weight, slack against the cap
    one = np.array([[1.0]])
    cons = []
    for (a, target), (_, base) in zip(pins, noise_pins):
        # entry = base + v * (target - base)
        cons.append(((a, np.array([[base - target]]), None), base))
    cons.append(((None, one, one), VISIBILITY_CAP))
    objective = (np.zeros((n, n)), one, np.zeros((1, 1)))
    sol = solve(SdpProblem(blocks, objective, tuple(cons)))
    if sol.status != OPTIMAL:
        raise SolverFailure(f"visibility SDP did not resolve: {sol.status} ({sol.message})")
    return float(sol.value)


def _visibility_bisect(corr: Correlation, resolution: float = 1e-6) -> float:
    """Feasibility bisection along the noise line, pins evaluated directly.

    Mixtures with weight above 1 stop being probability tables, so the pins
    are interpolated numerically instead of built from Correlation objects.
    """
    basis = moment_basis(corr)
    pins = _moment_pins(corr, basis)
    noise = Correlation(corr.scenario, _white_noise_table(corr))
    noise_pins = _moment_pins(noise, basis)

    def feasible(v: float) -> bool:
        cons = tuple(
            ((a,), base + v * (target - base))
            for (a, target), (_, base) in zip(pins, noise_pins)
        )
        sol = solve(SdpProblem((basis.size,), None, cons, feasibility_only=True))
        if sol.status == OPTIMAL:
            return True
        if sol.status == INFEASIBLE:
            return False
        raise SolverFailure(f"bisection step did not resolve: {sol.status} ({sol.message})")

    if feasible(VISIBILITY_CAP):
        return VISIBILITY_CAP
    lo, hi = 0.0, VISIBILITY_CAP
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo


def q1_visibility(corr: Correlation, method: str = "direct", tol: float = 1e-9) -> float:
    """Largest weight v with v P + (1-v) white noise inside the level-1 set.

    The weight is capped at VISIBILITY_CAP since correlations deep inside the
    set (white noise itself being the extreme case) admit unbounded weights.
    Values of at least 1 certify membership of the correlation itself.
    """
    _require_bipartite_ns(corr, tol)
    if method == "direct":
        return _visibility_direct(corr)
    if method == "bisect":
        return _visibility_bisect(corr)
    raise ValueError("method must be direct or bisect")


def load_coretti_correlation(path: str | None = None) -> Correlation:
    """Load the externally supplied correlation table, if present.

    The packaged file holds a documented null placeholder; a DomainError
    explains how to supply the actual values.
    """
    if path is None:
        payload = json.loads(
            resources.files("qtransit").joinpath("data/coretti_pab.json").read_text()
        )
    else:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    data = payload.get("data") if isinstance(payload, dict) else payload
    if data is None:
        raise DomainError(
            "correlation data not populated; supply the published table in the "
            "wire format documented inside data/coretti_pab.json"
        )
    return correlation_from_dict(data)
