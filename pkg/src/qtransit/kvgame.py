"""Hadamard-coset nonlocal game at enumerable sizes.

Players receive cosets of the length-n Hadamard code (n = 2^ell), answer with
coset elements, and win when the answers differ by exactly the referee's
noise string. The canonical strategy measures a shared n-dimensional
maximally entangled state in the coset's sign-vector basis; its winning
probability has the closed form (1-2*eta)^2 + 4*eta*(1-eta)/n, which the
exact noise-string sum and the Monte-Carlo mode both reproduce.

Bit i of a string is the coefficient of 2^i. Codeword j has bit i equal to
popcount(i AND j) mod 2, the Sylvester ordering of the Hadamard matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bellopt import BellFunctional, Scenario
from .errors import CapacityError, DomainError
from .rng import rng_from

__all__ = [
    "KvInstance",
    "build_kv_instance",
    "measurement_vector",
    "coset_basis",
    "kv_quantum_win_prob",
    "kv_win_prob_formula",
    "kv_classical_cap",
    "kv_default_eta",
    "kv_functional",
]

SUPPORTED_ELL = (2, 3, 4)
FUNCTIONAL_ELL_CAP = 3


@dataclass(frozen=True)
class KvInstance:
    ell: int
    eta: float
    codewords: tuple
    cosets: tuple

    @property
    def n(self) -> int:
        return 2**self.ell

    @property
    def n_cosets(self) -> int:
        return len(self.cosets)


def _codewords(n: int) -> tuple:
    out = []
    for j in range(n):
        bits = 0
        for i in range(n):
            if bin(i & j).count("1") % 2:
                bits |= 1 << i
        out.append(bits)
    return tuple(out)


def build_kv_instance(ell: int, eta: float) -> KvInstance:
    if ell not in SUPPORTED_ELL:
        raise DomainError(f"supported sizes are ell in {SUPPORTED_ELL}, got {ell}")
    if not 0.0 <= eta <= 0.5:
        raise DomainError(f"noise rate must lie in [0, 1/2], got {eta}")
    n = 2**ell
    codes = _codewords(n)
    strings = np.arange(2**n, dtype=np.int64)
    reps = strings.copy()
    for h in codes:
        np.minimum(reps, strings ^ h, out=reps)
    cosets = []
    for rep in np.unique(reps):
        members = tuple(int(s) for s in np.sort(strings[reps == rep]))
        cosets.append(members)
    return KvInstance(ell=ell, eta=float(eta), codewords=codes, cosets=tuple(cosets))


def measurement_vector(inst: KvInstance, element: int) -> np.ndarray:
    """Sign vector (-1)^element_i / sqrt(n) over the n positions."""
    n = inst.n
    signs = 1.0 - 2.0 * ((element >> np.arange(n)) & 1)
    return signs / math.sqrt(n)


def coset_basis(inst: KvInstance, coset_index: int) -> np.ndarray:
    """Rows are the orthonormal measurement vectors of one coset."""
    return np.stack([measurement_vector(inst, t) for t in inst.cosets[coset_index]])


def kv_win_prob_formula(n: int, eta: float) -> float:
    """Canonical-strategy winning probability in closed form."""
    return (1.0 - 2.0 * eta) ** 2 + 4.0 * eta * (1.0 - eta) / n


def kv_quantum_win_prob(
    inst: KvInstance,
    mode: str = "exact",
    seed: int | None = None,
    trials: int = 1_000_000,
) -> float:
    """Winning probability of the canonical strategy.

    Exact mode sums the win probability (1 - 2|z|/n)^2 over all 2^n noise
    strings with their Bernoulli weights; Monte-Carlo mode samples the game.
    """
    n = inst.n
    eta = inst.eta
    if mode == "exact":
        z = np.arange(2**n, dtype=np.uint32)
        w = np.bitwise_count(z).astype(float)
        weights = eta**w * (1.0 - eta) ** (n - w)
        return float(np.sum(weights * (1.0 - 2.0 * w / n) ** 2))
    if mode == "monte_carlo":
        rng = rng_from(seed)
        w = rng.binomial(n, eta, size=trials)
        win = rng.random(trials) < (1.0 - 2.0 * w / n) ** 2
        return float(np.mean(win))
    raise ValueError("mode must be exact or monte_carlo")


def kv_default_eta(n: int) -> float:
    """Noise rate 1/2 - 1/ln(n) used for the asymptotic separation."""
    if n < 8:
        raise DomainError("the default noise rate needs ln(n) > 2")
    return 0.5 - 1.0 / math.log(n)


def kv_classical_cap(n: int, eta: float | None = None) -> float:
    """Upper bound n^(-eta/(1-eta)) on the classical winning probability.

    With the default noise rate this equals n^(-1 + 4/(2 + ln n)), which is
    at most e^4/n.
    """
    if n < 2:
        raise DomainError("the cap needs n >= 2")
    if eta is None:
        eta = kv_default_eta(n)
    if not 0.0 <= eta <= 0.5:
        raise DomainError(f"noise rate must lie in [0, 1/2], got {eta}")
    return float(n ** (-eta / (1.0 - eta)))


def kv_functional(ell: int, eta: float) -> BellFunctional:
    """The game as a Bell functional over coset inputs and element outputs.

    Weight of (x, y, a, b) is the chance the referee draws a question in
    coset pair (x, y) with noise string exactly coset_x[a] XOR coset_y[b].
    The recorded bound is the analytic classical cap.
    """
    if ell > FUNCTIONAL_ELL_CAP:
        raise CapacityError(
            f"functional table for ell={ell} needs {(2**2**ell // 2**ell) ** 2 * 4**ell}"
            " entries; sizes above ell=3 are not materialized"
        )
    inst = build_kv_instance(ell, eta)
    n = inst.n
    members = np.asarray(inst.cosets, dtype=np.int64)  # (cosets, n)
    diff = members[:, None, :, None] ^ members[None, :, None, :]
    w = np.bitwise_count(diff.astype(np.uint32)).astype(float)
    coeffs = (n / 2.0**n) * inst.eta**w * (1.0 - inst.eta) ** (n - w)
    scen = Scenario(
        (inst.n_cosets, inst.n_cosets),
        (n, n),
    )
    return BellFunctional(
        scenario=scen,
        coeffs=coeffs,
        local_bound=kv_classical_cap(n, eta),
        kind="game",
    )
