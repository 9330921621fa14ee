"""Closed-form certificates: entangled-fraction, copy bounds, steering.

Everything here is arithmetic on top of three ingredients: the fully
entangled fraction of a bipartite state, lower bounds on the nonlocality
fraction of many copies obtained by tensoring into a large maximally
entangled block, and the harmonic-number steering sufficiency threshold.
Bounds are evaluated in log space so large copy counts cannot overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
import scipy.linalg
import scipy.optimize

from .errors import DomainError
from .qcore import DensityOp
from .rng import derive_seed, rng_from

__all__ = [
    "LvParams",
    "fef",
    "lv_lower_bound",
    "min_k_for_violation",
    "kv_maxent_lv_bound",
    "min_n_exceeding_one",
    "harmonic_number",
    "steering_threshold",
    "steering_threshold_exact",
    "is_steerable_by_fef",
    "MaxentBounds",
]

_SQ2 = math.sqrt(2.0)

# Columns: the four maximally entangled vectors whose real combinations
# exhaust all maximally entangled two-qubit states.
_MAGIC = np.array(
    [
        [1, 0, 0, 1],
        [1j, 0, 0, -1j],
        [0, 1j, 1j, 0],
        [0, 1, -1, 0],
    ],
    dtype=complex,
).T / _SQ2


def _check_square_bipartite(rho: DensityOp) -> int:
    dims = rho.layout.dims
    if len(dims) != 2 or dims[0] != dims[1]:
        raise DomainError(f"fully entangled fraction needs a d x d layout, got {dims}")
    return dims[0]


def _overlap_with_unitary(r_flat: np.ndarray, u: np.ndarray, d: int) -> float:
    v = u.reshape(-1)
    return float(np.real(v.conj() @ r_flat @ v)) / d


def _generator_from(x: np.ndarray, d: int) -> np.ndarray:
    a = np.zeros((d, d), dtype=complex)
    il = np.tril_indices(d, k=-1)
    k = len(il[0])
    a[il] = x[:k] + 1j * x[k : 2 * k]
    a -= a.conj().T
    a[np.diag_indices(d)] = 1j * x[2 * k :]
    return a


def _fef_optimize(rho: DensityOp, d: int, seed, restarts: int) -> float:
    """Best overlap with (U x I)|Phi_d> found from seeded restarts."""
    r_flat = rho.mat
    n_params = d * d

    def cost(x):
        u = scipy.linalg.expm(_generator_from(x, d))
        return -_overlap_with_unitary(r_flat, u, d)

    best = -math.inf
    for r in range(restarts):
        if r == 0:
            x0 = np.zeros(n_params)
        else:
            rng = rng_from(derive_seed(seed, r))
            x0 = rng.normal(scale=1.0, size=n_params)
        res = scipy.optimize.minimize(cost, x0, method="Powell", options={"maxiter": 400})
        best = max(best, -float(res.fun))
    return best


def fef(
    rho: DensityOp,
    seed: int | None = None,
    restarts: int = 50,
    method: str = "auto",
) -> float:
    """Fully entangled fraction: best overlap with a maximally entangled state.

    Two-qubit states get the exact value (largest eigenvalue of the real part
    in the magic basis). Larger dimensions are optimized from seeded restarts
    and the result is only a lower bound on the true fraction.
    """
    d = _check_square_bipartite(rho)
    if method not in ("auto", "exact", "optimize"):
        raise ValueError("method must be auto, exact, or optimize")
    if method == "exact" and d != 2:
        raise DomainError("the closed form exists only for two qubits")
    if method in ("auto", "exact") and d == 2:
        tilde = _MAGIC.conj().T @ rho.mat @ _MAGIC
        return float(np.linalg.eigvalsh(tilde.real).max())
    return _fef_optimize(rho, d, seed, restarts)


@dataclass(frozen=True)
class LvParams:
    """Inputs for the k-copy nonlocality-fraction bounds."""

    F: float
    d: int
    k: int
    variant: str = "tight"

    def __post_init__(self):
        if not 0.0 <= self.F <= 1.0:
            raise DomainError(f"entangled fraction must lie in [0, 1], got {self.F}")
        if self.d < 2:
            raise DomainError("local dimension must be at least 2")
        if self.k < 1:
            raise DomainError("copy count must be at least 1")
        if self.variant not in ("loose", "tight"):
            raise DomainError("variant must be loose or tight")


def _log_lv(p: LvParams) -> float | None:
    """log of the bound, or None when the derivation's noise rate is invalid."""
    ln_n = p.k * math.log(p.d)
    if ln_n < 2.0:
        return None
    if p.F == 0.0:
        return -math.inf
    log_f_term = p.k * math.log(p.F)
    if p.variant == "loose":
        return math.log(4.0) - 4.0 + log_f_term + ln_n - 2.0 * math.log(ln_n)
    exponent = ln_n * (1.0 - 4.0 / (2.0 + ln_n))
    return math.log(4.0) + log_f_term + exponent - 2.0 * math.log(ln_n)


def lv_lower_bound(p: LvParams) -> float:
    """Lower bound on the nonlocality fraction of k copies; >1 means Bell
    violation. Returns 0 when the copy count is too small for the underlying
    noise rate to be valid (k ln d < 2)."""
    log_val = _log_lv(p)
    if log_val is None:
        return 0.0
    try:
        return math.exp(log_val)
    except OverflowError:
        return math.inf


def min_k_for_violation(F: float, d: int, variant: str = "tight") -> int | None:
    """Smallest copy count whose bound exceeds one; None when F*d <= 1."""
    probe = LvParams(F=F, d=d, k=1, variant=variant)  # validates inputs
    if F * d <= 1.0:
        return None
    a = math.log(F * d)

    def exceeds(k: int) -> bool:
        log_val = _log_lv(LvParams(F=F, d=d, k=k, variant=variant))
        return log_val is not None and log_val > 0.0

    # below 2/ln(Fd) the bound can dip, so scan that region linearly
    scan_cap = min(200_000, max(1000, int(4.0 / a) + 10))
    for k in range(1, scan_cap + 1):
        if exceeds(k):
            return k
    lo, hi = scan_cap, 2 * scan_cap
    while not exceeds(hi):
        lo, hi = hi, 2 * hi
        if hi > 2**60:
            raise DomainError(f"no violation threshold below 2^60 for {probe}")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if exceeds(mid):
            hi = mid
        else:
            lo = mid
    return hi


class MaxentBounds(NamedTuple):
    tight: float
    loose: float


def kv_maxent_lv_bound(n: int) -> MaxentBounds:
    """Both nonlocality-fraction bounds for the n-dimensional maximally
    entangled state: 4 n^(1-4/(2+ln n))/(ln n)^2 and its weaker e^4 form.
    Zero below n = 8, where the game's noise rate would be negative."""
    if n < 2:
        raise DomainError("bounds need n >= 2")
    ln_n = math.log(n)
    if ln_n < 2.0:
        return MaxentBounds(0.0, 0.0)
    tight = 4.0 * math.exp(ln_n * (1.0 - 4.0 / (2.0 + ln_n))) / ln_n**2
    loose = 4.0 * n / (ln_n**2 * math.exp(4.0))
    return MaxentBounds(tight, loose)


def min_n_exceeding_one(variant: str = "tight") -> int:
    if variant not in ("tight", "loose"):
        raise DomainError("variant must be loose or tight")
    for n in range(2, 100_000):
        bounds = kv_maxent_lv_bound(n)
        value = bounds.tight if variant == "tight" else bounds.loose
        if value > 1.0:
            return n
    raise DomainError("no threshold found below 100000")


def harmonic_number(d: int):
    """H_d, exact up to d = 64 and floating point beyond."""
    if d < 1:
        raise DomainError("harmonic numbers need d >= 1")
    if d <= 64:
        return sum(Fraction(1, j) for j in range(1, d + 1))
    return float(sum(1.0 / j for j in range(1, d + 1)))


def steering_threshold_exact(d: int) -> Fraction:
    if d > 64:
        raise DomainError("exact threshold kept rational only up to d = 64")
    h = harmonic_number(d)
    return Fraction(d + 1, d * d) * h - Fraction(1, d)


def steering_threshold(d: int) -> float:
    """Entangled-fraction level above which a d x d state must be steerable."""
    if d < 2:
        raise DomainError("steering threshold needs d >= 2")
    if d <= 64:
        return float(steering_threshold_exact(d))
    return (d + 1) / d**2 * harmonic_number(d) - 1.0 / d


def is_steerable_by_fef(rho: DensityOp, seed: int | None = None) -> bool:
    """Sufficiency check only: a False says the criterion is silent."""
    d = _check_square_bipartite(rho)
    return fef(rho, seed=seed) > steering_threshold(d)
