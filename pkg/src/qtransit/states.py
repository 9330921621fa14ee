"""Factories for the named states and marginal families used across the package.

All families take real parameters on closed intervals. Endpoint values are
accepted (the formulas extend continuously) but are degenerate: product or
pure limits where the interesting structure collapses. StateSpec.degenerate
reports that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .qcore import (
    DensityOp,
    Ket,
    Layout,
    group_subsystems,
    permute_subsystems,
    tensor,
)

__all__ = [
    "StateSpec",
    "w_state",
    "w_marginal",
    "bell_ket",
    "phi_d",
    "rotated_bell_state",
    "sg05_state",
    "sg05_ab_marginal",
    "sg05_ac_marginal",
    "cg04_state",
    "cg04_ab_marginal",
    "cg04_ac_marginal",
    "bv_state",
    "bv_marginal",
    "bv_alternative",
    "isotropic",
    "isotropic_from_weight",
    "triangle_state",
    "triangle_marginal",
    "triangle_alternative",
    "maximally_mixed",
    "make_state",
]


def _check_range(name, value, lo, hi):
    if not (lo <= value <= hi):
        raise ValueError(f"{name}={value!r} outside [{lo}, {hi}]")
    return float(value)


def w_state(n: int) -> Ket:
    """n-qubit W state: uniform superposition of single-excitation basis kets."""
    n = int(n)
    if n < 2:
        raise ValueError("W state needs at least 2 qubits")
    amps = np.zeros(2**n, dtype=complex)
    for j in range(n):
        amps[1 << (n - 1 - j)] = 1.0
    amps /= math.sqrt(n)
    return Ket(amps, Layout((2,) * n))


def w_marginal(n: int) -> DensityOp:
    """Two-qubit reduced state of the n-qubit W state.

    Equals (2/n) |psi+><psi+| + ((n-2)/n) |00><00| for every pair of qubits.
    """
    n = int(n)
    if n < 2:
        raise ValueError("n must be >= 2")
    psi = bell_ket("psi+")
    mat = (2.0 / n) * psi.density().mat + ((n - 2.0) / n) * _proj2(0, 0)
    return DensityOp(mat, Layout((2, 2)))


def _proj2(a: int, b: int) -> np.ndarray:
    m = np.zeros((4, 4), dtype=complex)
    m[2 * a + b, 2 * a + b] = 1.0
    return m


_BELL_AMPS = {
    "phi+": np.array([1, 0, 0, 1]) / math.sqrt(2),
    "phi-": np.array([1, 0, 0, -1]) / math.sqrt(2),
    "psi+": np.array([0, 1, 1, 0]) / math.sqrt(2),
    "psi-": np.array([0, 1, -1, 0]) / math.sqrt(2),
}


def bell_ket(which: str = "psi+") -> Ket:
    try:
        amps = _BELL_AMPS[which]
    except KeyError:
        raise ValueError(f"unknown Bell ket {which!r}; pick from {sorted(_BELL_AMPS)}")
    return Ket(amps.astype(complex), Layout((2, 2)))


def phi_d(d: int) -> Ket:
    """Maximally entangled ket on d x d: sum_i |ii> / sqrt(d)."""
    d = int(d)
    if d < 2:
        raise ValueError("d must be >= 2")
    amps = np.zeros(d * d, dtype=complex)
    amps[:: d + 1] = 1.0 / math.sqrt(d)
    return Ket(amps, Layout((d, d)))


def rotated_bell_state() -> Ket:
    """Two-qubit pure state whose z/x product measurements sit on the CHSH ridge.

    cos(pi/8)(|00> - |11>)/sqrt(2) + sin(pi/8)(|01> + |10>)/sqrt(2); measuring
    sigma_z and sigma_x on both sides yields all four correlators 1/sqrt(2) in
    the CHSH pattern, so this single state certifies the 2*sqrt(2) maximum
    without rotated measurement bases.
    """
    c, s = math.cos(math.pi / 8), math.sin(math.pi / 8)
    amps = np.array([c, s, s, -c], dtype=complex) / math.sqrt(2)
    return Ket(amps, Layout((2, 2)))


def sg05_state(alpha: float) -> Ket:
    """Qubit (x) qutrit (x) qubit family with two maximally entangled marginals.

    cos(a)(|021> + |120>)/sqrt(2) + sin(a)(|000> + |111>)/sqrt(2), a in [0, pi/2].
    """
    a = _check_range("alpha", alpha, 0.0, math.pi / 2)
    amps = np.zeros(12, dtype=complex)  # layout (2, 3, 2): index = 6i + 2j + k
    c, s = math.cos(a) / math.sqrt(2), math.sin(a) / math.sqrt(2)
    amps[0 * 6 + 2 * 2 + 1] = c  # |021>
    amps[1 * 6 + 2 * 2 + 0] = c  # |120>
    amps[0] = s                  # |000>
    amps[1 * 6 + 2 * 1 + 1] = s  # |111>
    return Ket(amps, Layout((2, 3, 2)))


def sg05_ab_marginal(alpha: float) -> DensityOp:
    """Qubit-qutrit reduced state of sg05_state; equal for the AB and CB pairs."""
    a = _check_range("alpha", alpha, 0.0, math.pi / 2)
    c, s = math.cos(a), math.sin(a)
    v1 = np.zeros(6, dtype=complex)
    v1[0] = s          # |00>
    v1[3 * 1 + 2] = c  # |12>
    v2 = np.zeros(6, dtype=complex)
    v2[3 * 1 + 1] = s  # |11>
    v2[2] = c          # |02>
    mat = 0.5 * (np.outer(v1, v1.conj()) + np.outer(v2, v2.conj()))
    return DensityOp(mat, Layout((2, 3)))


def sg05_ac_marginal(alpha: float) -> DensityOp:
    """Two-qubit reduced state across the outer pair of sg05_state.

    cos^2(a) |psi+><psi+| + sin^2(a)/2 (|00><00| + |11><11|). Violates CHSH
    iff cos^2(a) > 1/sqrt(2) (Horodecki criterion).
    """
    a = _check_range("alpha", alpha, 0.0, math.pi / 2)
    c2, s2 = math.cos(a) ** 2, math.sin(a) ** 2
    mat = c2 * bell_ket("psi+").density().mat + (s2 / 2) * (_proj2(0, 0) + _proj2(1, 1))
    return DensityOp(mat, Layout((2, 2)))


def cg04_state(mu: float) -> Ket:
    """Three-qubit family mu|000> + sqrt((1-mu^2)/2) (|110> + |011>), mu in [0, 1]."""
    m = _check_range("mu", mu, 0.0, 1.0)
    r = math.sqrt((1.0 - m * m) / 2.0)
    amps = np.zeros(8, dtype=complex)
    amps[0] = m
    amps[0b110] = r
    amps[0b011] = r
    return Ket(amps, Layout((2, 2, 2)))


def cg04_ab_marginal(mu: float) -> DensityOp:
    """Reduced state of cg04_state, equal for the AB and CB pairs.

    |phi(mu)><phi(mu)| + (1-mu^2)/2 |01><01| with the unnormalized
    phi(mu) = mu|00> + sqrt((1-mu^2)/2)|11>.
    """
    m = _check_range("mu", mu, 0.0, 1.0)
    r = math.sqrt((1.0 - m * m) / 2.0)
    v = np.zeros(4, dtype=complex)
    v[0] = m
    v[3] = r
    mat = np.outer(v, v.conj()) + ((1.0 - m * m) / 2.0) * _proj2(0, 1)
    return DensityOp(mat, Layout((2, 2)))


def cg04_ac_marginal(mu: float) -> DensityOp:
    """Outer-pair reduced state (1-mu^2)|psi+><psi+| + mu^2 |00><00|.

    At mu = 1/sqrt(3) this coincides with w_marginal(3).
    """
    m = _check_range("mu", mu, 0.0, 1.0)
    mat = (1.0 - m * m) * bell_ket("psi+").density().mat + m * m * _proj2(0, 0)
    return DensityOp(mat, Layout((2, 2)))


def _bv_weights(theta: float) -> tuple[float, float]:
    t = _check_range("theta", theta, 0.0, math.pi / 2)
    s2 = math.sin(t) ** 2
    b2 = s2 / (2.0 * s2 + 1.0)
    a2 = (1.0 - s2) / (2.0 * s2 + 1.0)
    return a2, b2


def bv_state(theta: float) -> Ket:
    """Three-qutrit family a|000> + b(|012> + |201> + |120>), theta in [0, pi/2].

    The weights solve a^2 + 3 b^2 = 1 with b^2 = sin^2(t) / (2 sin^2(t) + 1);
    all three bipartite reduced states are identical by cyclic symmetry.
    """
    a2, b2 = _bv_weights(theta)
    a, b = math.sqrt(a2), math.sqrt(b2)
    amps = np.zeros(27, dtype=complex)
    amps[0] = a
    for (i, j, k) in [(0, 1, 2), (2, 0, 1), (1, 2, 0)]:
        amps[9 * i + 3 * j + k] = b
    return Ket(amps, Layout((3, 3, 3)))


def bv_marginal(theta: float) -> DensityOp:
    """Common two-qutrit reduced state of bv_state.

    (1 - 2 b^2)|psi_t><psi_t| + b^2 (|01><01| + |20><20|) with
    psi_t = cos(t)|00> + sin(t)|12>.
    """
    a2, b2 = _bv_weights(theta)
    t = _check_range("theta", theta, 0.0, math.pi / 2)
    v = np.zeros(9, dtype=complex)
    v[0] = math.cos(t)
    v[3 * 1 + 2] = math.sin(t)
    mat = (1.0 - 2.0 * b2) * np.outer(v, v.conj())
    mat[1, 1] += b2      # |01>
    mat[6, 6] += b2      # |20>
    return DensityOp(mat, Layout((3, 3)))


def bv_alternative(theta: float) -> DensityOp:
    """Mixed three-qutrit state reproducing the AB and BC marginals of bv_state
    while its own AC reduced state is diagonal, hence separable.

    |psi><psi| + b^2 |201><201| with the unnormalized
    psi = a|000> + b(|012> + |120>).
    """
    a2, b2 = _bv_weights(theta)
    a, b = math.sqrt(a2), math.sqrt(b2)
    v = np.zeros(27, dtype=complex)
    v[0] = a
    v[9 * 0 + 3 * 1 + 2] = b
    v[9 * 1 + 3 * 2 + 0] = b
    mat = np.outer(v, v.conj())
    idx = 9 * 2 + 3 * 0 + 1
    mat[idx, idx] += b2
    return DensityOp(mat, Layout((3, 3, 3)))


def isotropic(d: int, F: float) -> DensityOp:
    """Isotropic state on d x d with maximally entangled fraction F.

    F |phi_d><phi_d| + (1 - F) (I - |phi_d><phi_d|) / (d^2 - 1), F in [0, 1].
    """
    d = int(d)
    if d < 2:
        raise ValueError("d must be >= 2")
    F = _check_range("F", F, 0.0, 1.0)
    proj = phi_d(d).density().mat
    rest = (np.eye(d * d) - proj) / (d * d - 1)
    return DensityOp(F * proj + (1.0 - F) * rest, Layout((d, d)))


def isotropic_from_weight(d: int, p: float) -> DensityOp:
    """Isotropic state in the white-noise form p|phi_d><phi_d| + (1-p) I/d^2.

    Same family as isotropic(); the entangled fraction is F = p + (1-p)/d^2.
    """
    d = int(d)
    p = _check_range("p", p, 0.0, 1.0)
    F = p + (1.0 - p) / (d * d)
    return isotropic(d, F)


def maximally_mixed(layout) -> DensityOp:
    lay = layout if isinstance(layout, Layout) else Layout(tuple(np.atleast_1d(layout)))
    d = lay.dim
    return DensityOp(np.eye(d, dtype=complex) / d, lay)


def _half() -> DensityOp:
    return DensityOp(np.eye(2, dtype=complex) / 2, Layout((2,)))


def triangle_state() -> DensityOp:
    """Three parties of two qubits each, joined pairwise by rotated Bell pairs.

    Party X holds qubits (X1, X2); the pairs (A1,B2), (B1,C2), (A2,C1) each
    carry rotated_bell_state(). Returned with layout [4, 4, 4] for (A, B, C).
    """
    pair = rotated_bell_state().density()
    full = tensor(pair, pair, pair)  # order (A1,B2, B1,C2, A2,C1)
    ordered = permute_subsystems(full, (0, 4, 2, 1, 5, 3))  # (A1,A2,B1,B2,C1,C2)
    return group_subsystems(ordered, [(0, 1), (2, 3), (4, 5)])


def triangle_marginal(pair: str = "AB") -> DensityOp:
    """Two-party reduced state of triangle_state, layout [4, 4].

    AB and BC carry the Bell pair between the first qubit of one party and
    the second qubit of the other; AC carries it between A2 and C1.
    """
    bell = rotated_bell_state().density()
    if pair in ("AB", "BC"):
        # order (i1, j2, i2, j1) -> (i1, i2, j1, j2)
        full = tensor(bell, _half(), _half())
        ordered = permute_subsystems(full, (0, 2, 3, 1))
    elif pair in ("AC", "CA"):
        # order (A2, C1, A1, C2) -> (A1, A2, C1, C2)
        full = tensor(bell, _half(), _half())
        ordered = permute_subsystems(full, (2, 0, 1, 3))
    else:
        raise ValueError(f"pair must be AB, BC or AC, got {pair!r}")
    return group_subsystems(ordered, [(0, 1), (2, 3)])


def triangle_alternative() -> DensityOp:
    """Alternative global state for the triangle marginals with separable AC cut.

    Keeps the (A1,B2) and (B1,C2) Bell pairs but replaces the (A2,C1) pair
    with uncorrelated noise, so tracing out B leaves I/16 across AC.
    """
    bell = rotated_bell_state().density()
    full = tensor(bell, bell, _half(), _half())  # (A1,B2, B1,C2, A2, C1)
    ordered = permute_subsystems(full, (0, 4, 2, 1, 5, 3))
    return group_subsystems(ordered, [(0, 1), (2, 3), (4, 5)])


_FAMILIES = {
    "w": (w_state, ("n",)),
    "w_marginal": (w_marginal, ("n",)),
    "bell": (bell_ket, ("which",)),
    "phi_d": (phi_d, ("d",)),
    "rotated_bell": (rotated_bell_state, ()),
    "sg05": (sg05_state, ("alpha",)),
    "sg05_ab": (sg05_ab_marginal, ("alpha",)),
    "sg05_ac": (sg05_ac_marginal, ("alpha",)),
    "cg04": (cg04_state, ("mu",)),
    "cg04_ab": (cg04_ab_marginal, ("mu",)),
    "cg04_ac": (cg04_ac_marginal, ("mu",)),
    "bv": (bv_state, ("theta",)),
    "bv_marginal": (bv_marginal, ("theta",)),
    "bv_alternative": (bv_alternative, ("theta",)),
    "isotropic": (isotropic, ("d", "F")),
    "isotropic_weight": (isotropic_from_weight, ("d", "p")),
    "triangle": (triangle_state, ()),
    "triangle_marginal": (triangle_marginal, ("pair",)),
    "triangle_alternative": (triangle_alternative, ()),
}

_ENDPOINTS = {
    "sg05": ("alpha", 0.0, math.pi / 2),
    "sg05_ab": ("alpha", 0.0, math.pi / 2),
    "sg05_ac": ("alpha", 0.0, math.pi / 2),
    "cg04": ("mu", 0.0, 1.0),
    "cg04_ab": ("mu", 0.0, 1.0),
    "cg04_ac": ("mu", 0.0, 1.0),
    "bv": ("theta", 0.0, math.pi / 2),
    "bv_marginal": ("theta", 0.0, math.pi / 2),
    "bv_alternative": ("theta", 0.0, math.pi / 2),
}


@dataclass(frozen=True)
class StateSpec:
    """Named family plus parameters; the CLI's `state make` currency."""

    name: str
    params: dict = field(default_factory=dict)

    def build(self):
        if self.name not in _FAMILIES:
            raise ValueError(f"unknown family {self.name!r}; pick from {sorted(_FAMILIES)}")
        fn, keys = _FAMILIES[self.name]
        missing = [k for k in keys if k not in self.params]
        if missing:
            raise ValueError(f"family {self.name!r} needs parameters {missing}")
        extra = [k for k in self.params if k not in keys]
        if extra:
            raise ValueError(f"family {self.name!r} does not take {extra}")
        return fn(**{k: self.params[k] for k in keys})

    @property
    def degenerate(self) -> bool:
        """True on closed-interval endpoints where the family collapses."""
        spec = _ENDPOINTS.get(self.name)
        if spec is None:
            return False
        key, lo, hi = spec
        val = float(self.params.get(key, math.nan))
        return val in (lo, hi)


def make_state(name: str, **params):
    return StateSpec(name, params).build()
