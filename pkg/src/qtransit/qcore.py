"""Finite-dimensional state containers and the linear algebra they need.

Conventions used throughout the package:

* subsystem 0 is the leftmost tensor factor, indices flatten row-major,
  so basis label |a b c> maps to index (a * d_B + b) * d_C + c;
* kets are unit vectors (tolerance 1e-10), density operators are Hermitian
  (1e-10), trace one (1e-10) and PSD up to an eigenvalue floor of -1e-9;
* containers are immutable after construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .rng import rng_from

__all__ = [
    "Layout",
    "Ket",
    "DensityOp",
    "tensor",
    "tensor_power_grouped",
    "partial_trace",
    "partial_transpose",
    "is_ppt",
    "permute_subsystems",
    "haar_random_ket",
    "fidelity",
    "save_state",
    "load_state",
]

HERM_ATOL = 1e-10
TRACE_ATOL = 1e-10
NORM_ATOL = 1e-10
EIG_FLOOR = -1e-9


@dataclass(frozen=True)
class Layout:
    """Ordered subsystem dimensions of a composite space."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise ValueError("layout needs at least one subsystem")
        if any(d < 2 for d in dims):
            raise ValueError(f"subsystem dimensions must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def __len__(self) -> int:
        return len(self.dims)

    def __iter__(self):
        return iter(self.dims)


def as_layout(layout) -> Layout:
    if isinstance(layout, Layout):
        return layout
    if isinstance(layout, int):
        return Layout((layout,))
    return Layout(tuple(layout))


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Ket:
    """Pure state: complex amplitudes in the fixed product basis."""

    amps: np.ndarray
    layout: Layout

    def __post_init__(self):
        layout = as_layout(self.layout)
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if amps.shape != (layout.dim,):
            raise ValueError(
                f"amplitude count {amps.shape[0]} does not match layout dim {layout.dim}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"ket norm {norm!r} deviates from 1 beyond {NORM_ATOL}")
        object.__setattr__(self, "amps", _freeze(amps))
        object.__setattr__(self, "layout", layout)

    @property
    def dim(self) -> int:
        return self.layout.dim

    def density(self) -> "DensityOp":
        """Rank-one projector onto this ket."""
        return DensityOp(np.outer(self.amps, self.amps.conj()), self.layout)

    def overlap(self, other: "Ket") -> complex:
        return complex(np.vdot(self.amps, other.amps))


@dataclass(frozen=True)
class DensityOp:
    """Mixed state: Hermitian, PSD (within tolerance), unit trace."""

    mat: np.ndarray
    layout: Layout

    def __post_init__(self):
        layout = as_layout(self.layout)
        mat = np.asarray(self.mat, dtype=complex)
        d = layout.dim
        if mat.shape != (d, d):
            raise ValueError(f"matrix shape {mat.shape} does not match layout dim {d}")
        herm_err = np.abs(mat - mat.conj().T).max()
        if herm_err > HERM_ATOL:
            raise ValueError(f"matrix is not Hermitian (max asymmetry {herm_err:.3e})")
        tr = np.trace(mat).real
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"trace {tr!r} deviates from 1 beyond {TRACE_ATOL}")
        lo = np.linalg.eigvalsh(mat)[0]
        if lo < EIG_FLOOR:
            raise ValueError(f"negative eigenvalue {lo:.3e} below floor {EIG_FLOOR}")
        object.__setattr__(self, "mat", _freeze(mat))
        object.__setattr__(self, "layout", layout)

    @property
    def dim(self) -> int:
        return self.layout.dim

    def eigvals(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.mat)

    def purity(self) -> float:
        return float(np.vdot(self.mat, self.mat).real)

    @classmethod
    def from_noisy(cls, mat, layout, floor: float = 1e-7) -> "DensityOp":
        """Project a solver output onto the exact state manifold.

        Hermitizes, clips eigenvalues in [-floor, 0) to zero and renormalizes
        the trace. Raises if the input is further from a state than `floor`.
        """
        layout = as_layout(layout)
        mat = np.asarray(mat, dtype=complex)
        herm_err = np.abs(mat - mat.conj().T).max()
        if herm_err > floor:
            raise ValueError(f"not Hermitian within {floor}: {herm_err:.3e}")
        mat = (mat + mat.conj().T) / 2
        w, v = np.linalg.eigh(mat)
        if w[0] < -floor:
            raise ValueError(f"eigenvalue {w[0]:.3e} below -{floor}")
        w = np.clip(w, 0.0, None)
        tr = w.sum()
        if abs(tr - 1.0) > floor:
            raise ValueError(f"trace {tr!r} off by more than {floor}")
        mat = (v * (w / tr)) @ v.conj().T
        return cls((mat + mat.conj().T) / 2, layout)


def _operand(op):
    """Matrix, layout and kind of a Ket or DensityOp."""
    if isinstance(op, Ket):
        return op.amps, op.layout, "ket"
    if isinstance(op, DensityOp):
        return op.mat, op.layout, "density"
    raise TypeError(f"expected Ket or DensityOp, got {type(op).__name__}")


def tensor(*factors):
    """Kronecker product of kets or of density operators (no mixing)."""
    if len(factors) == 1 and isinstance(factors[0], (list, tuple)):
        factors = tuple(factors[0])
    if not factors:
        raise ValueError("tensor() needs at least one factor")
    kinds = {_operand(f)[2] for f in factors}
    if len(kinds) != 1:
        raise TypeError("cannot tensor a Ket with a DensityOp; lift with .density() first")
    kind = kinds.pop()
    data = factors[0].amps if kind == "ket" else factors[0].mat
    dims = list(factors[0].layout.dims)
    for f in factors[1:]:
        nxt = f.amps if kind == "ket" else f.mat
        data = np.kron(data, nxt)
        dims.extend(f.layout.dims)
    if kind == "ket":
        return Ket(data, Layout(tuple(dims)))
    return DensityOp(data, Layout(tuple(dims)))


def permute_subsystems(op, perm):
    """Reorder tensor factors: new factor i is old factor perm[i]."""
    data, layout, kind = _operand(op)
    n = len(layout)
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"perm {perm} is not a permutation of range({n})")
    dims = layout.dims
    new_dims = tuple(dims[p] for p in perm)
    if kind == "ket":
        amps = data.reshape(dims).transpose(perm).reshape(-1)
        return Ket(amps, Layout(new_dims))
    axes = perm + tuple(n + p for p in perm)
    mat = data.reshape(dims + dims).transpose(axes).reshape(layout.dim, layout.dim)
    return DensityOp(mat, Layout(new_dims))


def group_subsystems(op, groups):
    """Merge consecutive-index groups of factors into single subsystems.

    `groups` must cover 0..n-1 in order, e.g. [(0, 1), (2,), (3, 4)].
    The matrix is untouched; only the layout is coarsened.
    """
    data, layout, kind = _operand(op)
    flat = [i for g in groups for i in g]
    if flat != list(range(len(layout))):
        raise ValueError("groups must partition the subsystems in order")
    dims = tuple(int(np.prod([layout.dims[i] for i in g])) for g in groups)
    if kind == "ket":
        return Ket(data, Layout(dims))
    return DensityOp(data, Layout(dims))


def tensor_power_grouped(op, k: int):
    """k-th tensor power with copies of each party collected together.

    For a bipartite op on (A, B) the result lives on (A_1..A_k, B_1..B_k)
    with layout [d_A^k, d_B^k], which is the natural arrangement when the
    k copies are treated as one party pair.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    _, layout, _ = _operand(op)
    n = len(layout)
    if k == 1:
        return op
    full = tensor(*([op] * k))
    perm = [c * n + p for p in range(n) for c in range(k)]
    regrouped = permute_subsystems(full, perm)
    groups = [tuple(range(p * k, (p + 1) * k)) for p in range(n)]
    return group_subsystems(regrouped, groups)


def _keep_tuple(keep, n):
    if isinstance(keep, (int, np.integer)):
        keep = (int(keep),)
    keep = tuple(int(i) for i in keep)
    if len(set(keep)) != len(keep) or any(i < 0 or i >= n for i in keep):
        raise ValueError(f"keep indices {keep} invalid for {n} subsystems")
    return tuple(sorted(keep))


def partial_trace(op, keep) -> DensityOp:
    """Trace out everything except `keep` (indices, original order kept)."""
    if isinstance(op, Ket):
        op = op.density()
    mat, layout, _ = _operand(op)
    n = len(layout)
    keep = _keep_tuple(keep, n)
    if keep == tuple(range(n)):
        return op
    dims = layout.dims
    tens = mat.reshape(dims + dims)
    drop = [i for i in range(n) if i not in keep]
    for offset, i in enumerate(drop):
        ax = i - offset
        tens = np.trace(tens, axis1=ax, axis2=ax + (n - offset))
    kept_dims = tuple(dims[i] for i in keep)
    d = int(np.prod(kept_dims))
    return DensityOp(tens.reshape(d, d), Layout(kept_dims))


def partial_transpose(op, subsystems) -> np.ndarray:
    """Transpose the listed factors; returns a plain Hermitian matrix.

    The result is generally not PSD, hence not wrapped in DensityOp.
    """
    if isinstance(op, Ket):
        op = op.density()
    mat, layout, _ = _operand(op)
    n = len(layout)
    subs = _keep_tuple(subsystems, n)
    dims = layout.dims
    tens = mat.reshape(dims + dims)
    axes = list(range(2 * n))
    for i in subs:
        axes[i], axes[n + i] = axes[n + i], axes[i]
    out = tens.transpose(axes).reshape(layout.dim, layout.dim)
    return out


def is_ppt(op, subsystems, tol: float = 1e-9) -> bool:
    """Positive partial transpose test at the given cut."""
    pt = partial_transpose(op, subsystems)
    return bool(np.linalg.eigvalsh(pt)[0] >= -tol)


def haar_random_ket(layout, seed) -> Ket:
    """Haar-distributed pure state: normalized complex Gaussian vector."""
    layout = as_layout(layout)
    rng = rng_from(seed)
    v = rng.normal(size=layout.dim) + 1j * rng.normal(size=layout.dim)
    return Ket(v / np.linalg.norm(v), layout)


def _sqrtm_psd(mat: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(mat)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity, squared convention: F(rho, |psi><psi|) = <psi|rho|psi>."""
    if isinstance(rho, Ket):
        rho = rho.density()
    if isinstance(sigma, Ket):
        sigma = sigma.density()
    a, la, _ = _operand(rho)
    b, lb, _ = _operand(sigma)
    if la.dim != lb.dim:
        raise ValueError("states live on different total dimensions")
    # a pure operand reduces F to an expectation value, and the general
    # matrix-square-root route only reaches ~1e-8 on rank-deficient inputs
    for x, y in ((a, b), (b, a)):
        if abs(np.trace(x @ x).real - 1.0) < 1e-12:
            w, v = np.linalg.eigh(x)
            psi = v[:, -1]
            return float(min(np.real(psi.conj() @ y @ psi), 1.0 + 1e-12))
    s = _sqrtm_psd(a)
    w = np.linalg.eigvalsh(s @ b @ s)
    val = np.sqrt(np.clip(w, 0.0, None)).sum()
    return float(min(val * val, 1.0 + 1e-12))


def save_state(op, path) -> None:
    """Write a Ket or DensityOp as JSON (dims / kind / re / im)."""
    data, layout, kind = _operand(op)
    if kind == "ket":
        re, im = data.real.tolist(), data.imag.tolist()
    else:
        re, im = data.real.tolist(), data.imag.tolist()
    payload = {"dims": list(layout.dims), "kind": kind, "re": re, "im": im}
    with open(path, "w", encoding="utf8") as fh:
        json.dump(payload, fh)


def load_state(path):
    """Inverse of save_state. Kets accept flat or nested amplitude arrays."""
    with open(path, encoding="utf8") as fh:
        payload = json.load(fh)
    kind = payload["kind"]
    layout = Layout(tuple(payload["dims"]))
    arr = np.asarray(payload["re"], dtype=float) + 1j * np.asarray(payload["im"], dtype=float)
    if kind == "ket":
        return Ket(arr.reshape(-1), layout)
    if kind == "density":
        return DensityOp(arr.reshape(layout.dim, layout.dim), layout)
    raise ValueError(f"unknown state kind {kind!r}")
