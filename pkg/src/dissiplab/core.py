"""Tensor algebra over multi-site finite-dimensional quantum systems.

Dense complex operators tagged with a per-site dimension list, density
matrices with explicit validity tolerances, embedding of local operators
into the full lattice, partial traces, and distance measures.

Site ordering convention: sites are ordered as given in ``SiteSystem.dims``
and the basis index of a configuration ``(c_0, ..., c_{n-1})`` is the
mixed-radix integer ``sum_i c_i * prod(dims[i+1:])``.  This matches the
ordering produced by chained ``numpy.kron`` calls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_FLOOR = -1e-9
UNITARITY_TOL = 1e-10


class DimensionError(ValueError):
    """Operator/system dimension mismatch or invalid site index."""


def _as_complex_matrix(matrix) -> np.ndarray:
    mat = np.asarray(matrix, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {mat.shape}")
    return mat


@dataclass(frozen=True)
class SiteSystem:
    """A lattice of sites with local dimensions ``dims`` (each >= 2)."""

    dims: tuple[int, ...]

    def __init__(self, dims: Iterable[int]):
        dims = tuple(int(d) for d in dims)
        if not dims:
            raise DimensionError("a system needs at least one site")
        if any(d < 2 for d in dims):
            raise DimensionError(f"every local dimension must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def n_sites(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def strides(self) -> tuple[int, ...]:
        out, acc = [], 1
        for d in reversed(self.dims):
            out.append(acc)
            acc *= d
        return tuple(reversed(out))

    def index_of(self, config: Sequence[int]) -> int:
        """Mixed-radix basis index of a site configuration."""
        if len(config) != self.n_sites:
            raise DimensionError("configuration length does not match site count")
        return int(sum(c * s for c, s in zip(config, self.strides())))

    def config_of(self, index: int) -> tuple[int, ...]:
        out = []
        for s, d in zip(self.strides(), self.dims):
            out.append((index // s) % d)
        return tuple(out)


def qubits(n: int) -> SiteSystem:
    return SiteSystem((2,) * n)


@dataclass(frozen=True)
class Operator:
    """Dense complex square matrix acting on a ``SiteSystem``."""

    matrix: np.ndarray
    system: SiteSystem

    def __init__(self, matrix, system: SiteSystem):
        mat = _as_complex_matrix(matrix)
        if mat.shape[0] != system.total_dim:
            raise DimensionError(
                f"matrix dimension {mat.shape[0]} does not match system "
                f"total dimension {system.total_dim}"
            )
        mat = np.ascontiguousarray(mat)
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "system", system)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> "Operator":
        return Operator(self.matrix.conj().T, self.system)

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T)) <= tol)

    def is_unitary(self, tol: float = UNITARITY_TOL) -> bool:
        d = self.dim
        return bool(
            np.max(np.abs(self.matrix.conj().T @ self.matrix - np.eye(d))) <= tol
        )


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive-semidefinite, unit-trace operator.

    Hermiticity is checked to 1e-10 (max entry of rho - rho^dag), the trace
    to 1e-10, and the smallest eigenvalue must be >= -1e-9.
    """

    op: Operator

    def __init__(self, op: Operator, _check_spectrum: bool = True):
        mat = op.matrix
        herm_dev = np.max(np.abs(mat - mat.conj().T))
        if herm_dev > HERMITICITY_TOL:
            raise ValueError(f"density matrix not Hermitian: deviation {herm_dev:.3e}")
        tr_dev = abs(np.trace(mat) - 1.0)
        if tr_dev > TRACE_TOL:
            raise ValueError(f"density matrix trace off by {tr_dev:.3e}")
        if _check_spectrum:
            lo = float(np.linalg.eigvalsh(mat)[0])
            if lo < POSITIVITY_FLOOR:
                raise ValueError(f"density matrix has eigenvalue {lo:.3e} < -1e-9")
        object.__setattr__(self, "op", op)

    @classmethod
    def trusted(cls, matrix, system: SiteSystem) -> "DensityMatrix":
        """Build without the eigenvalue check (hot loops; trace and
        Hermiticity are still verified)."""
        return cls(Operator(matrix, system), _check_spectrum=False)

    @property
    def matrix(self) -> np.ndarray:
        return self.op.matrix

    @property
    def system(self) -> SiteSystem:
        return self.op.system

    @property
    def dim(self) -> int:
        return self.op.dim


@dataclass(frozen=True)
class LocalOperator:
    """Operator on a sub-system together with the parent sites it acts on.

    ``support`` is an ordered tuple of distinct site indices; the operator's
    tensor factors follow that order, so permuted and non-adjacent supports
    are meaningful.
    """

    op: Operator
    support: tuple[int, ...]

    def __init__(self, op: Operator, support: Iterable[int]):
        support = tuple(int(s) for s in support)
        if len(set(support)) != len(support):
            raise DimensionError(f"duplicate support index in {support}")
        if op.system.n_sites != len(support):
            raise DimensionError(
                f"operator acts on {op.system.n_sites} sites but support "
                f"names {len(support)}"
            )
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "support", support)

    def validate_against(self, system: SiteSystem) -> None:
        for s, d in zip(self.support, self.op.system.dims):
            if s < 0 or s >= system.n_sites:
                raise DimensionError(f"support site {s} outside system")
            if system.dims[s] != d:
                raise DimensionError(
                    f"local dimension {d} does not match system dimension "
                    f"{system.dims[s]} at site {s}"
                )


def local_operator(matrix, support: Iterable[int], system: SiteSystem) -> LocalOperator:
    """Convenience constructor taking local dimensions from ``system``."""
    support = tuple(int(s) for s in support)
    for s in support:
        if s < 0 or s >= system.n_sites:
            raise DimensionError(f"support site {s} outside system of {system.n_sites} sites")
    sub = SiteSystem(tuple(system.dims[s] for s in support))
    return LocalOperator(Operator(matrix, sub), support)


def tensor_embed(local: LocalOperator, system: SiteSystem) -> Operator:
    """Embed a local operator into ``system``: identity off the support.

    Handles permuted and non-adjacent supports by building the operator with
    support sites leading, then transposing tensor legs back into place.
    """
    local.validate_against(system)
    n = system.n_sites
    support = local.support
    rest = [s for s in range(n) if s not in support]
    rest_dim = int(np.prod([system.dims[s] for s in rest])) if rest else 1

    big = np.kron(local.op.matrix, np.eye(rest_dim, dtype=complex))
    order = list(support) + rest
    if order == list(range(n)):
        return Operator(big, system)

    dims_order = [system.dims[s] for s in order]
    inv = np.argsort(order)
    tens = big.reshape(dims_order + dims_order)
    tens = tens.transpose(list(inv) + [n + i for i in inv])
    return Operator(tens.reshape(system.total_dim, system.total_dim), system)


def join_on_support(local_mat, support: Sequence[int], rest_mat, system: SiteSystem) -> np.ndarray:
    """Tensor a matrix on ``support`` with a matrix on the remaining sites,
    respecting the global site ordering.  ``rest_mat`` is ordered by
    ascending complement site index."""
    n = system.n_sites
    support = list(support)
    rest = [s for s in range(n) if s not in support]
    big = np.kron(np.asarray(local_mat, dtype=complex), np.asarray(rest_mat, dtype=complex))
    order = support + rest
    if order == list(range(n)):
        return big
    dims_order = [system.dims[s] for s in order]
    inv = np.argsort(order)
    tens = big.reshape(dims_order + dims_order)
    tens = tens.transpose(list(inv) + [n + i for i in inv])
    return tens.reshape(system.total_dim, system.total_dim)


def partial_trace_matrix(matrix, dims: Sequence[int], traced_sites: Iterable[int]) -> np.ndarray:
    """Partial trace of a (not necessarily normalized) matrix."""
    dims = list(dims)
    n = len(dims)
    traced = sorted(set(int(s) for s in traced_sites))
    if any(s < 0 or s >= n for s in traced):
        raise DimensionError(f"traced sites {traced} outside system of {n} sites")
    if len(traced) == n:
        raise DimensionError("cannot trace out every site")
    mat = np.asarray(matrix, dtype=complex).reshape(dims + dims)
    # einsum with integer labels: traced sites share row/col labels.
    row = list(range(n))
    col = [n + i for i in range(n)]
    for s in traced:
        col[s] = row[s]
    keep = [s for s in range(n) if s not in traced]
    out = [row[s] for s in keep] + [col[s] for s in keep]
    res = np.einsum(mat, row + col, out)
    kept_dim = int(np.prod([dims[s] for s in keep]))
    return res.reshape(kept_dim, kept_dim)


def partial_trace(rho: DensityMatrix, traced_sites: Iterable[int]) -> DensityMatrix:
    """Reduced density matrix on the sites not listed in ``traced_sites``."""
    dims = rho.system.dims
    traced = sorted(set(int(s) for s in traced_sites))
    red = partial_trace_matrix(rho.matrix, dims, traced)
    keep = [s for s in range(len(dims)) if s not in traced]
    sub = SiteSystem(tuple(dims[s] for s in keep))
    red = 0.5 * (red + red.conj().T)
    return DensityMatrix.trusted(red, sub)


def overlap(rho: DensityMatrix, proj: Operator) -> float:
    """tr[rho * proj] for a Hermitian observable, returned as a real number."""
    if proj.dim != rho.dim:
        raise DimensionError("observable dimension does not match state")
    if not proj.is_hermitian():
        raise ValueError("overlap expects a Hermitian observable")
    val = np.trace(rho.matrix @ proj.matrix)
    return float(val.real)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """Half the sum of singular values of a - b; lies in [0, 1]."""
    if a.dim != b.dim:
        raise DimensionError("states have different dimensions")
    diff = a.matrix - b.matrix
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff))))


def fidelity(a: DensityMatrix, b: DensityMatrix) -> float:
    """Squared Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2."""
    if a.dim != b.dim:
        raise DimensionError("states have different dimensions")
    w, v = np.linalg.eigh(a.matrix)
    w = np.clip(w, 0.0, None)
    sq = (v * np.sqrt(w)) @ v.conj().T
    inner = sq @ b.matrix @ sq
    ev = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return float(np.sum(np.sqrt(ev)) ** 2)


def pure_state_fidelity(ket: np.ndarray, rho: DensityMatrix) -> float:
    """<psi| rho |psi> for a normalized pure target."""
    ket = np.asarray(ket, dtype=complex).reshape(-1)
    return float(np.real(ket.conj() @ rho.matrix @ ket))


# --- Pauli matrices, common gates and states ---------------------------------

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|
SIGMA_PLUS = SIGMA_MINUS.conj().T
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)

_PAULI_BY_NAME = {"I": PAULI_I, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}


def pauli_string(labels: str) -> np.ndarray:
    """Tensor product of single-qubit Paulis, e.g. ``pauli_string("XZZ")``."""
    mats = [_PAULI_BY_NAME[c.upper()] for c in labels]
    return reduce(np.kron, mats)


CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def rz_gate(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def named_gate(name: str, theta: float | None = None) -> np.ndarray:
    """Gate matrix by name: X, Y, Z, H, S, CNOT, CZ, SWAP, RZ(theta)."""
    key = name.strip().upper()
    table = {
        "X": PAULI_X,
        "Y": PAULI_Y,
        "Z": PAULI_Z,
        "H": HADAMARD,
        "S": np.diag([1, 1j]).astype(complex),
        "I": PAULI_I,
        "CNOT": CNOT,
        "CX": CNOT,
        "CZ": CZ,
        "SWAP": SWAP,
    }
    if key == "RZ":
        if theta is None:
            raise ValueError("RZ needs an angle")
        return rz_gate(theta)
    if key not in table:
        raise ValueError(f"unknown gate name {name!r}")
    return table[key].copy()


def basis_ket(system: SiteSystem, config: Sequence[int]) -> np.ndarray:
    vec = np.zeros(system.total_dim, dtype=complex)
    vec[system.index_of(config)] = 1.0
    return vec


def ket_dm(ket: np.ndarray, system: SiteSystem) -> DensityMatrix:
    ket = np.asarray(ket, dtype=complex).reshape(-1)
    ket = ket / np.linalg.norm(ket)
    return DensityMatrix.trusted(np.outer(ket, ket.conj()), system)


def maximally_mixed(system: SiteSystem) -> DensityMatrix:
    d = system.total_dim
    return DensityMatrix.trusted(np.eye(d, dtype=complex) / d, system)


def haar_ket(dim: int, rng: np.random.Generator) -> np.ndarray:
    vec = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return vec / np.linalg.norm(vec)


def random_pure_dm(system: SiteSystem, rng: np.random.Generator) -> DensityMatrix:
    return ket_dm(haar_ket(system.total_dim, rng), system)


def random_dm(system: SiteSystem, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Random mixed state from a normalized Wishart matrix."""
    d = system.total_dim
    k = rank or d
    g = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
    mat = g @ g.conj().T
    mat /= np.trace(mat).real
    mat = 0.5 * (mat + mat.conj().T)
    return DensityMatrix.trusted(mat, system)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a Ginibre matrix."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return q * phases


def apply_gate_to_ket(ket: np.ndarray, system: SiteSystem, support: Sequence[int], gate: np.ndarray) -> np.ndarray:
    """Apply a gate on ``support`` to a state vector, by tensor reshaping."""
    n = system.n_sites
    support = list(support)
    dims = list(system.dims)
    tens = np.asarray(ket, dtype=complex).reshape(dims)
    rest = [s for s in range(n) if s not in support]
    perm = support + rest
    tens = tens.transpose(perm)
    d_sup = int(np.prod([dims[s] for s in support]))
    flat = tens.reshape(d_sup, -1)
    flat = np.asarray(gate, dtype=complex) @ flat
    tens = flat.reshape([dims[s] for s in perm])
    tens = tens.transpose(np.argsort(perm))
    return tens.reshape(-1)
