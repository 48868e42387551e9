"""Lindblad generators, dense superoperators, spectra, steady states,
time evolution, and Kraus-mixture channels.

Vectorization is column-stacking: ``vec(rho) = rho.reshape(-1, order="F")``,
so ``vec(A X B) = (B^T kron A) vec(X)``.  A Lindblad generator with jumps
``L_k`` and optional Hamiltonian ``H`` becomes the matrix

    sum_k conj(L_k) kron L_k
        - 1/2 (I kron L_k^dag L_k) - 1/2 ((L_k^dag L_k)^T kron I)
        - i (I kron H) + i (H^T kron I).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .core import (
    DensityMatrix,
    DimensionError,
    HERMITICITY_TOL,
    Operator,
    SiteSystem,
)

ZERO_EIG_TOL = 1e-9
GENERATOR_TP_TOL = 1e-9
CHANNEL_TP_TOL = 1e-9


class NumericalFailure(RuntimeError):
    """An eigensolve, kernel search or exponential did not produce a
    usable result."""


def vec(matrix: np.ndarray) -> np.ndarray:
    return np.asarray(matrix, dtype=complex).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v, dtype=complex).reshape((dim, dim), order="F")


@dataclass(frozen=True)
class LindbladModel:
    """Optional Hamiltonian plus a list of jump operators on one system."""

    system: SiteSystem
    hamiltonian: Operator | None
    jumps: tuple[Operator, ...]

    def __init__(self, system: SiteSystem, jumps, hamiltonian: Operator | None = None):
        jumps = tuple(jumps)
        for op in jumps:
            if op.dim != system.total_dim:
                raise DimensionError("jump operator dimension does not match system")
        if hamiltonian is not None:
            if hamiltonian.dim != system.total_dim:
                raise DimensionError("Hamiltonian dimension does not match system")
            if not hamiltonian.is_hermitian(HERMITICITY_TOL):
                raise ValueError("Hamiltonian is not Hermitian to 1e-10")
        object.__setattr__(self, "system", system)
        object.__setattr__(self, "hamiltonian", hamiltonian)
        object.__setattr__(self, "jumps", jumps)


@dataclass(frozen=True)
class Superoperator:
    """Dense matrix on vectorized operators (column-stacking convention).

    ``kind`` is one of "generator" (trace annihilating), "channel"
    (trace preserving) or "adjoint" (unital).
    """

    matrix: np.ndarray
    hilbert_dim: int
    kind: str

    def __init__(self, matrix, hilbert_dim: int, kind: str = "generator", check: bool = True):
        mat = np.asarray(matrix, dtype=complex)
        d = int(hilbert_dim)
        if mat.shape != (d * d, d * d):
            raise DimensionError(
                f"superoperator shape {mat.shape} does not match dim {d}^2"
            )
        if kind not in ("generator", "channel", "adjoint"):
            raise ValueError(f"unknown superoperator kind {kind!r}")
        if check:
            ident = vec(np.eye(d, dtype=complex))
            if kind == "generator":
                dev = np.max(np.abs(mat.conj().T @ ident))
                if dev > GENERATOR_TP_TOL:
                    raise ValueError(f"generator does not annihilate the trace: {dev:.3e}")
            elif kind == "channel":
                dev = np.max(np.abs(mat.conj().T @ ident - ident))
                if dev > CHANNEL_TP_TOL:
                    raise ValueError(f"channel is not trace preserving: {dev:.3e}")
            else:
                dev = np.max(np.abs(mat @ ident - ident))
                if dev > CHANNEL_TP_TOL:
                    raise ValueError(f"adjoint map is not unital: {dev:.3e}")
        mat = np.ascontiguousarray(mat)
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "hilbert_dim", d)
        object.__setattr__(self, "kind", kind)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply_matrix(self, rho_matrix: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(rho_matrix), self.hilbert_dim)


@dataclass(frozen=True)
class SpectrumReport:
    """Full eigenvalue list of a generator with its gap and kernel size.

    ``gap`` is the smallest |Re(lambda)| among nonzero eigenvalues (zero
    identified by |lambda| <= 1e-9); ``steady_dim`` counts the zero
    eigenvalues.
    """

    eigenvalues: np.ndarray
    gap: float
    steady_dim: int


@dataclass(frozen=True)
class CpMapChannel:
    """Probabilistic mixture of Kraus sets: rho -> sum_b p_b sum_i K rho K^dag.

    Each branch's Kraus family is trace preserving on its own, and the
    branch probabilities sum to one, so the mixture is trace preserving.

    ``stepper``, when set by a builder, is a structure-exploiting callable
    computing the same map on a plain matrix; it must agree with the Kraus
    representation (the generic path remains available for cross-checks).
    """

    branches: tuple[tuple[float, tuple[np.ndarray, ...]], ...]
    system: SiteSystem
    stepper: object | None

    def __init__(self, branches, system: SiteSystem, check: bool = True, stepper=None):
        d = system.total_dim
        norm_branches = []
        total_p = 0.0
        for prob, kraus_ops in branches:
            prob = float(prob)
            if prob < -1e-12:
                raise ValueError("negative branch probability")
            ops = tuple(np.asarray(k, dtype=complex) for k in kraus_ops)
            for k in ops:
                if k.shape != (d, d):
                    raise DimensionError("Kraus operator dimension mismatch")
            total_p += prob
            norm_branches.append((prob, ops))
        if check:
            if abs(total_p - 1.0) > 1e-9:
                raise ValueError(f"branch probabilities sum to {total_p}, not 1")
            acc = np.zeros((d, d), dtype=complex)
            for prob, ops in norm_branches:
                for k in ops:
                    acc += prob * (k.conj().T @ k)
            dev = np.max(np.abs(acc - np.eye(d)))
            if dev > CHANNEL_TP_TOL:
                raise ValueError(f"channel is not trace preserving: deviation {dev:.3e}")
        object.__setattr__(self, "branches", tuple(norm_branches))
        object.__setattr__(self, "system", system)
        object.__setattr__(self, "stepper", stepper)

    @property
    def dim(self) -> int:
        return self.system.total_dim


def identity_channel(system: SiteSystem) -> CpMapChannel:
    d = system.total_dim
    return CpMapChannel([(1.0, [np.eye(d, dtype=complex)])], system)


# --- generator assembly -------------------------------------------------------


def _dissipator_dense(L: np.ndarray) -> np.ndarray:
    d = L.shape[0]
    LdL = L.conj().T @ L
    eye = np.eye(d, dtype=complex)
    return (
        np.kron(L.conj(), L)
        - 0.5 * np.kron(eye, LdL)
        - 0.5 * np.kron(LdL.T, eye)
    )


def assemble_generator(model: LindbladModel) -> Superoperator:
    """Dense Lindblad superoperator for a model."""
    d = model.system.total_dim
    mat = np.zeros((d * d, d * d), dtype=complex)
    eye = np.eye(d, dtype=complex)
    if model.hamiltonian is not None:
        H = model.hamiltonian.matrix
        mat += -1j * (np.kron(eye, H) - np.kron(H.T, eye))
    for op in model.jumps:
        mat += _dissipator_dense(op.matrix)
    return Superoperator(mat, d, kind="generator")


def assemble_generator_sparse(model: LindbladModel) -> scipy.sparse.csc_matrix:
    """Sparse CSC Lindblad superoperator (same convention as the dense one).

    Used for targeted eigensolves when the dense matrix would be too large.
    """
    d = model.system.total_dim
    eye = scipy.sparse.identity(d, dtype=complex, format="csr")
    acc = scipy.sparse.csr_matrix((d * d, d * d), dtype=complex)
    if model.hamiltonian is not None:
        H = scipy.sparse.csr_matrix(model.hamiltonian.matrix)
        acc = acc + (-1j) * (scipy.sparse.kron(eye, H) - scipy.sparse.kron(H.T, eye))
    for op in model.jumps:
        L = scipy.sparse.csr_matrix(op.matrix)
        LdL = (L.conj().T @ L).tocsr()
        acc = acc + scipy.sparse.kron(L.conj(), L)
        acc = acc - 0.5 * scipy.sparse.kron(eye, LdL)
        acc = acc - 0.5 * scipy.sparse.kron(LdL.T, eye)
    return acc.tocsc()


# --- spectra and steady states ------------------------------------------------


def spectral_gap(sop: Superoperator, zero_tol: float = ZERO_EIG_TOL) -> SpectrumReport:
    """Full spectrum of a generator with the decay gap.

    The gap is min |Re(lambda)| over eigenvalues with |lambda| > zero_tol.
    """
    if sop.kind != "generator":
        raise ValueError("spectral_gap expects a generator")
    try:
        eigvals = np.linalg.eigvals(sop.matrix)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericalFailure(f"eigensolver failed: {exc}") from exc
    if np.max(eigvals.real) > 1e-6:
        raise NumericalFailure(
            f"positive eigenvalue {np.max(eigvals.real):.3e} in a generator spectrum"
        )
    nonzero = eigvals[np.abs(eigvals) > zero_tol]
    steady_dim = int(len(eigvals) - len(nonzero))
    gap = float(np.min(np.abs(nonzero.real))) if len(nonzero) else 0.0
    order = np.argsort(-eigvals.real)
    return SpectrumReport(eigenvalues=eigvals[order], gap=gap, steady_dim=steady_dim)


def leading_spectrum(
    sop_matrix,
    hilbert_dim: int,
    k: int = 6,
    sigma: float = 1e-3,
) -> tuple[np.ndarray, np.ndarray]:
    """The ``k`` eigenpairs closest to zero via shift-inverted Arnoldi.

    Accepts a dense array or a sparse matrix.  The start vector is fixed, so
    results are deterministic.  Returns (eigenvalues, eigenvectors) sorted by
    descending real part.
    """
    mat = sop_matrix.matrix if isinstance(sop_matrix, Superoperator) else sop_matrix
    n = mat.shape[0]
    if scipy.sparse.issparse(mat):
        mat = mat.tocsc()
    v0 = np.ones(n) / np.sqrt(n)
    try:
        vals, vecs = scipy.sparse.linalg.eigs(mat, k=k, sigma=sigma, v0=v0)
    except Exception as exc:
        raise NumericalFailure(f"targeted eigensolve failed: {exc}") from exc
    order = np.argsort(-vals.real)
    return vals[order], vecs[:, order]


def gap_from_leading(eigvals: np.ndarray, zero_tol: float = ZERO_EIG_TOL) -> tuple[float, int]:
    """(gap, zero multiplicity) from a near-zero eigenvalue window."""
    zero = np.abs(eigvals) <= zero_tol
    nonzero = eigvals[~zero]
    if len(nonzero) == 0:
        raise NumericalFailure("no nonzero eigenvalue in the computed window")
    return float(np.min(np.abs(nonzero.real))), int(np.sum(zero))


def kernel_basis(sop: Superoperator, zero_tol: float = ZERO_EIG_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the kernel, found by SVD."""
    try:
        _, svals, vh = np.linalg.svd(sop.matrix)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericalFailure(f"SVD failed: {exc}") from exc
    thresh = zero_tol * max(1.0, float(svals[0]) if len(svals) else 1.0)
    null_mask = svals <= thresh
    n_null = int(np.sum(null_mask))
    if n_null == 0:
        raise NumericalFailure("no kernel found: every generator has a steady state")
    return vh[len(svals) - n_null :].conj().T


def steady_states(sop: Superoperator, zero_tol: float = ZERO_EIG_TOL) -> list[DensityMatrix]:
    """Density matrices spanning the kernel, where extraction is possible.

    Kernel elements are Hermitized and kept when they normalize to a valid
    state whose residual under the generator stays below 1e-8.
    """
    d = sop.hilbert_dim
    basis = kernel_basis(sop, zero_tol)
    system = SiteSystem((d,)) if d >= 2 else SiteSystem((2,))
    out: list[DensityMatrix] = []
    seen: list[np.ndarray] = []
    for j in range(basis.shape[1]):
        X = unvec(basis[:, j], d)
        for cand in (X + X.conj().T, 1j * (X - X.conj().T)):
            tr = np.trace(cand).real
            if abs(tr) < 1e-12:
                continue
            cand = cand / tr
            cand = 0.5 * (cand + cand.conj().T)
            lo = float(np.linalg.eigvalsh(cand)[0])
            if lo < -1e-9:
                # clip and re-validate; off-diagonal kernel elements drop out
                w, v = np.linalg.eigh(cand)
                w = np.clip(w, 0.0, None)
                s = w.sum()
                if s < 1e-12:
                    continue
                cand = (v * (w / s)) @ v.conj().T
            resid = np.max(np.abs(sop.matrix @ vec(cand)))
            if resid > 1e-8:
                continue
            if any(np.max(np.abs(cand - p)) < 1e-10 for p in seen):
                continue
            seen.append(cand)
            out.append(DensityMatrix.trusted(cand, system))
    if not out:
        raise NumericalFailure("kernel basis yielded no valid density matrix")
    return out


def steady_state_matrix(sop: Superoperator, zero_tol: float = ZERO_EIG_TOL) -> np.ndarray:
    """The unique steady state as a plain matrix (kernel must be 1-d)."""
    basis = kernel_basis(sop, zero_tol)
    if basis.shape[1] != 1:
        raise NumericalFailure(f"steady space is {basis.shape[1]}-dimensional, not unique")
    X = unvec(basis[:, 0], sop.hilbert_dim)
    X = X + X.conj().T
    X /= np.trace(X).real
    return 0.5 * (X + X.conj().T)


# --- evolution and channels ---------------------------------------------------


def evolve(sop: Superoperator, rho: DensityMatrix, t: float) -> DensityMatrix:
    """exp(t * sop) applied to a state, re-symmetrized.

    Uses scaling-and-squaring Pade exponentiation, which stays correct for
    non-diagonalizable generators (defective Jordan structure included).
    """
    if t < 0:
        raise ValueError("evolution time must be nonnegative")
    prop = scipy.linalg.expm(sop.matrix * t)
    out = unvec(prop @ vec(rho.matrix), sop.hilbert_dim)
    out = 0.5 * (out + out.conj().T)
    tr = np.trace(out).real
    if not np.isfinite(tr) or abs(tr - 1.0) > 1e-8:
        raise NumericalFailure(f"trace drifted to {tr} during evolution")
    return DensityMatrix.trusted(out / tr, rho.system)


def evolve_grid(sop: Superoperator, rho: DensityMatrix, times: np.ndarray) -> list[DensityMatrix]:
    """States at a uniform time grid, via one propagator per step."""
    times = np.asarray(times, dtype=float)
    if len(times) < 2:
        return [rho]
    dt = times[1] - times[0]
    if np.max(np.abs(np.diff(times) - dt)) > 1e-12 * max(1.0, abs(dt)):
        raise ValueError("evolve_grid needs a uniform time grid")
    prop = scipy.linalg.expm(sop.matrix * dt)
    out = [rho]
    v = vec(rho.matrix)
    for _ in times[1:]:
        v = prop @ v
        m = unvec(v, sop.hilbert_dim)
        m = 0.5 * (m + m.conj().T)
        out.append(DensityMatrix.trusted(m / np.trace(m).real, rho.system))
    return out


def apply_channel(ch: CpMapChannel, rho: DensityMatrix) -> DensityMatrix:
    """One application of a Kraus-mixture channel, re-symmetrized."""
    if ch.dim != rho.dim:
        raise DimensionError("channel dimension does not match state")
    out = apply_channel_matrix(ch, rho.matrix)
    tr = np.trace(out).real
    if abs(tr - 1.0) > 1e-10:
        raise NumericalFailure(f"channel application drifted trace by {tr - 1.0:.3e}")
    return DensityMatrix.trusted(out, rho.system)


def apply_channel_matrix(ch: CpMapChannel, rho_mat: np.ndarray, use_stepper: bool = True) -> np.ndarray:
    if use_stepper and ch.stepper is not None:
        out = ch.stepper(rho_mat)
    else:
        out = np.zeros_like(rho_mat)
        for prob, kraus_ops in ch.branches:
            if prob == 0.0:
                continue
            acc = np.zeros_like(rho_mat)
            for k in kraus_ops:
                acc += k @ rho_mat @ k.conj().T
            out += prob * acc
    return 0.5 * (out + out.conj().T)


def channel_superoperator(ch: CpMapChannel) -> Superoperator:
    d = ch.dim
    mat = np.zeros((d * d, d * d), dtype=complex)
    for prob, kraus_ops in ch.branches:
        for k in kraus_ops:
            mat += prob * np.kron(k.conj(), k)
    return Superoperator(mat, d, kind="channel")


def channel_adjoint(ch: CpMapChannel) -> Superoperator:
    """Heisenberg-picture map X -> sum p K^dag X K as a superoperator."""
    fwd = channel_superoperator(ch)
    return Superoperator(fwd.matrix.conj().T, ch.dim, kind="adjoint")


def channel_to_generator(ch: CpMapChannel, n_scale: int) -> Superoperator:
    """Continuous-time generator n_scale * (channel - identity)."""
    if n_scale < 1:
        raise ValueError("n_scale must be >= 1")
    fwd = channel_superoperator(ch)
    d = ch.dim
    mat = n_scale * (fwd.matrix - np.eye(d * d, dtype=complex))
    return Superoperator(mat, d, kind="generator")


def choi_matrix(sop_matrix: np.ndarray, hilbert_dim: int) -> np.ndarray:
    """Choi matrix sum_ij map(|i><j|) kron |i><j| of a superoperator matrix."""
    d = hilbert_dim
    choi = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1.0
            out = unvec(sop_matrix @ vec(e), d)
            choi += np.kron(out, e)
    return choi
