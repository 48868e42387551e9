"""Translationally invariant matrix product states on a ring, their two-site
parent projectors, and a tree-scheduled preparation channel.

The state on N = 2^n sites has coefficients tr(A_{i_1} ... A_{i_N}) with d
bond matrices A_i of size D x D.  For an injective tensor (the two-site map
X -> sum_ij tr[X A_i A_j] |ij> has rank D^2) the state is the unique ground
state of the frustration-free parent Hamiltonian whose terms are the
complements of the two-site reduced-state range projectors.

Preparation uses a binary tree of pair channels: a pair channel projects one
bond onto the good range and refills the lost weight uniformly inside it; a
tree channel mixes its two child blocks with weight (1-eps)/2 each and its
own middle bond with weight eps; the full channel adds the ring-closing
boundary bond on top.  The per-level weights fall off geometrically,
eps_{r+1} = 1/M^r with M = C N^2, so lower tree levels fire much more often
than the levels above them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import (
    DensityMatrix,
    DimensionError,
    LocalOperator,
    Operator,
    SiteSystem,
    join_on_support,
    local_operator,
    partial_trace_matrix,
    tensor_embed,
)
from .liouville import CpMapChannel

RANK_TOL = 1e-10


class InjectivityError(ValueError):
    """The two-site tensor map does not have full bond rank."""


@dataclass(frozen=True)
class MatrixProductState:
    """Site tensor A (d matrices of size D x D) repeated on n_sites sites."""

    tensors: np.ndarray  # shape (d, D, D)
    n_sites: int

    def __init__(self, tensors, n_sites: int):
        arr = np.asarray(tensors, dtype=complex)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise DimensionError(f"tensors must have shape (d, D, D), got {arr.shape}")
        n = int(n_sites)
        if n < 2:
            raise DimensionError("need at least two sites")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "tensors", arr)
        object.__setattr__(self, "n_sites", n)

    @property
    def d(self) -> int:
        return self.tensors.shape[0]

    @property
    def D(self) -> int:
        return self.tensors.shape[1]

    @property
    def system(self) -> SiteSystem:
        return SiteSystem((self.d,) * self.n_sites)

    def two_site_map_rank(self) -> int:
        """Rank of X -> sum_ij tr[X A_i A_j] |ij>, computed by matricization."""
        d, D = self.d, self.D
        g = np.empty((d * d, D * D), dtype=complex)
        for i in range(d):
            for j in range(d):
                prod = self.tensors[i] @ self.tensors[j]
                g[i * d + j] = prod.T.reshape(-1)  # tr[X A_i A_j] = sum X_ab (A_i A_j)_ba
        s = np.linalg.svd(g, compute_uv=False)
        return int(np.sum(s > RANK_TOL * max(1.0, s[0])))

    @property
    def is_two_site_injective(self) -> bool:
        return self.two_site_map_rank() == self.D**2


def mps_ket(mps: MatrixProductState) -> np.ndarray:
    """Normalized state vector with coefficients tr(A_{i_1} ... A_{i_N})."""
    d, D, n = mps.d, mps.D, mps.n_sites
    # accumulate W[(i_1..i_k), a, b] = (A_{i_1} ... A_{i_k})_{ab}
    w = mps.tensors.copy()  # (d, D, D)
    for _ in range(n - 1):
        w = np.einsum("xab,ibc->xiac", w, mps.tensors).reshape(-1, D, D)
    vec = np.einsum("xaa->x", w)
    norm = np.linalg.norm(vec)
    if norm < 1e-12:
        raise ValueError("tensor contraction has zero norm")
    return vec / norm


def mps_to_state(mps: MatrixProductState) -> DensityMatrix:
    """The (pure) ring state as a density matrix."""
    vec = mps_ket(mps)
    return DensityMatrix.trusted(np.outer(vec, vec.conj()), mps.system)


@dataclass(frozen=True)
class PairProjectors:
    """Range projector of the two-site reduced state and its complement."""

    range_projector: np.ndarray  # d^2 x d^2, rank D^2
    excited_projector: np.ndarray

    @property
    def local_dim(self) -> int:
        return self.range_projector.shape[0]


def pair_projectors(mps: MatrixProductState) -> PairProjectors:
    """Two-site range/excited projectors (equal on every bond by translation
    invariance).  Rejects tensors whose two-site map rank is not D^2."""
    d, D = mps.d, mps.D
    rank = mps.two_site_map_rank()
    if rank != D**2:
        raise InjectivityError(
            f"two-site map rank {rank} != D^2 = {D**2}; not injective"
        )
    rho_full = mps_to_state(mps)
    traced = list(range(2, mps.n_sites))
    red = partial_trace_matrix(rho_full.matrix, mps.system.dims, traced)
    w, v = np.linalg.eigh(red)
    cols = v[:, w > RANK_TOL]
    if cols.shape[1] != D**2:
        raise InjectivityError(
            f"two-site reduced state has rank {cols.shape[1]}, expected {D**2}"
        )
    p = cols @ cols.conj().T
    p = 0.5 * (p + p.conj().T)
    h = np.eye(d * d, dtype=complex) - p
    return PairProjectors(range_projector=p, excited_projector=h)


def two_site_projectors(mps: MatrixProductState) -> list[LocalOperator]:
    """Parent-Hamiltonian terms: one excited-space projector per ring bond."""
    proj = pair_projectors(mps)
    system = mps.system
    out = []
    for k in range(1, mps.n_sites + 1):
        out.append(
            local_operator(proj.excited_projector, _bond_support(k, mps.n_sites), system)
        )
    return out


def parent_hamiltonian(mps: MatrixProductState):
    """Frustration-free parent Hamiltonian on the ring."""
    from .dse import FrustrationFreeHamiltonian

    return FrustrationFreeHamiltonian(mps.system, two_site_projectors(mps))


def _bond_support(k: int, n: int) -> tuple[int, int]:
    """Sites of bond k (1-based pairs (k, k+1), ring wraparound)."""
    if not 1 <= k <= n:
        raise DimensionError(f"bond {k} outside ring of {n} sites")
    return (k - 1, k % n)


# --- schedule -------------------------------------------------------------------


@dataclass(frozen=True)
class ScheduleParams:
    """Tree schedule constants: M = C N^2 and eps_{r+1} = 1/M^r."""

    C: float
    n_sites: int

    def __post_init__(self):
        if self.C <= 0:
            raise ValueError("C must be positive")
        n = self.n_sites
        if n < 2 or (n & (n - 1)) != 0:
            raise ValueError("site count must be a power of two >= 2")
        if self.M <= 1:
            raise ValueError("M = C N^2 must exceed 1")

    @property
    def M(self) -> float:
        return self.C * self.n_sites**2

    @property
    def levels(self) -> int:
        return int(math.log2(self.n_sites))

    def eps(self, r: int) -> float:
        """Mixing weight at tree level r (defined for r = 2 .. levels+1)."""
        if not 2 <= r <= self.levels + 1:
            raise ValueError(f"eps defined for levels 2..{self.levels + 1}")
        return float(self.M ** -(r - 1))

    def repetitions(self, r: int) -> float:
        """Settling length of level r: 1 / (2 eps_{r+1})."""
        return 0.5 / self.eps(r + 1) if r + 1 <= self.levels + 1 else float("nan")


def default_step_budget(n_sites: int, C: float, cap: int = 10**6) -> int:
    """ceil(N^(log2 N + log2 C)) capped at one million steps."""
    raw = n_sites ** (math.log2(n_sites) + math.log2(C))
    return int(min(math.ceil(raw), cap))


# --- channels -------------------------------------------------------------------


def bond_for(level: int, column: int) -> int:
    """Tree coordinates to bond index: k = 2^(level-1) (2 column - 1)."""
    if level < 1 or column < 1:
        raise DimensionError("tree coordinates are 1-based")
    return 2 ** (level - 1) * (2 * column - 1)


def pair_channel(mps: MatrixProductState, level: int, column: int) -> CpMapChannel:
    """Channel on the bond at tree position (level, column): keep the good
    range of the pair, refill the excited weight uniformly inside the range.

    Kraus set: the embedded range projector, plus (1/D)|phi_a><psi_b| for
    phi a basis of the range and psi a basis of its complement.
    """
    n = mps.n_sites
    k = bond_for(level, column)
    if level > int(math.log2(n)) or k > n:
        raise DimensionError(f"tree position ({level},{column}) outside ring of {n}")
    return bond_channel(mps, k)


def boundary_channel(mps: MatrixProductState) -> CpMapChannel:
    """The ring-closing bond (N, 1), which the tree never touches."""
    return bond_channel(mps, mps.n_sites)


def bond_channel(mps: MatrixProductState, k: int) -> CpMapChannel:
    proj = pair_projectors(mps)
    system = mps.system
    support = _bond_support(k, mps.n_sites)
    D = mps.D
    p_loc, h_loc = proj.range_projector, proj.excited_projector
    w_p, v_p = np.linalg.eigh(p_loc)
    phi = v_p[:, w_p > 0.5]
    psi = v_p[:, w_p <= 0.5]
    kraus = [tensor_embed(local_operator(p_loc, support, system), system).matrix]
    for a in range(phi.shape[1]):
        for b in range(psi.shape[1]):
            op = np.outer(phi[:, a], psi[:, b].conj()) / D
            kraus.append(tensor_embed(local_operator(op, support, system), system).matrix)
    stepper = _bond_stepper(mps, k)
    return CpMapChannel([(1.0, kraus)], system, stepper=stepper)


def _bond_stepper(mps: MatrixProductState, k: int) -> Callable[[np.ndarray], np.ndarray]:
    """Analytic action P rho P + (P/D^2) (x) tr_pair[H rho H], quadratic cost."""
    proj = pair_projectors(mps)
    system = mps.system
    support = _bond_support(k, mps.n_sites)
    d2 = mps.D**2
    p_full = tensor_embed(local_operator(proj.range_projector, support, system), system).matrix
    h_full = tensor_embed(local_operator(proj.excited_projector, support, system), system).matrix
    p_over = proj.range_projector / d2

    def step(rho: np.ndarray) -> np.ndarray:
        prp = p_full @ rho @ p_full
        hrh = h_full @ rho @ h_full
        reduced = partial_trace_matrix(hrh, system.dims, support)
        return prp + join_on_support(p_over, support, reduced, system)

    return step


def _expand_tree(level: int, column: int, params: ScheduleParams) -> dict[int, float]:
    """Leaf weights of the recursive block channel: bond index -> weight."""
    if level == 1:
        return {bond_for(1, column): 1.0}
    eps = params.eps(level)
    out: dict[int, float] = {bond_for(level, column): eps}
    for child in (2 * column - 1, 2 * column):
        sub = _expand_tree(level - 1, child, params)
        for bond, w in sub.items():
            out[bond] = out.get(bond, 0.0) + w * (1.0 - eps) / 2.0
    return out


def tree_channel(mps: MatrixProductState, level: int, column: int, params: ScheduleParams) -> CpMapChannel:
    """Recursive block channel on the 2^level sites starting at block
    ``column``: children blocks with weight (1-eps)/2 each, plus the bond
    joining them with weight eps."""
    if params.n_sites != mps.n_sites:
        raise DimensionError("schedule and state disagree on the ring size")
    if not 1 <= level <= params.levels:
        raise DimensionError(f"level must be 1..{params.levels}")
    weights = _expand_tree(level, column, params)
    return _mixture_channel(mps, weights)


def preparation_channel(mps: MatrixProductState, params: ScheduleParams) -> CpMapChannel:
    """Full-ring preparation: the top tree block with weight 1 - eps_(n+1),
    plus the ring-closing boundary bond with weight eps_(n+1)."""
    if params.n_sites != mps.n_sites:
        raise DimensionError("schedule and state disagree on the ring size")
    n_lvl = params.levels
    eps_top = params.eps(n_lvl + 1)
    weights = {k: w * (1.0 - eps_top) for k, w in _expand_tree(n_lvl, 1, params).items()}
    boundary = mps.n_sites
    weights[boundary] = weights.get(boundary, 0.0) + eps_top
    return _mixture_channel(mps, weights)


def _mixture_channel(mps: MatrixProductState, weights: dict[int, float]) -> CpMapChannel:
    branches = []
    for bond in sorted(weights):
        ch = bond_channel(mps, bond)
        branches.append((weights[bond], ch.branches[0][1]))
    stepper = _mixture_stepper(mps, weights)
    return CpMapChannel(branches, mps.system, stepper=stepper)


def _mixture_stepper(mps: MatrixProductState, weights: dict[int, float]):
    """Fused analytic action of a bond-channel mixture on Hermitian input.

    Batches the projector sandwiches across bonds and derives the excited
    sandwich from them: H rho H = rho - P rho - (P rho)^dag + P rho P.
    """
    proj = pair_projectors(mps)
    system = mps.system
    bonds = sorted(weights)
    w = np.array([weights[k] for k in bonds])
    supports = [_bond_support(k, mps.n_sites) for k in bonds]
    p_stack = np.stack(
        [
            tensor_embed(local_operator(proj.range_projector, s, system), system).matrix
            for s in supports
        ]
    )
    p_over = proj.range_projector / mps.D**2
    dims = system.dims

    def step(rho: np.ndarray) -> np.ndarray:
        out = np.zeros_like(rho)
        for k, support in enumerate(supports):
            p_rho = p_stack[k] @ rho
            prp = p_rho @ p_stack[k]
            hrh = rho - p_rho - p_rho.conj().T + prp
            reduced = partial_trace_matrix(hrh, dims, support)
            out += w[k] * (prp + join_on_support(p_over, support, reduced, system))
        return out

    return step


# --- level errors and preparation driving ------------------------------------------


@dataclass(frozen=True)
class LevelErrorTrace:
    """Weights outside the zero-energy spaces of growing bond prefixes.

    Level r <= n uses bonds k < 2^r; the top level n+1 uses every ring bond,
    so its error is one minus the ground overlap.
    """

    mu: tuple[float, ...]  # index r-1 -> mu_r, r = 1..n+1


def _level_projectors(mps: MatrixProductState) -> list[np.ndarray]:
    """q_r = 1 - (projector onto the common kernel of bonds k < 2^r); the
    final entry covers all bonds."""
    n = mps.n_sites
    levels = int(math.log2(n))
    terms = two_site_projectors(mps)  # bond k at index k-1
    system = mps.system
    out = []
    dim = system.total_dim
    for r in range(1, levels + 2):
        if r <= levels:
            bonds = [k for k in range(1, 2**r)]
        else:
            bonds = list(range(1, n + 1))
        total = np.zeros((dim, dim), dtype=complex)
        for k in bonds:
            total += tensor_embed(terms[k - 1], system).matrix
        w, v = np.linalg.eigh(total)
        cols = v[:, w <= 1e-9]
        out.append(np.eye(dim, dtype=complex) - cols @ cols.conj().T)
    return out


def level_errors(rho: DensityMatrix, mps: MatrixProductState) -> LevelErrorTrace:
    """mu_r = tr[q_r rho] for each level; all lie in [0, 1]."""
    projectors = _level_projectors(mps)
    mu = []
    for q in projectors:
        val = float(np.real(np.trace(q @ rho.matrix)))
        mu.append(min(max(val, 0.0), 1.0))
    return LevelErrorTrace(mu=tuple(mu))


@dataclass
class PreparationTrace:
    steps: list[int] = field(default_factory=list)
    fidelities: list[float] = field(default_factory=list)
    energies: list[float] = field(default_factory=list)
    level_mu: list[tuple[float, ...]] = field(default_factory=list)
    final: DensityMatrix | None = None


def prepare(
    mps: MatrixProductState,
    params: ScheduleParams,
    steps: int,
    rho0: DensityMatrix | None = None,
    record_every: int = 1,
    mode: str = "deterministic",
    rng: np.random.Generator | None = None,
    track_levels: bool = False,
) -> PreparationTrace:
    """Iterate the preparation channel and record fidelity with the target.

    "deterministic" applies the full mixture each step; "sampled" draws one
    bond per step from the mixture weights (the two modes agree on fidelity
    trajectories up to sampling noise).
    """
    if mode not in ("deterministic", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    system = mps.system
    target = mps_ket(mps)
    levels = _level_projectors(mps) if track_levels else None
    parent = parent_hamiltonian(mps)
    total_t = parent.total_matrix().T.copy()

    if rho0 is None:
        dim = system.total_dim
        rho = np.eye(dim, dtype=complex) / dim
    else:
        rho = rho0.matrix

    trace = PreparationTrace()
    if mode == "deterministic":
        channel = preparation_channel(mps, params)
        stepper = channel.stepper
    else:
        if rng is None:
            rng = np.random.default_rng(0)
        n_lvl = params.levels
        eps_top = params.eps(n_lvl + 1)
        weights = {k: w * (1.0 - eps_top) for k, w in _expand_tree(n_lvl, 1, params).items()}
        weights[mps.n_sites] = weights.get(mps.n_sites, 0.0) + eps_top
        bonds = sorted(weights)
        probs = np.array([weights[k] for k in bonds])
        probs = probs / probs.sum()
        bond_steppers = [_bond_stepper(mps, k) for k in bonds]

    for step_no in range(steps + 1):
        if step_no % record_every == 0 or step_no == steps:
            fid = float(np.real(target.conj() @ rho @ target))
            energy = float(np.real(np.sum(total_t * rho)))
            trace.steps.append(step_no)
            trace.fidelities.append(fid)
            trace.energies.append(energy)
            if track_levels:
                trace.level_mu.append(
                    tuple(float(np.real(np.sum(q.T * rho))) for q in levels)
                )
        if step_no == steps:
            break
        if mode == "deterministic":
            rho = stepper(rho)
        else:
            pick = int(rng.choice(len(bonds), p=probs))
            rho = bond_steppers[pick](rho)
        rho = 0.5 * (rho + rho.conj().T)

    trace.final = DensityMatrix.trusted(rho, system)
    return trace


# --- presets -------------------------------------------------------------------


def aklt_tensors() -> np.ndarray:
    """Spin-1 valence-bond tensors (d=3, D=2): A ~ (sigma_+, -sigma_z, -sigma_-)."""
    sp = np.array([[0, 1], [0, 0]], dtype=complex)
    sm = np.array([[0, 0], [1, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    return np.stack(
        [math.sqrt(2.0 / 3.0) * sp, -math.sqrt(1.0 / 3.0) * sz, -math.sqrt(2.0 / 3.0) * sm]
    )


def ghz_tensors() -> np.ndarray:
    """Diagonal selector tensors; not two-site injective (rank 2, not 4)."""
    return np.stack(
        [np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)]
    )


def w_like_tensors(strength: float = 0.5) -> np.ndarray:
    """Deformed valence-bond tensors: a generic injective d=3, D=2 family.

    Two-site parent terms need D^2 < d^2, which rules out qubit chains at
    bond dimension two; this deformation of the spin-1 tensors keeps a
    one-dimensional ring kernel while breaking all their symmetries.
    """
    deform = np.array(
        [
            [[0.15, 0.05], [0.0, -0.1]],
            [[0.0, 0.2], [0.1, 0.0]],
            [[-0.05, 0.0], [0.2, 0.1]],
        ],
        dtype=complex,
    )
    return aklt_tensors() + strength * deform


PRESETS = {
    "aklt": aklt_tensors,
    "ghz": ghz_tensors,
    "wlike": w_like_tensors,
}


def preset_mps(name: str, n_sites: int) -> MatrixProductState:
    key = name.strip().lower()
    if key not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; options: {sorted(PRESETS)}")
    return MatrixProductState(PRESETS[key](), n_sites)
