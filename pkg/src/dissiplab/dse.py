"""Frustration-free Hamiltonians and measure-and-correct channel engineering.

A frustration-free Hamiltonian is a sum of commuting-or-not local projector
terms whose common ground space has zero energy.  The engineering channel
randomly picks a term (probability p per term), measures its ground
projector, and on a negative outcome applies a correction drawn from a set
of unitaries on the term's support (or completely depolarizes the support).
Iterating the channel funnels any input toward the ground space.

Included instances: graph-state Hamiltonians with their single-Pauli
corrections and the dedicated graph-state generator whose spectrum is
exactly minus half the pairwise sums of Hamiltonian eigenvalues, and the
toric-code Hamiltonian on an lx-by-ly torus with its four-fold degenerate
ground space.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import (
    DensityMatrix,
    DimensionError,
    LocalOperator,
    Operator,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    SiteSystem,
    local_operator,
    pauli_string,
    tensor_embed,
)
from .liouville import CpMapChannel, LindbladModel, apply_channel_matrix

PROJECTOR_TOL = 1e-10
FRUSTRATION_TOL = 1e-9
GROUND_TOL = 1e-9


class BudgetExceeded(RuntimeError):
    """Instance larger than the configured dimension budget."""


@dataclass(frozen=True)
class FrustrationFreeHamiltonian:
    """Sum of local projector terms with a zero-energy ground space."""

    system: SiteSystem
    terms: tuple[LocalOperator, ...]

    def __init__(self, system: SiteSystem, terms: Iterable[LocalOperator]):
        terms = tuple(terms)
        if not terms:
            raise DimensionError("need at least one term")
        for term in terms:
            term.validate_against(system)
            mat = term.op.matrix
            dev = max(
                np.max(np.abs(mat @ mat - mat)),
                np.max(np.abs(mat - mat.conj().T)),
            )
            if dev > PROJECTOR_TOL:
                raise ValueError(f"term on {term.support} is not a projector: {dev:.3e}")
        object.__setattr__(self, "system", system)
        object.__setattr__(self, "terms", terms)
        total = self.total_matrix()
        lo = float(np.linalg.eigvalsh(total)[0])
        if abs(lo) > FRUSTRATION_TOL:
            raise ValueError(f"not frustration free: minimum energy {lo:.3e}")

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    def total_matrix(self) -> np.ndarray:
        total = np.zeros((self.system.total_dim,) * 2, dtype=complex)
        for term in self.terms:
            total += tensor_embed(term, self.system).matrix
        return total

    def embedded_terms(self) -> list[np.ndarray]:
        return [tensor_embed(t, self.system).matrix for t in self.terms]

    def ground_projector(self) -> Operator:
        """Projector onto the zero-energy space of the summed Hamiltonian."""
        total = self.total_matrix()
        w, v = np.linalg.eigh(total)
        cols = v[:, w <= GROUND_TOL]
        return Operator(cols @ cols.conj().T, self.system)

    def energy(self, rho: DensityMatrix) -> float:
        return float(np.real(np.trace(self.total_matrix() @ rho.matrix)))


@dataclass(frozen=True)
class HamiltonianReport:
    projector_deviations: tuple[float, ...]
    min_eigenvalue: float
    ground_dimension: int
    commutator_norms: np.ndarray
    frustration_free: bool


def validate_hamiltonian(system: SiteSystem, terms: Sequence[LocalOperator]) -> HamiltonianReport:
    """Diagnostics for a candidate term list; carries failures, never raises.

    Reports per-term projector deviation, the global minimum eigenvalue,
    the dimension of the bottom eigenspace, and pairwise commutator norms
    of the embedded terms.
    """
    devs = []
    embedded = []
    for term in terms:
        term.validate_against(system)
        mat = term.op.matrix
        devs.append(
            float(
                max(
                    np.max(np.abs(mat @ mat - mat)),
                    np.max(np.abs(mat - mat.conj().T)),
                )
            )
        )
        embedded.append(tensor_embed(term, system).matrix)
    total = np.sum(embedded, axis=0)
    w = np.linalg.eigvalsh(total)
    lo = float(w[0])
    ground_dim = int(np.sum(w <= lo + GROUND_TOL))
    m = len(terms)
    comms = np.zeros((m, m))
    for a in range(m):
        for b in range(a + 1, m):
            comms[a, b] = comms[b, a] = float(
                np.max(np.abs(embedded[a] @ embedded[b] - embedded[b] @ embedded[a]))
            )
    return HamiltonianReport(
        projector_deviations=tuple(devs),
        min_eigenvalue=lo,
        ground_dimension=ground_dim,
        commutator_norms=comms,
        frustration_free=bool(abs(lo) <= FRUSTRATION_TOL and max(devs) <= PROJECTOR_TOL),
    )


# --- correction sets and the engineering channel -------------------------------

DEPOLARIZING = "depolarizing"


@dataclass(frozen=True)
class CorrectionSet:
    """Per-term correction: a list of unitaries on the term's support, or the
    completely depolarizing marker.  Probabilities sum to one."""

    entries: tuple[tuple[float, object], ...]  # (probability, unitaries tuple or DEPOLARIZING)

    def __init__(self, entries):
        entries = tuple(entries)
        total = 0.0
        norm = []
        for prob, corr in entries:
            prob = float(prob)
            if prob <= 0:
                raise ValueError("every term needs positive probability")
            total += prob
            if isinstance(corr, str):
                if corr != DEPOLARIZING:
                    raise ValueError(f"unknown correction marker {corr!r}")
                norm.append((prob, DEPOLARIZING))
            else:
                ops = tuple(np.asarray(u, dtype=complex) for u in corr)
                if not ops:
                    raise ValueError("empty unitary list")
                for u in ops:
                    dev = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
                    if dev > 1e-10:
                        raise ValueError(f"correction is not unitary: {dev:.3e}")
                norm.append((prob, ops))
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"term probabilities sum to {total}, not 1")
        object.__setattr__(self, "entries", tuple(norm))

    @classmethod
    def uniform(cls, unitaries_per_term: Sequence) -> "CorrectionSet":
        n = len(unitaries_per_term)
        return cls([(1.0 / n, ops) for ops in unitaries_per_term])

    @classmethod
    def depolarizing(cls, n_terms: int) -> "CorrectionSet":
        return cls([(1.0 / n_terms, DEPOLARIZING)] * n_terms)

    @classmethod
    def stabilizer(cls, H: FrustrationFreeHamiltonian, per_site: bool = False) -> "CorrectionSet":
        """Single-Pauli corrections derived from each stabilizer term.

        With ``per_site`` a whole set of corrections is built per term, one
        anticommuting Pauli on every support site; a negative outcome then
        kicks the excitation toward a uniformly random neighbour, which is
        what lets paired excitations meet and annihilate on a torus.  The
        default is the single correction on the first support site.
        """
        ops = []
        for term in H.terms:
            if per_site:
                corrs = stabilizer_correction_set(term)
                ops.append(tuple(c.op.matrix for c in corrs))
            else:
                ops.append((stabilizer_correction(term).op.matrix,))
        return cls.uniform(ops)


def dse_channel(H: FrustrationFreeHamiltonian, corr: CorrectionSet) -> CpMapChannel:
    """Measure-and-correct channel: pick term lambda with probability p, keep
    the ground component, rotate the excited component back with the term's
    unitaries (each Kraus U_i H / sqrt(m)) or depolarize the support.

    When every term is half of one-minus-a-signed-permutation (Pauli
    stabilizers) a quadratic-cost stepper is attached alongside the Kraus
    representation; matrix sizes beyond a few hundred stay affordable that
    way on iteration-heavy runs.
    """
    if len(corr.entries) != H.n_terms:
        raise DimensionError(
            f"{len(corr.entries)} corrections for {H.n_terms} terms"
        )
    system = H.system
    branches = []
    for term, (prob, entry) in zip(H.terms, corr.entries):
        h_loc = term.op.matrix
        p_loc = np.eye(h_loc.shape[0], dtype=complex) - h_loc
        kraus = [tensor_embed(LocalOperator(Operator(p_loc, term.op.system), term.support), system).matrix]
        if entry == DEPOLARIZING:
            k = h_loc.shape[0]
            scale = 1.0 / np.sqrt(k)
            for a in range(k):
                for b in range(k):
                    op = np.zeros_like(h_loc)
                    op[a, b] = scale
                    kraus.append(
                        tensor_embed(
                            LocalOperator(Operator(op @ h_loc, term.op.system), term.support),
                            system,
                        ).matrix
                    )
        else:
            m = len(entry)
            for u in entry:
                if u.shape != h_loc.shape:
                    raise DimensionError("correction does not match term support")
                kraus.append(
                    tensor_embed(
                        LocalOperator(Operator(u @ h_loc / np.sqrt(m), term.op.system), term.support),
                        system,
                    ).matrix
                )
        branches.append((prob, kraus))
    stepper = _build_fast_stepper(H, corr)
    return CpMapChannel(branches, system, stepper=stepper)


def _compact_phase(arr: np.ndarray) -> np.ndarray:
    """Full-size phase array, stored real when possible (broadcast multiplies
    of complex by thin phase vectors are slow; full elementwise is not)."""
    if np.max(np.abs(arr.imag)) < 1e-15:
        return np.ascontiguousarray(arr.real)
    return np.ascontiguousarray(arr)


class _SignedPermutation:
    """Action of a matrix with one unit-modulus entry per column:
    M |i> = phase[i] |perm[i]>.  Gather indices and full-size phase arrays
    are precomputed so every operation is a fancy read plus one fast
    elementwise multiply (thin broadcasts are slow on complex arrays)."""

    __slots__ = ("perm", "phase", "iperm", "row2d", "pair_ix", "conj2d")

    def __init__(self, perm: np.ndarray, phase: np.ndarray):
        d = len(perm)
        self.perm = perm
        self.phase = phase
        ip = np.argsort(perm)
        self.iperm = ip
        ph_ip = phase[ip]
        self.row2d = _compact_phase(np.multiply.outer(ph_ip, np.ones(d)))
        self.pair_ix = (ip[:, None], ip[None, :])
        self.conj2d = _compact_phase(np.multiply.outer(ph_ip, ph_ip.conj()))

    @classmethod
    def from_matrix(cls, mat: np.ndarray) -> "_SignedPermutation | None":
        d = mat.shape[0]
        perm = np.empty(d, dtype=np.intp)
        phase = np.empty(d, dtype=complex)
        for col in range(d):
            nz = np.nonzero(np.abs(mat[:, col]) > 1e-12)[0]
            if len(nz) != 1:
                return None
            entry = mat[nz[0], col]
            if abs(abs(entry) - 1.0) > 1e-12:
                return None
            perm[col] = nz[0]
            phase[col] = entry
        if len(np.unique(perm)) != d:
            return None
        return cls(perm, phase)

    def left(self, rho: np.ndarray) -> np.ndarray:
        return rho[self.iperm, :] * self.row2d

    def conjugate(self, rho: np.ndarray) -> np.ndarray:
        """M rho M^dag."""
        return rho[self.pair_ix] * self.conj2d


def _build_fast_stepper(H: FrustrationFreeHamiltonian, corr: CorrectionSet):
    """Quadratic-cost step closure, or None when the structure is absent."""
    system = H.system
    d = system.total_dim
    plan = []
    for term, (prob, entry) in zip(H.terms, corr.entries):
        h_loc = term.op.matrix
        s_loc = np.eye(h_loc.shape[0], dtype=complex) - 2.0 * h_loc
        s_full = tensor_embed(
            LocalOperator(Operator(s_loc, term.op.system), term.support), system
        ).matrix
        s_act = _SignedPermutation.from_matrix(s_full)
        if s_act is None:
            return None
        if entry == DEPOLARIZING:
            plan.append((prob, s_act, DEPOLARIZING, term))
        else:
            u_acts = []
            for u in entry:
                u_full = tensor_embed(
                    LocalOperator(Operator(u, term.op.system), term.support), system
                ).matrix
                u_act = _SignedPermutation.from_matrix(u_full)
                if u_act is None:
                    return None
                u_acts.append(u_act)
            plan.append((prob, s_act, tuple(u_acts), term))

    from .core import join_on_support, partial_trace_matrix

    def step(rho: np.ndarray) -> np.ndarray:
        # input must be Hermitian (guaranteed along channel iteration);
        # then rho S = (S rho)^dag for the Hermitian stabilizer S.
        out = np.zeros((d, d), dtype=complex)
        for prob, s_act, entry, term in plan:
            s_rho = s_act.left(rho)
            rho_s = s_rho.conj().T
            s_rho_s = s_act.left(rho_s)
            even = rho + s_rho_s
            cross = s_rho + rho_s
            p_rho_p = even + cross
            p_rho_p *= 0.25
            h_rho_h = even
            h_rho_h -= cross
            h_rho_h *= 0.25
            if entry == DEPOLARIZING:
                k = term.op.dim
                if len(term.support) == system.n_sites:
                    corr = (np.trace(h_rho_h) / k) * np.eye(d, dtype=complex)
                else:
                    reduced = partial_trace_matrix(h_rho_h, system.dims, term.support)
                    corr = join_on_support(
                        np.eye(k, dtype=complex) / k, term.support, reduced, system
                    )
            else:
                m = len(entry)
                corr = entry[0].conjugate(h_rho_h)
                for u_act in entry[1:]:
                    corr += u_act.conjugate(h_rho_h)
                if m > 1:
                    corr *= 1.0 / m
            p_rho_p += corr
            p_rho_p *= prob
            out += p_rho_p
        return out

    return step


# --- graphs ---------------------------------------------------------------------


@dataclass(frozen=True)
class GraphSpec:
    """Undirected simple graph: vertex count and edge list."""

    n_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __init__(self, n_vertices: int, edges: Iterable[tuple[int, int]]):
        n = int(n_vertices)
        if n < 1:
            raise DimensionError("need at least one vertex")
        seen = set()
        norm = []
        for a, b in edges:
            a, b = int(a), int(b)
            if a == b:
                raise DimensionError(f"self-loop at vertex {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise DimensionError(f"edge ({a},{b}) outside graph")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise DimensionError(f"duplicate edge {key}")
            seen.add(key)
            norm.append(key)
        object.__setattr__(self, "n_vertices", n)
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    def neighbors(self, v: int) -> tuple[int, ...]:
        out = []
        for a, b in self.edges:
            if a == v:
                out.append(b)
            elif b == v:
                out.append(a)
        return tuple(sorted(out))

    @classmethod
    def path(cls, n: int) -> "GraphSpec":
        return cls(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def ring(cls, n: int) -> "GraphSpec":
        return cls(n, [(i, (i + 1) % n) for i in range(n)])


def graph_vertex_term(g: GraphSpec, v: int, system: SiteSystem) -> LocalOperator:
    """(1 - X_v Z_neighbors)/2 as a local projector on vertex + neighbors."""
    nbrs = g.neighbors(v)
    labels = "X" + "Z" * len(nbrs)
    stab = pauli_string(labels)
    h = 0.5 * (np.eye(stab.shape[0], dtype=complex) - stab)
    return local_operator(h, (v, *nbrs), system)


def graph_hamiltonian(g: GraphSpec) -> FrustrationFreeHamiltonian:
    """One stabilizer projector per vertex; unique ground state is the
    graph state."""
    system = SiteSystem((2,) * g.n_vertices)
    terms = [graph_vertex_term(g, v, system) for v in range(g.n_vertices)]
    return FrustrationFreeHamiltonian(system, terms)


def graph_state_ket(g: GraphSpec) -> np.ndarray:
    """|+...+> with a controlled-Z applied across every edge."""
    n = g.n_vertices
    vec = np.full(2**n, 2 ** (-n / 2), dtype=complex)
    system = SiteSystem((2,) * n)
    for a, b in g.edges:
        for idx in range(2**n):
            cfg = system.config_of(idx)
            if cfg[a] == 1 and cfg[b] == 1:
                vec[idx] = -vec[idx]
    return vec


def graph_liouvillian(g: GraphSpec) -> LindbladModel:
    """Jump operators Z_v * H_v, one per vertex.

    Since the terms are commuting projectors and Z_v is unitary, the jump
    rates sum back to the Hamiltonian, and the generator's spectrum is the
    set {-(h_a + h_b)/2} over pairs of eigenvalues of the total Hamiltonian.
    """
    H = graph_hamiltonian(g)
    system = H.system
    jumps = []
    for v, term in zip(range(g.n_vertices), H.terms):
        z_local = pauli_string("Z" + "I" * (len(term.support) - 1))
        op = z_local @ term.op.matrix
        jumps.append(tensor_embed(LocalOperator(Operator(op, term.op.system), term.support), system))
    return LindbladModel(system, jumps)


def pairwise_decay_spectrum(H: FrustrationFreeHamiltonian) -> np.ndarray:
    """{-(h_a + h_b)/2 : h_a, h_b eigenvalues of the total Hamiltonian}."""
    w = np.linalg.eigvalsh(H.total_matrix())
    return np.sort((-0.5 * (w[:, None] + w[None, :])).reshape(-1))


# --- stabilizer corrections -------------------------------------------------------

_SINGLE_PAULIS = {"X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}
_ANTICOMMUTING = {"X": "Z", "Y": "X", "Z": "X"}


def _pauli_decompose(mat: np.ndarray, n_qubits: int) -> dict[str, complex]:
    """Coefficients of a small operator in the Pauli-string basis."""
    out = {}
    dim = 2**n_qubits
    for labels in itertools.product("IXYZ", repeat=n_qubits):
        s = "".join(labels)
        p = pauli_string(s)
        coeff = np.trace(p.conj().T @ mat) / dim
        if abs(coeff) > 1e-12:
            out[s] = complex(coeff)
    return out


def _stabilizer_labels(term: LocalOperator) -> str:
    dims = term.op.system.dims
    if any(d != 2 for d in dims):
        raise ValueError("stabilizer terms are defined on qubits")
    n = len(dims)
    s_mat = np.eye(2**n, dtype=complex) - 2.0 * term.op.matrix
    decomp = _pauli_decompose(s_mat, n)
    if len(decomp) != 1:
        raise ValueError("term is not of the form (1 - S)/2 for a Pauli string S")
    (labels, coeff), = decomp.items()
    if abs(abs(coeff) - 1.0) > 1e-10 or abs(coeff.imag) > 1e-10:
        raise ValueError("stabilizer coefficient must be +-1")
    if all(c == "I" for c in labels):
        raise ValueError("identity stabilizer has no anticommuting partner")
    return labels


def _correction_on_site(term: LocalOperator, labels: str, site: int) -> LocalOperator:
    n = len(labels)
    partner = _ANTICOMMUTING[labels[site]]
    u = ["I"] * n
    u[site] = partner
    u_mat = pauli_string("".join(u))
    # exact anticommutation implies H U H = 0; verify to guard conventions
    h = term.op.matrix
    dev = np.max(np.abs(h @ u_mat @ h))
    if dev > 1e-12:
        raise ValueError(f"correction failed the H U H = 0 check: {dev:.3e}")
    return LocalOperator(Operator(u_mat, term.op.system), term.support)


def stabilizer_correction(term: LocalOperator) -> LocalOperator:
    """A single-qubit Pauli U on one support site with H U H = 0.

    The term must be (1 - S)/2 for a Pauli string S; any single-qubit Pauli
    anticommuting with S flips the stabilizer eigenspace, which kills
    repeated negative outcomes on the same region.
    """
    labels = _stabilizer_labels(term)
    site = next(k for k, c in enumerate(labels) if c != "I")
    return _correction_on_site(term, labels, site)


def stabilizer_correction_set(term: LocalOperator) -> list[LocalOperator]:
    """One anticommuting single-qubit Pauli per non-identity support site."""
    labels = _stabilizer_labels(term)
    return [
        _correction_on_site(term, labels, k)
        for k, c in enumerate(labels)
        if c != "I"
    ]


# --- toric code --------------------------------------------------------------------


def toric_code(lx: int, ly: int, qubit_budget: int = 12) -> FrustrationFreeHamiltonian:
    """Star and plaquette projector terms on an lx-by-ly torus.

    Qubits sit on the 2*lx*ly edges; stars are X-type on the four edges at a
    vertex, plaquettes Z-type on the four edges of a face.  The ground space
    is four-fold degenerate.
    """
    if lx < 2 or ly < 2:
        raise DimensionError("torus needs lx, ly >= 2")
    n_qubits = 2 * lx * ly
    if n_qubits > qubit_budget:
        raise BudgetExceeded(f"{n_qubits} qubits exceed budget {qubit_budget}")
    system = SiteSystem((2,) * n_qubits)

    def h_edge(x: int, y: int) -> int:
        return 2 * ((y % ly) * lx + (x % lx))

    def v_edge(x: int, y: int) -> int:
        return h_edge(x, y) + 1

    terms = []
    for y in range(ly):
        for x in range(lx):
            star = (h_edge(x, y), h_edge(x - 1, y), v_edge(x, y), v_edge(x, y - 1))
            terms.append(_pauli_projector_term("X", star, system))
    for y in range(ly):
        for x in range(lx):
            plaq = (h_edge(x, y), h_edge(x, y + 1), v_edge(x, y), v_edge(x + 1, y))
            terms.append(_pauli_projector_term("Z", plaq, system))
    return FrustrationFreeHamiltonian(system, terms)


def _pauli_projector_term(letter: str, support: tuple[int, ...], system: SiteSystem) -> LocalOperator:
    support = tuple(dict.fromkeys(support))  # preserve order, drop repeats
    stab = pauli_string(letter * len(support))
    h = 0.5 * (np.eye(stab.shape[0], dtype=complex) - stab)
    return local_operator(h, support, system)


# --- convergence driving -------------------------------------------------------------


@dataclass
class ConvergenceTrace:
    """Per-step records of the measure-and-correct iteration."""

    steps: list[int] = field(default_factory=list)
    energies: list[float] = field(default_factory=list)
    overlaps: list[float] = field(default_factory=list)
    deltas: list[float] = field(default_factory=list)
    converged: bool = False
    steps_to_threshold: int | None = None
    final: DensityMatrix | None = None


def run_to_convergence(
    ch: CpMapChannel,
    H: FrustrationFreeHamiltonian,
    rho0: DensityMatrix,
    tol: float = 1e-6,
    max_steps: int = 500,
) -> ConvergenceTrace:
    """Iterate the channel until tr[H rho] <= tol or the step budget runs out.

    A budget overrun is reported on the trace (converged=False), not raised.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    total_t = H.total_matrix().T.copy()
    ground_t = H.ground_projector().matrix.T.copy()
    trace = ConvergenceTrace()
    rho = rho0.matrix
    prev = rho
    for step in range(max_steps + 1):
        energy = float(np.real(np.sum(total_t * rho)))
        olap = float(np.real(np.sum(ground_t * rho)))
        delta = float(np.max(np.abs(rho - prev))) if step else 0.0
        trace.steps.append(step)
        trace.energies.append(energy)
        trace.overlaps.append(olap)
        trace.deltas.append(delta)
        if energy <= tol:
            trace.converged = True
            trace.steps_to_threshold = step
            break
        prev = rho
        rho = apply_channel_matrix(ch, rho)
    trace.final = DensityMatrix.trusted(rho, H.system)
    return trace


def estimate_repeat_failure(
    H: FrustrationFreeHamiltonian,
    corr: CorrectionSet,
    samples: int = 20,
    seed: int = 0,
    steps_per_sample: int = 30,
) -> float:
    """Worst observed probability that a region fails its measurement twice
    in a row, over sampled measure-and-correct trajectories.

    When every correction is a unitary set with H U H = 0 the repeat
    probability vanishes identically and 0.0 is returned without sampling.
    Deterministic for a fixed seed.  Depolarizing corrections are sampled.
    """
    # certified stabilizer shortcut
    all_unitary = all(entry != DEPOLARIZING for _, entry in corr.entries)
    if all_unitary:
        certified = True
        for term, (_, entry) in zip(H.terms, corr.entries):
            h = term.op.matrix
            for u in entry:
                if np.max(np.abs(h @ u @ h)) > 1e-12:
                    certified = False
                    break
            if not certified:
                break
        if certified:
            return 0.0

    rng = np.random.default_rng(seed)
    system = H.system
    d = system.total_dim
    probs = np.array([p for p, _ in corr.entries])
    probs = probs / probs.sum()
    embedded_h = H.embedded_terms()
    embedded_p = [np.eye(d) - h for h in embedded_h]
    worst = 0.0
    for _ in range(samples):
        vecr = rng.normal(size=d) + 1j * rng.normal(size=d)
        vecr /= np.linalg.norm(vecr)
        rho = np.outer(vecr, vecr.conj())
        for _ in range(steps_per_sample):
            lam = int(rng.choice(len(probs), p=probs))
            p_neg = float(np.real(np.trace(embedded_h[lam] @ rho)))
            p_neg = min(max(p_neg, 0.0), 1.0)
            if rng.random() < p_neg:
                rho = embedded_h[lam] @ rho @ embedded_h[lam] / p_neg
                _, entry = corr.entries[lam]
                term = H.terms[lam]
                if entry == DEPOLARIZING:
                    k = term.op.dim
                    if len(term.support) == system.n_sites:
                        rho = np.trace(rho) / k * np.eye(d, dtype=complex)
                    else:
                        rest = partial_trace_on(rho, system, term.support)
                        rho = _refill(np.eye(k, dtype=complex) / k, term.support, rest, system)
                else:
                    u = entry[int(rng.integers(len(entry)))]
                    u_full = tensor_embed(
                        LocalOperator(Operator(u, term.op.system), term.support), system
                    ).matrix
                    rho = u_full @ rho @ u_full.conj().T
                repeat = float(np.real(np.trace(embedded_h[lam] @ rho)))
                worst = max(worst, repeat)
            else:
                p_pos = 1.0 - p_neg
                if p_pos <= 0:
                    continue
                rho = embedded_p[lam] @ rho @ embedded_p[lam] / p_pos
            rho = 0.5 * (rho + rho.conj().T)
    return worst


def partial_trace_on(rho: np.ndarray, system: SiteSystem, support: Sequence[int]) -> np.ndarray:
    from .core import partial_trace_matrix

    return partial_trace_matrix(rho, system.dims, support)


def _refill(local_mat: np.ndarray, support: Sequence[int], rest_mat: np.ndarray, system: SiteSystem) -> np.ndarray:
    from .core import join_on_support

    return join_on_support(local_mat, support, rest_mat, system)


def cluster_chain(n: int) -> FrustrationFreeHamiltonian:
    """Graph-state Hamiltonian of the n-site path (1D cluster chain)."""
    return graph_hamiltonian(GraphSpec.path(n))
