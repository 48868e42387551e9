"""Compile quantum circuits into purely dissipative Lindblad models.

A circuit on N qubits with gates U_1..U_T is turned into a jump-operator
set on system (x) clock whose steady state is the uniform mixture over
partially applied circuits correlated with a clock register,

    rho_0 = 1/(T+1) sum_t |psi_t><psi_t| (x) |t><t|,

from which the circuit output is read off by measuring the clock.  The
fixed point is unique from depth two on (a depth-one clock keeps one dark
coherence; see the README).  Two clock layouts are provided: a single
factor of dimension T+1 ("direct") and a unary register of T+1 qubits
where time t is the string 1^(t+1) 0^(T-t), which makes every jump
strictly local ("unary").

The clock relaxation decouples from the logical content, so the decay
spectrum reduces to small tridiagonal blocks indexed by the Hamming weights
of the logical bra/ket strings; those blocks are exposed here as an
independent analytic oracle for the numerically computed gap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import (
    DimensionError,
    DensityMatrix,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SiteSystem,
    UNITARITY_TOL,
    apply_gate_to_ket,
    local_operator,
    tensor_embed,
)
from .liouville import LindbladModel, NumericalFailure

P0 = np.array([[1, 0], [0, 0]], dtype=complex)
P1 = np.array([[0, 0], [0, 1]], dtype=complex)

# Qubit resets run at rate 2 (amplitude sqrt(2)), so a logical excitation on
# either side of a clock-zero matrix element contributes one full unit of
# decay.  This is what makes the slowest decay block tridiagonal with corner
# -(1 + w_ket + w_bra) and hence the gap exactly |2 cos(pi/(2T+3)) - 2|;
# rate-1 resets would halve those weights and give a different (smaller) gap.
RESET_AMPLITUDE = float(np.sqrt(2.0))


class BudgetExceeded(RuntimeError):
    """Requested instance is larger than the configured dimension budget."""


@dataclass(frozen=True)
class Gate:
    support: tuple[int, ...]
    matrix: np.ndarray

    def __init__(self, support: Iterable[int], matrix):
        support = tuple(int(s) for s in support)
        mat = np.asarray(matrix, dtype=complex)
        if len(support) not in (1, 2):
            raise DimensionError("gates act on one or two qubits")
        if len(set(support)) != len(support):
            raise DimensionError("gate support indices must be distinct")
        if mat.shape != (2 ** len(support),) * 2:
            raise DimensionError(
                f"gate on {len(support)} qubit(s) needs shape "
                f"{(2 ** len(support),) * 2}, got {mat.shape}"
            )
        dev = np.max(np.abs(mat.conj().T @ mat - np.eye(mat.shape[0])))
        if dev > UNITARITY_TOL:
            raise ValueError(f"gate is not unitary: deviation {dev:.3e}")
        mat = np.ascontiguousarray(mat)
        mat.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "matrix", mat)


@dataclass(frozen=True)
class QuantumCircuit:
    """Ordered gate list on ``n_qubits`` qubits (supports need not be
    nearest neighbors)."""

    n_qubits: int
    gates: tuple[Gate, ...]

    def __init__(self, n_qubits: int, gates: Iterable[Gate]):
        gates = tuple(gates)
        if n_qubits < 1:
            raise DimensionError("need at least one qubit")
        if len(gates) < 1:
            raise DimensionError("need at least one gate")
        for g in gates:
            if any(s < 0 or s >= n_qubits for s in g.support):
                raise DimensionError(f"gate support {g.support} outside circuit")
        object.__setattr__(self, "n_qubits", int(n_qubits))
        object.__setattr__(self, "gates", gates)

    @property
    def n_gates(self) -> int:
        return len(self.gates)


def identity_circuit_like(circuit: QuantumCircuit) -> QuantumCircuit:
    """Same shape (qubit count and gate supports) with identity gates."""
    gates = [
        Gate(g.support, np.eye(2 ** len(g.support), dtype=complex))
        for g in circuit.gates
    ]
    return QuantumCircuit(circuit.n_qubits, gates)


@dataclass(frozen=True)
class CompiledDQC:
    """A circuit compiled to a jump-only Lindblad model on system (x) clock."""

    model: LindbladModel
    encoding: str  # "direct" or "unary"
    clock_sites: tuple[int, ...]
    circuit: QuantumCircuit

    @property
    def system(self) -> SiteSystem:
        return self.model.system


def compile_direct(circuit: QuantumCircuit) -> CompiledDQC:
    """Direct clock encoding: one extra tensor factor of dimension T+1.

    Jump operators:
      * qubit resets conditioned on clock zero, |0><1|_i (x) |0><0|_clock,
      * one clock hopper per gate, U_{t+1} (x) |t+1><t| + U_{t+1}^dag (x)
        |t><t+1| for t = 0..T-1, so each hopper connects two existing clock
        levels.
    """
    n = circuit.n_qubits
    T = circuit.n_gates
    clock = n  # clock is the last tensor factor
    system = SiteSystem((2,) * n + (T + 1,))

    ketbra = lambda a, b: np.outer(_clock_ket(T, a), _clock_ket(T, b).conj())
    jumps = []
    for i in range(n):
        op = RESET_AMPLITUDE * np.kron(SIGMA_MINUS, ketbra(0, 0))
        jumps.append(tensor_embed(local_operator(op, (i, clock), system), system))
    for t, gate in enumerate(circuit.gates):
        U = gate.matrix
        op = np.kron(U, ketbra(t + 1, t)) + np.kron(U.conj().T, ketbra(t, t + 1))
        support = gate.support + (clock,)
        jumps.append(tensor_embed(local_operator(op, support, system), system))

    model = LindbladModel(system, jumps)
    return CompiledDQC(model=model, encoding="direct", clock_sites=(clock,), circuit=circuit)


def _clock_ket(T: int, t: int) -> np.ndarray:
    v = np.zeros(T + 1, dtype=complex)
    v[t] = 1.0
    return v


# --- unary clock ----------------------------------------------------------------


def unary_clock_bits(T: int, t: int) -> tuple[int, ...]:
    """Clock time t as a unary register of T+1 qubits: t+1 leading ones."""
    if t < 0 or t > T:
        raise DimensionError(f"clock time {t} outside 0..{T}")
    return tuple(1 if j <= t else 0 for j in range(T + 1))


def compile_unary(circuit: QuantumCircuit, dim_budget: int = 4096) -> CompiledDQC:
    """Unary clock encoding: T+1 clock qubits, every jump strictly local.

    Valid clock states are 1^(t+1) 0^(T-t); the leading always-one qubit
    anchors the domain wall.  Jumps:
      * gate hoppers flipping clock qubit t+1 between the flanking
        conditions (qubit t is 1, qubit t+2 is 0), with U on the raising
        part and U^dag on the lowering part,
      * qubit resets conditioned on clock qubit 1 being 0 (time zero),
      * wall cleaners |0><0| (x) |0><1| on adjacent clock pairs, which decay
        any 1 that follows a 0,
      * an anchor raiser |1><0| on clock qubit 0, which removes the
        all-zeros dark state outside the unary subspace.
    """
    n = circuit.n_qubits
    T = circuit.n_gates
    total = 2**n * 2 ** (T + 1)
    if total > dim_budget:
        raise BudgetExceeded(
            f"unary model dimension {total} exceeds budget {dim_budget}"
        )
    system = SiteSystem((2,) * (n + T + 1))
    clock_sites = tuple(range(n, n + T + 1))

    jumps = []
    # qubit resets: time zero <=> second clock qubit is 0
    for i in range(n):
        op = RESET_AMPLITUDE * np.kron(SIGMA_MINUS, P0)
        jumps.append(
            tensor_embed(local_operator(op, (i, clock_sites[1]), system), system)
        )
    # gate hoppers
    for t, gate in enumerate(circuit.gates):
        U = gate.matrix
        raise_part = [P1, SIGMA_PLUS]
        lower_part = [P1, SIGMA_MINUS]
        csites = [clock_sites[t], clock_sites[t + 1]]
        if t + 2 <= T:
            raise_part.append(P0)
            lower_part.append(P0)
            csites.append(clock_sites[t + 2])
        op = np.kron(U, _kron_chain(raise_part)) + np.kron(
            U.conj().T, _kron_chain(lower_part)
        )
        support = gate.support + tuple(csites)
        jumps.append(tensor_embed(local_operator(op, support, system), system))
    # wall cleaners
    for q in range(T):
        op = np.kron(P0, SIGMA_MINUS)
        jumps.append(
            tensor_embed(
                local_operator(op, (clock_sites[q], clock_sites[q + 1]), system),
                system,
            )
        )
    # anchor raiser
    jumps.append(
        tensor_embed(local_operator(SIGMA_PLUS, (clock_sites[0],), system), system)
    )

    model = LindbladModel(system, jumps)
    return CompiledDQC(model=model, encoding="unary", clock_sites=clock_sites, circuit=circuit)


def _kron_chain(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def unary_valid_indices(compiled: CompiledDQC) -> np.ndarray:
    """Basis indices of system (x) valid-unary-clock states, ordered with
    the clock time as the slow index mapping onto the direct layout."""
    if compiled.encoding != "unary":
        raise ValueError("expects a unary-compiled model")
    circ = compiled.circuit
    n, T = circ.n_qubits, circ.n_gates
    system = compiled.system
    idx = []
    for logical in range(2**n):
        bits = [(logical >> (n - 1 - i)) & 1 for i in range(n)]
        for t in range(T + 1):
            config = tuple(bits) + unary_clock_bits(T, t)
            idx.append(system.index_of(config))
    return np.asarray(idx, dtype=int)


def liouville_block_split(model: LindbladModel, valid_indices: np.ndarray):
    """Split a generator into (valid, invalid) vectorized blocks.

    Returns (right_block, wrong_block, coupling_norm) where coupling_norm
    measures leakage from the valid block into the invalid one (should be
    zero when the valid subspace is invariant).
    """
    from .liouville import assemble_generator

    sop = assemble_generator(model)
    d = model.system.total_dim
    valid = np.asarray(sorted(int(i) for i in valid_indices))
    # column stacking: vec index = row + d * col
    pair_valid = (valid[None, :] * d + valid[:, None]).reshape(-1)
    mask = np.zeros(d * d, dtype=bool)
    mask[pair_valid] = True
    wrong = np.nonzero(~mask)[0]
    mat = sop.matrix
    right_block = mat[np.ix_(pair_valid, pair_valid)]
    wrong_block = mat[np.ix_(wrong, wrong)]
    coupling = float(np.max(np.abs(mat[np.ix_(wrong, pair_valid)]))) if len(wrong) else 0.0
    return right_block, wrong_block, coupling


# --- fixed point and readout -----------------------------------------------------


def circuit_states(circuit: QuantumCircuit) -> list[np.ndarray]:
    """State-vector history psi_0..psi_T of the circuit from |0..0>."""
    n = circuit.n_qubits
    system = SiteSystem((2,) * n)
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1.0
    out = [psi]
    for gate in circuit.gates:
        psi = apply_gate_to_ket(psi, system, gate.support, gate.matrix)
        out.append(psi)
    return out


def expected_fixed_point(circuit: QuantumCircuit) -> DensityMatrix:
    """Uniform clock-correlated mixture over the circuit history."""
    T = circuit.n_gates
    states = circuit_states(circuit)
    blocks = []
    for t, psi in enumerate(states):
        proj = np.outer(psi, psi.conj())
        e = np.zeros((T + 1, T + 1), dtype=complex)
        e[t, t] = 1.0
        blocks.append(np.kron(proj, e))
    rho = sum(blocks) / (T + 1)
    system = SiteSystem((2,) * circuit.n_qubits + (T + 1,))
    return DensityMatrix.trusted(rho, system)


def readout(rho: DensityMatrix, circuit: QuantumCircuit) -> tuple[float, DensityMatrix]:
    """Measure the clock; on outcome T return the post-measurement system state.

    Returns (probability of clock reading T, normalized system state).
    """
    n, T = circuit.n_qubits, circuit.n_gates
    if rho.system.dims != (2,) * n + (T + 1,):
        raise DimensionError("state does not live on system (x) direct clock")
    dims = rho.system.dims
    d_sys = 2**n
    tens = rho.matrix.reshape(d_sys, T + 1, d_sys, T + 1)
    block = tens[:, T, :, T]
    p = float(np.trace(block).real)
    if p < 1e-12:
        raise NumericalFailure(
            f"clock outcome T has probability {p:.3e}; state has not converged"
        )
    out = block / p
    out = 0.5 * (out + out.conj().T)
    return p, DensityMatrix.trusted(out, SiteSystem((2,) * n))


# --- analytic decay blocks -------------------------------------------------------


@dataclass(frozen=True)
class BlockSpec:
    """Clock-decay block labelled by the Hamming weights of the logical
    bra/ket strings."""

    weight_ket: int
    weight_bra: int
    T: int

    def __post_init__(self):
        if self.weight_ket < 0 or self.weight_bra < 0:
            raise ValueError("Hamming weights are nonnegative")
        if self.T < 1:
            raise ValueError("need at least one gate")


def analytic_block_matrix(spec: BlockSpec) -> np.ndarray:
    """The (T+1)-dimensional tridiagonal decay block for given weights.

    Diagonal: -(1 + w_ket + w_bra) at clock 0, -2 in the interior, -1 at
    clock T; hopping 1 on every bond.
    """
    T = spec.T
    diag = np.full(T + 1, -2.0)
    diag[0] = -(1.0 + spec.weight_ket + spec.weight_bra)
    diag[T] = -1.0
    mat = np.diag(diag)
    for t in range(T):
        mat[t, t + 1] = 1.0
        mat[t + 1, t] = 1.0
    return mat


def analytic_block_eigenvalues(spec: BlockSpec) -> np.ndarray:
    """Eigenvalues of the tridiagonal block, ascending."""
    return np.linalg.eigvalsh(analytic_block_matrix(spec))


def scalar_block_values(weight_ket: int, weight_bra: int) -> list[float]:
    return [-2.0, -1.0 - weight_ket, -1.0 - weight_bra]


def two_by_two_block_eigenvalues(weight_ket: int, weight_bra: int) -> np.ndarray:
    a = np.linalg.eigvals(
        np.array([[-1.0 - weight_ket, 1.0], [1.0, -1.0 - weight_bra]])
    )
    b = np.linalg.eigvals(np.array([[-2.0, 1.0], [2.0, -2.0]]))
    return np.concatenate([a, b])


def closed_form_gap(T: int) -> float:
    """|2 (cos(pi / (2T+3)) - 1)|: the slowest decay rate of the compiled
    generator, attained for logical Hamming weights summing to one."""
    return abs(2.0 * (np.cos(np.pi / (2 * T + 3)) - 1.0))


def zero_block_second_eigenvalue(T: int) -> float:
    """Second eigenvalue of the weight-(0,0) block, 2 (cos(pi/(T+1)) - 1)."""
    return 2.0 * (np.cos(np.pi / (T + 1)) - 1.0)


def gauge_transform_check(circuit: QuantumCircuit, tol: float = 1e-8) -> bool:
    """True iff the compiled spectrum matches the identity-gate circuit's.

    The spectrum of the compiled generator is independent of the actual
    gates; this verifies it by two full eigensolves.
    """
    from .liouville import assemble_generator

    a = np.linalg.eigvals(assemble_generator(compile_direct(circuit).model).matrix)
    b = np.linalg.eigvals(
        assemble_generator(compile_direct(identity_circuit_like(circuit)).model).matrix
    )
    return _spectra_match(a, b, tol)


def _spectra_match(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    if len(a) != len(b):
        return False
    ka = np.lexsort((a.imag, a.real))
    kb = np.lexsort((b.imag, b.real))
    return bool(np.max(np.abs(a[ka] - b[kb])) <= tol)
