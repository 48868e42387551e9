"""Engineering a target jump operator from coherent coupling to a lossy
ancilla qubit.

The system is coupled to an ancilla through H = Omega (L^dag sigma_- +
L sigma_+), with the ancilla decaying at rate Gamma.  For Gamma >> Omega the
ancilla excited level can be eliminated and the reduced system dynamics
approaches a single-jump master equation with jump proportional to L at a
rate scaling as Omega^2 / Gamma.  The numeric prefactor is fitted, never
assumed; the checks here verify the scaling exponent and the convergence of
the reduced dynamics to the fitted effective model.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import (
    DensityMatrix,
    Operator,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SiteSystem,
    partial_trace,
)
from .liouville import (
    LindbladModel,
    NumericalFailure,
    assemble_generator,
    evolve_grid,
    steady_state_matrix,
)


class FitFailure(NumericalFailure):
    """Decay-rate fit did not find a usable exponential window."""


@dataclass(frozen=True)
class AncillaEmbedding:
    """Target jump on the system plus coupling and ancilla decay rates."""

    target_jump: Operator
    omega: float
    gamma: float

    def __post_init__(self):
        if self.omega <= 0 or self.gamma <= 0:
            raise ValueError("omega and gamma must be positive")
        if self.gamma / self.omega < 1.0:
            warnings.warn(
                "gamma/omega < 1: outside the elimination regime, diagnostics "
                "will be unreliable",
                RuntimeWarning,
                stacklevel=2,
            )


def embed_with_ancilla(e: AncillaEmbedding) -> LindbladModel:
    """System (x) one ancilla qubit: H = Omega (L^dag (x) sigma_- +
    L (x) sigma_+), single jump sqrt(Gamma) (1 (x) sigma_-)."""
    sys_dims = e.target_jump.system.dims
    system = SiteSystem(sys_dims + (2,))
    L = e.target_jump.matrix
    ham = e.omega * (np.kron(L.conj().T, SIGMA_MINUS) + np.kron(L, SIGMA_PLUS))
    jump = np.sqrt(e.gamma) * np.kron(np.eye(L.shape[0], dtype=complex), SIGMA_MINUS)
    return LindbladModel(
        system,
        jumps=[Operator(jump, system)],
        hamiltonian=Operator(ham, system),
    )


def embed_many(jumps: list[Operator], omega: float, gamma: float) -> LindbladModel:
    """One lossy ancilla per target jump, all coupled at the same rates."""
    if not jumps:
        raise ValueError("need at least one target jump")
    sys_dims = jumps[0].system.dims
    n_anc = len(jumps)
    system = SiteSystem(sys_dims + (2,) * n_anc)
    d_sys = jumps[0].dim
    dim = system.total_dim
    ham = np.zeros((dim, dim), dtype=complex)
    ops = []
    for i, jump_op in enumerate(jumps):
        if jump_op.dim != d_sys:
            raise ValueError("target jumps must share the system dimension")
        before = 2**i
        after = 2 ** (n_anc - i - 1)
        sm = np.kron(np.kron(np.eye(before), SIGMA_MINUS), np.eye(after))
        sp = sm.conj().T
        L = jump_op.matrix
        ham += omega * (np.kron(L.conj().T, sm) + np.kron(L, sp))
        ops.append(Operator(np.sqrt(gamma) * np.kron(np.eye(d_sys), sm), system))
    return LindbladModel(system, jumps=ops, hamiltonian=Operator(ham, system))


def effective_model(target_jump: Operator, rate: float) -> LindbladModel:
    """Single-jump master equation sqrt(rate) L on the system alone."""
    return LindbladModel(
        target_jump.system, jumps=[Operator(np.sqrt(rate) * target_jump.matrix, target_jump.system)]
    )


def fit_decay_rate(times: np.ndarray, values: np.ndarray, floor: float = 1e-9) -> float:
    """Least-squares slope of log(values) on the window where the signal is
    clean (above the floor, below 90% of the initial value)."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    mask = (values > floor) & (values < 0.9 * values[0])
    if np.sum(mask) < 5:
        raise FitFailure("fewer than five usable points in the decay window")
    slope, _ = np.polyfit(times[mask], np.log(values[mask]), 1)
    if slope >= 0:
        raise FitFailure(f"no decay found (slope {slope:.3e})")
    return float(-slope)


def _decay_observable(e: AncillaEmbedding) -> tuple[DensityMatrix, np.ndarray]:
    """Initial state and system observable whose expectation decays.

    For lowering-type targets the excited population of the highest level is
    tracked from the corresponding basis state.
    """
    d = e.target_jump.dim
    sys_dims = e.target_jump.system.dims
    full = SiteSystem(sys_dims + (2,))
    vec = np.zeros(2 * d, dtype=complex)
    vec[2 * (d - 1)] = 1.0  # system highest level, ancilla ground
    rho0 = DensityMatrix.trusted(np.outer(vec, vec.conj()), full)
    obs = np.zeros((d, d), dtype=complex)
    obs[d - 1, d - 1] = 1.0
    return rho0, obs


@dataclass(frozen=True)
class EliminationReport:
    ratios: tuple[float, ...]
    fitted_rates: tuple[float, ...]
    scaling_exponent: float
    prefactors: tuple[float, ...]  # fitted rate * Gamma / Omega^2
    mismatches: tuple[float, ...]  # max trace distance reduced vs effective
    steady_gaps: tuple[float, ...]  # trace distance of reduced vs effective steady states


def elimination_check(
    e: AncillaEmbedding,
    horizon: float | None = None,
    n_points: int = 120,
) -> tuple[float, float]:
    """Fitted effective rate and the worst reduced-vs-effective trace
    distance over the horizon (default five fitted lifetimes)."""
    model = embed_with_ancilla(e)
    sop = assemble_generator(model)
    rho0, obs = _decay_observable(e)
    guess = 4.0 * e.omega**2 / e.gamma  # grid scale only; the rate is fitted
    t_max = horizon if horizon is not None else 5.0 / guess
    times = np.linspace(0.0, t_max, n_points)
    states = evolve_grid(sop, rho0, times)
    anc_site = [len(model.system.dims) - 1]
    reduced = [partial_trace(s, anc_site) for s in states]
    pops = np.array([float(np.real(np.trace(obs @ r.matrix))) for r in reduced])
    rate = fit_decay_rate(times, pops)

    eff = assemble_generator(effective_model(e.target_jump, rate))
    rho0_sys = partial_trace(rho0, anc_site)
    eff_states = evolve_grid(eff, rho0_sys, times)
    from .core import trace_distance

    mismatch = max(trace_distance(a, b) for a, b in zip(reduced, eff_states))
    return rate, mismatch


def elimination_sweep(
    target_jump: Operator,
    omega: float = 1.0,
    ratios: tuple[float, ...] = (10.0, 30.0, 100.0),
    horizon: float | None = None,
) -> EliminationReport:
    """Sweep Gamma/Omega, fit rates, and fit the rate-vs-Gamma exponent."""
    rates, mismatches, prefs, steads = [], [], [], []
    for ratio in ratios:
        e = AncillaEmbedding(target_jump, omega=omega, gamma=ratio * omega)
        rate, mismatch = elimination_check(e, horizon=horizon)
        rates.append(rate)
        mismatches.append(mismatch)
        prefs.append(rate * e.gamma / e.omega**2)
        steads.append(_steady_gap(e, rate))
    exponent = float(np.polyfit(np.log(np.asarray(ratios) * omega), np.log(rates), 1)[0])
    return EliminationReport(
        ratios=tuple(float(r) for r in ratios),
        fitted_rates=tuple(rates),
        scaling_exponent=exponent,
        prefactors=tuple(prefs),
        mismatches=tuple(mismatches),
        steady_gaps=tuple(steads),
    )


def _steady_gap(e: AncillaEmbedding, rate: float) -> float:
    from .core import trace_distance

    full = assemble_generator(embed_with_ancilla(e))
    full_ss = steady_state_matrix(full)
    sys_dims = e.target_jump.system.dims
    full_system = SiteSystem(sys_dims + (2,))
    reduced = partial_trace(
        DensityMatrix.trusted(full_ss, full_system), [len(sys_dims)]
    )
    eff = assemble_generator(effective_model(e.target_jump, rate))
    eff_ss = steady_state_matrix(eff)
    return trace_distance(reduced, DensityMatrix.trusted(eff_ss, e.target_jump.system))
