"""Acceptance suite: every numbered claim at its stated tolerance.

Each criterion is one test (criterion 7 is split into its three clauses);
a one-line PASS/FAIL summary per criterion is printed at the end of the
run.  Criteria share heavy instances through module-scoped fixtures.
"""

import itertools
import time

import numpy as np
import pytest

from conftest import record_criterion

from dissiplab.core import (
    DensityMatrix,
    Operator,
    SIGMA_MINUS,
    SiteSystem,
    fidelity,
    local_operator,
    overlap,
    pure_state_fidelity,
    qubits,
    random_dm,
    random_pure_dm,
    random_unitary,
    tensor_embed,
    trace_distance,
)
from dissiplab.dqc import (
    Gate,
    QuantumCircuit,
    closed_form_gap,
    compile_direct,
    compile_unary,
    expected_fixed_point,
    liouville_block_split,
    readout,
    unary_valid_indices,
)
from dissiplab.dse import (
    CorrectionSet,
    GraphSpec,
    cluster_chain,
    dse_channel,
    graph_hamiltonian,
    graph_liouvillian,
    graph_state_ket,
    pairwise_decay_spectrum,
    run_to_convergence,
    toric_code,
    validate_hamiltonian,
)
from dissiplab.liouville import (
    CpMapChannel,
    apply_channel_matrix,
    assemble_generator,
    assemble_generator_sparse,
    channel_adjoint,
    channel_superoperator,
    channel_to_generator,
    gap_from_leading,
    leading_spectrum,
    spectral_gap,
    steady_state_matrix,
    unvec,
    vec,
)
from dissiplab.mps import (
    ScheduleParams,
    default_step_budget,
    mps_to_state,
    pair_projectors,
    parent_hamiltonian,
    prepare,
    preparation_channel,
    preset_mps,
)
from dissiplab.reservoir import elimination_sweep

DENSE_LIMIT = 1024


def _random_circuit(n_qubits, depth, rng):
    gates = []
    for t in range(depth):
        if n_qubits >= 2 and t % 2 == 1:
            support = tuple(int(x) for x in rng.choice(n_qubits, 2, replace=False))
            gates.append(Gate(support, random_unitary(4, rng)))
        else:
            gates.append(Gate((int(rng.integers(n_qubits)),), random_unitary(2, rng)))
    return QuantumCircuit(n_qubits, gates)


def _gap_and_near_kernel(model):
    """(gap, zero multiplicity, steady matrix or None) for a compiled model."""
    dim = model.system.total_dim
    if dim * dim <= DENSE_LIMIT:
        sop = assemble_generator(model)
        report = spectral_gap(sop)
        steady = steady_state_matrix(sop) if report.steady_dim == 1 else None
        return report.gap, report.steady_dim, steady
    sparse = assemble_generator_sparse(model)
    vals, vecs = leading_spectrum(sparse, dim, k=6)
    gap, zero_mult = gap_from_leading(vals)
    steady = None
    if zero_mult == 1:
        zi = int(np.argmin(np.abs(vals)))
        mat = unvec(vecs[:, zi], dim)
        mat = mat + mat.conj().T
        mat /= np.trace(mat).real
        steady = 0.5 * (mat + mat.conj().T)
    return gap, zero_mult, steady


@pytest.fixture(scope="module")
def dqc_grid():
    """Compiled instances for criteria 1 and 2: T = 1..6, N = 1..3, 3 gate
    sets each."""
    rng = np.random.default_rng(424242)
    t0 = time.time()
    instances = []
    for depth in range(1, 7):
        for n_qubits in (1, 2, 3):
            for rep in range(3):
                circuit = _random_circuit(n_qubits, depth, rng)
                model = compile_direct(circuit).model
                gap, zero_mult, steady = _gap_and_near_kernel(model)
                instances.append(
                    dict(T=depth, N=n_qubits, rep=rep, circuit=circuit,
                         gap=gap, zero_mult=zero_mult, steady=steady)
                )
    return instances, time.time() - t0


def test_criterion_01_gap_closed_form(dqc_grid):
    instances, elapsed = dqc_grid
    worst = 0.0
    spread = 0.0
    for depth in range(1, 7):
        gaps = [inst["gap"] for inst in instances if inst["T"] == depth]
        closed = closed_form_gap(depth)
        worst = max(worst, max(abs(g - closed) for g in gaps))
        spread = max(spread, max(gaps) - min(gaps))
    ok = worst <= 1e-8 and spread <= 1e-8 and elapsed <= 300.0
    record_criterion(
        "criterion 1 (gap closed form)", ok,
        f"worst |numeric-closed|={worst:.2e}, spread={spread:.2e}, {elapsed:.0f}s",
    )
    assert worst <= 1e-8
    assert spread <= 1e-8
    assert elapsed <= 300.0, f"grid took {elapsed:.0f}s, budget 300s"


def test_criterion_02_steady_state(dqc_grid):
    instances, _ = dqc_grid
    bad_dims = []
    worst_fid = 1.0
    worst_readout = 0.0
    for inst in instances:
        if inst["zero_mult"] != 1:
            bad_dims.append((inst["T"], inst["N"], inst["rep"], inst["zero_mult"]))
            continue
        circuit = inst["circuit"]
        expected = expected_fixed_point(circuit)
        steady_dm = DensityMatrix.trusted(inst["steady"], expected.system)
        worst_fid = min(worst_fid, fidelity(steady_dm, expected))
        p, _ = readout(steady_dm, circuit)
        worst_readout = max(worst_readout, abs(p - 1.0 / (circuit.n_gates + 1)))
    ok = not bad_dims and worst_fid >= 1 - 1e-8 and worst_readout <= 1e-10
    detail = (
        f"worst fidelity={worst_fid:.12f}, worst readout dev={worst_readout:.2e}, "
        f"non-unique kernels={len(bad_dims)}"
    )
    record_criterion("criterion 2 (steady state)", ok, detail)
    assert worst_fid >= 1 - 1e-8
    assert worst_readout <= 1e-10
    assert not bad_dims, (
        f"steady_dim != 1 for {bad_dims}: a single-hopper clock (depth 1) "
        "leaves one clock coherence dark for any gate choice, so the depth-1 "
        "kernel is two-dimensional; see README, 'Known deviations'"
    )


def test_criterion_03_unary_encoding():
    rng = np.random.default_rng(31337)
    t0 = time.time()
    worst_gap = 0.0
    worst_wrong = -np.inf
    for depth in (1, 2):
        for _ in range(2):
            circuit = _random_circuit(1, depth, rng)
            direct_gap = spectral_gap(assemble_generator(compile_direct(circuit).model)).gap
            compiled = compile_unary(circuit)
            unary_gap = spectral_gap(assemble_generator(compiled.model)).gap
            worst_gap = max(worst_gap, abs(direct_gap - unary_gap))
            valid = unary_valid_indices(compiled)
            _, wrong, coupling = liouville_block_split(compiled.model, valid)
            assert coupling < 1e-12
            worst_wrong = max(worst_wrong, float(np.max(np.linalg.eigvals(wrong).real)))
    elapsed = time.time() - t0
    ok = worst_gap <= 1e-8 and worst_wrong <= -1 + 1e-8 and elapsed <= 120.0
    record_criterion(
        "criterion 3 (unary encoding)", ok,
        f"worst gap diff={worst_gap:.2e}, wrong-block max Re={worst_wrong:.6f}, {elapsed:.0f}s",
    )
    assert worst_gap <= 1e-8
    assert worst_wrong <= -1 + 1e-8
    assert elapsed <= 120.0


def test_criterion_04_graph_spectrum_identity():
    t0 = time.time()
    worst_dev = 0.0
    worst_fid = 1.0
    count = 0
    for n in range(1, 5):
        pairs = list(itertools.combinations(range(n), 2))
        for mask in range(2 ** len(pairs)):
            edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
            graph = GraphSpec(n, edges)
            model = graph_liouvillian(graph)
            sop = assemble_generator(model)
            eigs = np.sort(np.linalg.eigvals(sop.matrix).real)
            expected = pairwise_decay_spectrum(graph_hamiltonian(graph))
            worst_dev = max(worst_dev, float(np.max(np.abs(eigs - expected))))
            steady = steady_state_matrix(sop)
            fid = pure_state_fidelity(
                graph_state_ket(graph), DensityMatrix.trusted(steady, model.system)
            )
            worst_fid = min(worst_fid, fid)
            count += 1
    elapsed = time.time() - t0
    ok = worst_dev <= 1e-9 and worst_fid >= 1 - 1e-9 and elapsed <= 300.0
    record_criterion(
        "criterion 4 (graph spectrum identity)", ok,
        f"{count} graphs, worst multiset dev={worst_dev:.2e}, worst fidelity={worst_fid:.12f}, {elapsed:.0f}s",
    )
    assert worst_dev <= 1e-9
    assert worst_fid >= 1 - 1e-9
    assert elapsed <= 300.0


def test_criterion_05_depolarizing_monotone_convergence():
    t0 = time.time()
    ham = cluster_chain(3)
    channel = dse_channel(ham, CorrectionSet.depolarizing(ham.n_terms))
    ground = ham.ground_projector().matrix
    total = ham.total_matrix()
    rng = np.random.default_rng(5150)
    worst_drop = 0.0
    all_reached = True
    for _ in range(100):
        rho = random_dm(ham.system, rng).matrix
        prev = float(np.real(np.trace(ground @ rho)))
        reached = False
        for _ in range(500):
            rho = apply_channel_matrix(channel, rho)
            cur = float(np.real(np.trace(ground @ rho)))
            worst_drop = max(worst_drop, prev - cur)
            prev = cur
            if not reached and float(np.real(np.trace(total @ rho))) <= 1e-6:
                reached = True
        all_reached = all_reached and reached
    elapsed = time.time() - t0
    ok = worst_drop <= 1e-10 and all_reached and elapsed <= 120.0
    record_criterion(
        "criterion 5 (depolarizing monotonicity)", ok,
        f"worst overlap drop={worst_drop:.2e}, all reached 1e-6: {all_reached}, {elapsed:.0f}s",
    )
    assert worst_drop <= 1e-10
    assert all_reached
    assert elapsed <= 120.0


def test_criterion_06_toric_code():
    t0 = time.time()
    ham = toric_code(2, 2)
    report = validate_hamiltonian(ham.system, list(ham.terms))
    channel = dse_channel(ham, CorrectionSet.stabilizer(ham, per_site=True))
    rng = np.random.default_rng(1729)
    worst_energy = 0.0
    worst_overlap = 1.0
    for _ in range(20):
        rho0 = random_pure_dm(ham.system, rng)
        trace = run_to_convergence(channel, ham, rho0, tol=1e-6, max_steps=2000)
        assert trace.converged
        worst_energy = max(worst_energy, trace.energies[-1])
        worst_overlap = min(worst_overlap, trace.overlaps[-1])
    elapsed = time.time() - t0
    ok = (
        report.ground_dimension == 4
        and worst_energy <= 1e-6
        and worst_overlap >= 1 - 1e-6
        and elapsed <= 600.0
    )
    record_criterion(
        "criterion 6 (toric code)", ok,
        f"ground dim={report.ground_dimension}, worst energy={worst_energy:.2e}, "
        f"worst overlap={worst_overlap:.8f}, {elapsed:.0f}s",
    )
    assert report.ground_dimension == 4
    assert worst_energy <= 1e-6
    assert worst_overlap >= 1 - 1e-6
    assert elapsed <= 600.0


@pytest.fixture(scope="module")
def aklt4():
    return preset_mps("aklt", 4)


def test_criterion_07a_fixed_point(aklt4):
    channel = preparation_channel(aklt4, ScheduleParams(C=50.0, n_sites=4))
    target = mps_to_state(aklt4)
    out = apply_channel_matrix(channel, target.matrix)
    dist = trace_distance(DensityMatrix.trusted(out, aklt4.system), target)
    ok = dist <= 1e-10
    record_criterion("criterion 7a (preparation fixed point)", ok, f"|T(psi)-psi|={dist:.2e}")
    assert dist <= 1e-10


def test_criterion_07b_budget_fidelity(aklt4):
    # C = 50: the budget is N^(log2 N + log2 C) = 40000 steps, within the
    # 10^6 cap.  The ring-closing bond only fires with weight
    # eps = 1/(C N^2)^2 = 1/640000 per step, and the measured fidelity-
    # deficit decay rate is ~0.2 eps, so ~1.4e7 steps would be needed for
    # 0.99; the budgeted run stalls near fidelity 0.24.
    t0 = time.time()
    params = ScheduleParams(C=50.0, n_sites=4)
    budget = default_step_budget(4, 50.0)
    trace = prepare(aklt4, params, steps=budget, record_every=budget)
    elapsed = time.time() - t0
    final = trace.fidelities[-1]
    ok = final >= 0.99 and elapsed <= 900.0
    record_criterion(
        "criterion 7b (fidelity within step budget)", ok,
        f"fidelity={final:.4f} after {budget} steps (need >= 0.99), {elapsed:.0f}s",
    )
    assert final >= 0.99, (
        f"fidelity {final:.4f} after the {budget}-step budget: the geometric "
        "level schedule makes the ring-closing bond fire ~1/(C N^2)^2 per "
        "step, which caps budgeted progress at a handful of boundary "
        "corrections; see README, 'Known deviations'"
    )


def test_criterion_07c_error_non_increasing_in_C(aklt4):
    t0 = time.time()
    errors = []
    for C in (10.0, 30.0, 100.0):
        params = ScheduleParams(C=C, n_sites=4)
        budget = default_step_budget(4, C)
        trace = prepare(aklt4, params, steps=budget, record_every=budget)
        errors.append(1.0 - trace.fidelities[-1])
    elapsed = time.time() - t0
    monotone = all(b <= a + 1e-12 for a, b in zip(errors, errors[1:]))
    ok = monotone and elapsed <= 900.0
    record_criterion(
        "criterion 7c (error non-increasing in C)", ok,
        "errors " + ", ".join(f"{e:.6f}" for e in errors) + f", {elapsed:.0f}s",
    )
    assert monotone, f"final errors not monotone: {errors}"
    assert elapsed <= 900.0


def test_criterion_08_parent_structure(aklt4):
    proj = pair_projectors(aklt4)
    rank = int(round(np.trace(proj.range_projector).real))
    ham = parent_hamiltonian(aklt4)
    report = validate_hamiltonian(ham.system, list(ham.terms))
    ok = rank == 4 and report.frustration_free and report.ground_dimension == 1
    record_criterion(
        "criterion 8 (parent Hamiltonian)", ok,
        f"rank={rank}, frustration free={report.frustration_free}, kernel dim={report.ground_dimension}",
    )
    assert rank == 4
    assert report.frustration_free
    assert report.ground_dimension == 1


def test_criterion_09_reservoir_engineering():
    t0 = time.time()
    target = Operator(SIGMA_MINUS, qubits(1))
    report = elimination_sweep(target, omega=1.0, ratios=(10.0, 30.0, 100.0))
    elapsed = time.time() - t0
    exp_ok = abs(report.scaling_exponent + 1.0) <= 0.1
    mis_ok = report.mismatches[-1] <= 0.05
    ok = exp_ok and mis_ok and elapsed <= 180.0
    record_criterion(
        "criterion 9 (reservoir engineering)", ok,
        f"exponent={report.scaling_exponent:.4f}, mismatch@100={report.mismatches[-1]:.4f}, {elapsed:.0f}s",
    )
    assert exp_ok
    assert mis_ok
    assert elapsed <= 180.0


def test_criterion_10_channel_generator_correspondence():
    rng = np.random.default_rng(90210)
    worst_eig = 0.0
    worst_fid = 1.0
    for trial in range(5):
        dim = int(rng.integers(2, 5))
        n_kraus = int(rng.integers(2, 4))
        big = random_unitary(dim * n_kraus, rng)
        kraus = [big[i * dim : (i + 1) * dim, :dim] for i in range(n_kraus)]
        system = SiteSystem((dim,))
        channel = CpMapChannel([(1.0, kraus)], system)
        n_scale = int(rng.integers(1, 6))
        gen = channel_to_generator(channel, n_scale)
        ch_eigs = np.linalg.eigvals(channel_superoperator(channel).matrix)
        gen_eigs = np.linalg.eigvals(gen.matrix)
        shifted = list(n_scale * (ch_eigs - 1.0))
        pool = list(gen_eigs)
        for val in shifted:
            j = int(np.argmin([abs(val - other) for other in pool]))
            worst_eig = max(worst_eig, abs(val - pool[j]))
            pool.pop(j)
        steady = steady_state_matrix(gen)
        iterated = apply_channel_matrix(channel, steady)
        ch_fixed = DensityMatrix.trusted(iterated, system)
        worst_fid = min(worst_fid, fidelity(DensityMatrix.trusted(steady, system), ch_fixed))
    ok = worst_eig <= 1e-10 and worst_fid >= 1 - 1e-9
    record_criterion(
        "criterion 10 (channel/generator)", ok,
        f"worst eigenvalue mismatch={worst_eig:.2e}, worst fixed-point fidelity={worst_fid:.12f}",
    )
    assert worst_eig <= 1e-10
    assert worst_fid >= 1 - 1e-9


def test_criterion_11_property_suites(tmp_path):
    rng = np.random.default_rng(11111)
    cases = 0

    # trace / Hermiticity / positivity preservation: random channels acting
    # on random states, random generators evolved for random times
    from dissiplab.liouville import LindbladModel, evolve

    worst_trace = 0.0
    worst_herm = 0.0
    worst_pos = 0.0
    for _ in range(167):
        dim = int(rng.integers(2, 5))
        system = SiteSystem((dim,))
        n_kraus = int(rng.integers(1, 4))
        big = random_unitary(dim * n_kraus, rng)
        kraus = [big[i * dim : (i + 1) * dim, :dim] for i in range(n_kraus)]
        channel = CpMapChannel([(1.0, kraus)], system)
        rho = random_dm(system, rng).matrix
        out = apply_channel_matrix(channel, rho)
        worst_trace = max(worst_trace, abs(np.trace(out).real - 1.0))
        worst_herm = max(worst_herm, float(np.max(np.abs(out - out.conj().T))))
        worst_pos = max(worst_pos, max(0.0, -float(np.linalg.eigvalsh(out)[0])))
        cases += 1
    for _ in range(167):
        dim = int(rng.integers(2, 4))
        system = SiteSystem((dim,))
        ops = [
            Operator(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)), system)
            for _ in range(int(rng.integers(1, 3)))
        ]
        sop = assemble_generator(LindbladModel(system, ops))
        t = float(rng.uniform(0.05, 2.0))
        out = evolve(sop, random_dm(system, rng), t).matrix
        worst_trace = max(worst_trace, abs(np.trace(out).real - 1.0))
        worst_herm = max(worst_herm, float(np.max(np.abs(out - out.conj().T))))
        worst_pos = max(worst_pos, max(0.0, -float(np.linalg.eigvalsh(out)[0])))
        cases += 1

    # Heisenberg/Schroedinger duality
    worst_dual = 0.0
    for _ in range(333):
        dim = int(rng.integers(2, 4))
        system = SiteSystem((dim,))
        n_kraus = int(rng.integers(1, 4))
        big = random_unitary(dim * n_kraus, rng)
        kraus = [big[i * dim : (i + 1) * dim, :dim] for i in range(n_kraus)]
        channel = CpMapChannel([(1.0, kraus)], system)
        adj = channel_adjoint(channel)
        rho = random_dm(system, rng).matrix
        X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        lhs = np.trace(apply_channel_matrix(channel, rho) @ X)
        rhs = np.trace(rho @ unvec(adj.matrix @ vec(X), dim))
        worst_dual = max(worst_dual, abs(lhs - rhs))
        cases += 1

    # embedding homomorphism on shared supports
    worst_hom = 0.0
    for _ in range(333):
        system = qubits(3)
        support = tuple(int(s) for s in rng.choice(3, 2, replace=False))
        A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        B = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        ab = tensor_embed(local_operator(A @ B, support, system), system).matrix
        a = tensor_embed(local_operator(A, support, system), system).matrix
        b = tensor_embed(local_operator(B, support, system), system).matrix
        worst_hom = max(worst_hom, float(np.max(np.abs(ab - a @ b))))
        cases += 1

    # byte reproducibility of paired CLI runs
    from dissiplab.cli import main as cli_main

    out_a, out_b = tmp_path / "a", tmp_path / "b"
    args = ["dqc-gap", "--t-max", "2", "--n-max", "2", "--reps", "1", "--seed", "77", "--skip-figures"]
    assert cli_main(args + ["--out", str(out_a)]) == 0
    assert cli_main(args + ["--out", str(out_b)]) == 0
    bytes_ok = (out_a / "dqc_gap.csv").read_bytes() == (out_b / "dqc_gap.csv").read_bytes()

    ok = (
        cases == 1000
        and worst_trace <= 1e-8
        and worst_herm <= 1e-8
        and worst_pos <= 1e-9
        and worst_dual <= 1e-12
        and worst_hom <= 1e-12
        and bytes_ok
    )
    record_criterion(
        "criterion 11 (property suites)", ok,
        f"{cases} cases: trace={worst_trace:.1e}, herm={worst_herm:.1e}, "
        f"pos={worst_pos:.1e}, duality={worst_dual:.1e}, homomorphism={worst_hom:.1e}, "
        f"bytes identical={bytes_ok}",
    )
    assert cases == 1000
    assert worst_trace <= 1e-8
    assert worst_herm <= 1e-8
    assert worst_pos <= 1e-9
    assert worst_dual <= 1e-12
    assert worst_hom <= 1e-12
    assert bytes_ok
