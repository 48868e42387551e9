"""Config-driven experiment runner.

Every subcommand writes, under the output directory: a CSV table (header
row, 17-significant-digit floats, complex values as re/im column pairs), a
PNG figure rendered from the same rows, and a short manifest echoing the
configuration, library versions, seed and wall time.  Runs are reproducible
byte-for-byte from the same configuration and seed, apart from the
manifest's timing line.

Exit codes: 0 success, 1 numerical failure, 2 input error, 3 budget
exceeded.  A JSON config file passed with --config overrides flag values.
The default output directory comes from DISSIPLAB_OUTDIR (falling back to
./runs).
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .core import (
    DensityMatrix,
    DimensionError,
    Operator,
    SIGMA_MINUS,
    SiteSystem,
    fidelity,
    maximally_mixed,
    pure_state_fidelity,
    random_pure_dm,
    trace_distance,
)
from .dqc import (
    BudgetExceeded as DqcBudgetExceeded,
    closed_form_gap,
    compile_direct,
    compile_unary,
    expected_fixed_point,
    readout,
)
from .dse import (
    BudgetExceeded as DseBudgetExceeded,
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
from .formats import InputFormatError, parse_circuit, parse_hamiltonian, parse_mps
from .liouville import (
    NumericalFailure,
    assemble_generator,
    assemble_generator_sparse,
    evolve_grid,
    gap_from_leading,
    leading_spectrum,
    spectral_gap,
    steady_state_matrix,
)
from .mps import ScheduleParams, default_step_budget, prepare, preset_mps
from .reservoir import elimination_sweep
from . import plotting

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3

DENSE_GAP_LIMIT = 1024  # largest superoperator dimension for full eigensolves


def _f(x: float) -> str:
    return f"{float(x):.17g}"


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_f(v) if isinstance(v, float) else v for v in row])


def _write_manifest(path: Path, command: str, params: dict, seed, wall: float) -> None:
    lines = [
        f"command: {command}",
        f"version: {__version__}",
        f"numpy: {np.__version__}",
        f"scipy: {__import__('scipy').__version__}",
        f"seed: {seed}",
    ]
    for key in sorted(params):
        lines.append(f"param {key}: {params[key]}")
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
    lines.append(f"timing: started={stamp} wall={wall:.3f}s")
    path.write_text("\n".join(lines) + "\n")


def _outdir(args) -> Path:
    base = args.out or os.environ.get("DISSIPLAB_OUTDIR") or "runs"
    path = Path(base)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _numeric_gap_and_steady(model, want_steady: bool = True):
    """Gap (and optionally the steady state) via the cheapest safe route."""
    dim = model.system.total_dim
    if dim * dim <= DENSE_GAP_LIMIT:
        sop = assemble_generator(model)
        report = spectral_gap(sop)
        steady = steady_state_matrix(sop) if want_steady and report.steady_dim == 1 else None
        return report.gap, report.steady_dim, steady
    sparse = assemble_generator_sparse(model)
    vals, vecs = leading_spectrum(sparse, dim, k=6)
    gap, zero_mult = gap_from_leading(vals)
    steady = None
    if want_steady and zero_mult == 1:
        zi = int(np.argmin(np.abs(vals)))
        mat = vecs[:, zi].reshape((dim, dim), order="F")
        mat = mat + mat.conj().T
        mat /= np.trace(mat).real
        steady = 0.5 * (mat + mat.conj().T)
    return gap, zero_mult, steady


# --- subcommands -----------------------------------------------------------------


def _random_circuit(n_qubits: int, depth: int, rng: np.random.Generator):
    from .core import random_unitary
    from .dqc import Gate, QuantumCircuit

    gates = []
    for _ in range(depth):
        if n_qubits >= 2 and rng.random() < 0.5:
            support = tuple(int(x) for x in rng.choice(n_qubits, size=2, replace=False))
            gates.append(Gate(support, random_unitary(4, rng)))
        else:
            gates.append(Gate((int(rng.integers(n_qubits)),), random_unitary(2, rng)))
    return QuantumCircuit(n_qubits, gates)


def _gap_point(task):
    depth, n_qubits, rep, seed = task
    rng = np.random.default_rng(seed)
    circuit = _random_circuit(n_qubits, depth, rng)
    model = compile_direct(circuit).model
    gap, steady_dim, _ = _numeric_gap_and_steady(model, want_steady=False)
    closed = closed_form_gap(depth)
    return [depth, n_qubits, rep, gap, closed, abs(gap - closed), steady_dim]


def cmd_dqc_gap(args) -> int:
    out = _outdir(args)
    t0 = time.time()
    tasks = []
    for depth in range(args.t_min, args.t_max + 1):
        for n_qubits in range(args.n_min, args.n_max + 1):
            for rep in range(args.reps):
                tasks.append((depth, n_qubits, rep, args.seed * 100003 + len(tasks)))
    rows = _pool_map(_gap_point, tasks, args.workers)
    header = ["T", "N", "rep", "numeric_gap", "closed_form_gap", "abs_error", "steady_dim"]
    _write_csv(out / "dqc_gap.csv", header, rows)
    if not args.skip_figures:
        plotting.gap_vs_depth_figure(rows, out / "dqc_gap.png")
    _write_manifest(out / "dqc_gap_manifest.txt", "dqc-gap", vars_of(args), args.seed, time.time() - t0)
    worst = max(r[5] for r in rows)
    print(f"dqc-gap: {len(rows)} instances, worst |numeric-closed| = {worst:.3e}")
    return EXIT_OK


def cmd_dqc_run(args) -> int:
    out = _outdir(args)
    t0 = time.time()
    circuit = _load_circuit(args)
    compiled = compile_direct(circuit)
    model = compiled.model
    gap, steady_dim, steady = _numeric_gap_and_steady(model)
    expected = expected_fixed_point(circuit)
    fid = fidelity(DensityMatrix.trusted(steady, model.system), expected) if steady is not None else float("nan")
    p_final, _ = readout(expected, circuit)

    rng = np.random.default_rng(args.seed)
    rho0 = random_pure_dm(model.system, rng)
    horizon = 40.0 / gap
    times = np.linspace(0.0, horizon, args.t_points)
    sop = assemble_generator(model)
    states = evolve_grid(sop, rho0, times)
    dists = [trace_distance(s, expected) for s in states]

    _write_csv(
        out / "dqc_run.csv",
        ["time", "trace_distance"],
        [[float(t), float(d)] for t, d in zip(times, dists)],
    )
    _write_csv(
        out / "dqc_run_summary.csv",
        ["gap", "steady_dim", "steady_fidelity", "readout_probability"],
        [[gap, steady_dim, fid, p_final]],
    )
    if not args.skip_figures:
        plotting.distance_trace_figure(times, dists, out / "dqc_run.png", title="relaxation to the compiled fixed point")
    _write_manifest(out / "dqc_run_manifest.txt", "dqc-run", vars_of(args), args.seed, time.time() - t0)
    print(f"dqc-run: gap={gap:.6f} steady_dim={steady_dim} fidelity={fid:.10f} p(T)={p_final:.6f}")
    return EXIT_OK


def cmd_dqc_spectrum(args) -> int:
    out = _outdir(args)
    t0 = time.time()
    circuit = _load_circuit(args)
    compiled = compile_unary(circuit) if args.encoding == "unary" else compile_direct(circuit)
    dim = compiled.system.total_dim
    if dim * dim > 65536:
        raise DseBudgetExceeded(f"superoperator dimension {dim * dim} too large for a full spectrum")
    sop = assemble_generator(compiled.model)
    eigvals = np.linalg.eigvals(sop.matrix)
    order = np.lexsort((eigvals.imag, eigvals.real))
    rows = [[float(v.real), float(v.imag)] for v in eigvals[order]]
    _write_csv(out / "dqc_spectrum.csv", ["re", "im"], rows)
    if not args.skip_figures:
        plotting.spectrum_figure(eigvals, out / "dqc_spectrum.png", title=f"{args.encoding} encoding spectrum")
    _write_manifest(out / "dqc_spectrum_manifest.txt", "dqc-spectrum", vars_of(args), args.seed, time.time() - t0)
    print(f"dqc-spectrum: {len(rows)} eigenvalues, dim {dim}")
    return EXIT_OK


def _load_circuit(args):
    if getattr(args, "circuit", None):
        return parse_circuit(Path(args.circuit).read_text())
    rng = np.random.default_rng(args.seed)
    return _random_circuit(args.qubits, args.depth, rng)


def _load_hamiltonian(args):
    if getattr(args, "hamiltonian", None):
        return parse_hamiltonian(Path(args.hamiltonian).read_text())
    preset = args.preset or "cluster3"
    if preset.startswith("cluster"):
        return cluster_chain(int(preset.removeprefix("cluster")))
    raise InputFormatError(f"unknown preset {preset!r}", 1)


def cmd_dse_run(args) -> int:
    out = _outdir(args)
    t0 = time.time()
    ham = _load_hamiltonian(args)
    if args.correction == "depolarizing":
        corr = CorrectionSet.depolarizing(ham.n_terms)
    else:
        corr = CorrectionSet.stabilizer(ham, per_site=args.per_site)
    channel = dse_channel(ham, corr)
    rng = np.random.default_rng(args.seed)
    rho0 = maximally_mixed(ham.system) if args.initial == "mixed" else random_pure_dm(ham.system, rng)
    trace = run_to_convergence(channel, ham, rho0, tol=args.tol, max_steps=args.steps)
    rows = [
        [s, e, o, d]
        for s, e, o, d in zip(trace.steps, trace.energies, trace.overlaps, trace.deltas)
    ]
    _write_csv(out / "dse_run.csv", ["step", "energy", "overlap", "delta_prev"], rows)
    if not args.skip_figures:
        plotting.convergence_figure(trace.steps, trace.energies, trace.overlaps, out / "dse_run.png")
    _write_manifest(out / "dse_run_manifest.txt", "dse-run", vars_of(args), args.seed, time.time() - t0)
    status = "converged" if trace.converged else "budget exhausted"
    print(f"dse-run: {status} after {trace.steps[-1]} steps, energy {trace.energies[-1]:.3e}")
    return EXIT_OK if trace.converged else EXIT_BUDGET


def cmd_graph_state(args) -> int:
    out = _outdir(args)
    t0 = time.time()
    graph = _load_graph(args)
    ham = graph_hamiltonian(graph)
    model = graph_liouvillian(graph)
    sop = assemble_generator(model)
    eigvals = np.sort(np.linalg.eigvals(sop.matrix).real)
    analytic = pairwise_decay_spectrum(ham)
    dev = float(np.max(np.abs(eigvals - analytic)))
    steady = steady_state_matrix(sop)
    target = graph_state_ket(graph)
    fid = pure_state_fidelity(target, DensityMatrix.trusted(steady, model.system))
    rows = [[float(a), float(b)] for a, b in zip(analytic, eigvals)]
    _write_csv(out / "graph_state.csv", ["pairwise_sum_value", "numeric_eigenvalue"], rows)
    _write_csv(
        out / "graph_state_summary.csv",
        ["vertices", "edges", "multiset_deviation", "steady_fidelity"],
        [[graph.n_vertices, len(graph.edges), dev, fid]],
    )
    if not args.skip_figures:
        plotting.multiset_figure(analytic, eigvals, out / "graph_state.png", title="decay spectrum vs pairwise sums")
    _write_manifest(out / "graph_state_manifest.txt", "graph-state", vars_of(args), args.seed, time.time() - t0)
    print(f"graph-state: n={graph.n_vertices} multiset dev={dev:.3e} fidelity={fid:.12f}")
    return EXIT_OK


def _load_graph(args) -> GraphSpec:
    if args.edges:
        edges = []
        for item in args.edges.split(","):
            item = item.strip()
            if not item:
                continue
            try:
                a, b = item.split("-")
                edges.append((int(a), int(b)))
            except ValueError:
                raise InputFormatError(f"cannot parse edge {item!r}", 1) from None
        n = args.vertices or (max(max(e) for e in edges) + 1 if edges else 1)
        return GraphSpec(n, edges)
    if args.preset == "path":
        return GraphSpec.path(args.vertices or 3)
    if args.preset == "ring":
        return GraphSpec.ring(args.vertices or 4)
    raise InputFormatError(f"unknown graph preset {args.preset!r}", 1)


def cmd_toric_run(args) -> int:
    out = _outdir(args)
    t0 = time.time()
    ham = toric_code(args.lx, args.ly)
    corr = CorrectionSet.stabilizer(ham, per_site=True)
    channel = dse_channel(ham, corr)
    rng = np.random.default_rng(args.seed)
    rows = []
    summary = []
    for idx in range(args.inputs):
        rho0 = random_pure_dm(ham.system, rng)
        trace = run_to_convergence(channel, ham, rho0, tol=args.tol, max_steps=args.steps)
        for s, e, o in zip(trace.steps, trace.energies, trace.overlaps):
            rows.append([idx, s, e, o])
        summary.append(
            [idx, trace.steps[-1], trace.energies[-1], trace.overlaps[-1], int(trace.converged)]
        )
    _write_csv(out / "toric_run.csv", ["input", "step", "energy", "overlap"], rows)
    _write_csv(
        out / "toric_run_summary.csv",
        ["input", "steps", "final_energy", "final_overlap", "converged"],
        summary,
    )
    if not args.skip_figures:
        last = [r for r in rows if r[0] == args.inputs - 1]
        plotting.convergence_figure(
            [r[1] for r in last], [r[2] for r in last], [r[3] for r in last],
            out / "toric_run.png", title=f"toric {args.lx}x{args.ly}, last input",
        )
    _write_manifest(out / "toric_run_manifest.txt", "toric-run", vars_of(args), args.seed, time.time() - t0)
    n_conv = sum(s[4] for s in summary)
    print(f"toric-run: {n_conv}/{args.inputs} converged, worst final energy {max(s[2] for s in summary):.3e}")
    return EXIT_OK if n_conv == args.inputs else EXIT_BUDGET


def cmd_mps_prepare(args) -> int:
    out = _outdir(args)
    t0 = time.time()
    if args.mps:
        mps = parse_mps(Path(args.mps).read_text())
    else:
        mps = preset_mps(args.preset, args.sites)
    params = ScheduleParams(C=args.c, n_sites=mps.n_sites)
    steps = args.steps or default_step_budget(mps.n_sites, args.c)
    record = max(1, steps // args.points)
    rng = np.random.default_rng(args.seed)
    trace = prepare(
        mps, params, steps=steps, record_every=record,
        mode=args.mode, rng=rng, track_levels=args.levels,
    )
    header = ["step", "fidelity", "parent_energy"]
    if args.levels:
        header += [f"mu_{r}" for r in range(1, params.levels + 2)]
        rows = [
            [s, f, e, *mu]
            for s, f, e, mu in zip(trace.steps, trace.fidelities, trace.energies, trace.level_mu)
        ]
    else:
        rows = [[s, f, e] for s, f, e in zip(trace.steps, trace.fidelities, trace.energies)]
    _write_csv(out / "mps_prepare.csv", header, rows)
    if not args.skip_figures:
        plotting.preparation_figure(
            trace.steps, trace.fidelities, trace.energies, out / "mps_prepare.png",
            title=f"{args.preset or 'file'} N={mps.n_sites} C={args.c}",
        )
    _write_manifest(out / "mps_prepare_manifest.txt", "mps-prepare", vars_of(args), args.seed, time.time() - t0)
    print(f"mps-prepare: {steps} steps, final fidelity {trace.fidelities[-1]:.6f}")
    return EXIT_OK


def cmd_reservoir_check(args) -> int:
    out = _outdir(args)
    t0 = time.time()
    ratios = tuple(float(x) for x in args.ratios.split(","))
    system = SiteSystem((2,))
    target = Operator(SIGMA_MINUS, system)
    report = elimination_sweep(target, omega=args.omega, ratios=ratios)
    rows = [
        [r, r * args.omega, rate, pref, mis, sg]
        for r, rate, pref, mis, sg in zip(
            report.ratios, report.fitted_rates, report.prefactors,
            report.mismatches, report.steady_gaps,
        )
    ]
    _write_csv(
        out / "reservoir_check.csv",
        ["ratio", "gamma", "fitted_rate", "prefactor", "mismatch", "steady_gap"],
        rows,
    )
    _write_csv(
        out / "reservoir_check_summary.csv",
        ["scaling_exponent"],
        [[report.scaling_exponent]],
    )
    if not args.skip_figures:
        plotting.rate_sweep_figure(report.ratios, report.fitted_rates, report.scaling_exponent, out / "reservoir_check.png")
    _write_manifest(out / "reservoir_check_manifest.txt", "reservoir-check", vars_of(args), args.seed, time.time() - t0)
    print(
        f"reservoir-check: exponent {report.scaling_exponent:.4f}, "
        f"worst mismatch {max(report.mismatches):.4f}"
    )
    return EXIT_OK


def cmd_validate(args) -> int:
    out = _outdir(args)
    t0 = time.time()
    ham = _load_hamiltonian(args)
    report = validate_hamiltonian(ham.system, list(ham.terms))
    rows = [
        [i, d] for i, d in enumerate(report.projector_deviations)
    ]
    _write_csv(out / "validate_terms.csv", ["term", "projector_deviation"], rows)
    comm_rows = []
    m = len(ham.terms)
    for a in range(m):
        for b in range(a + 1, m):
            comm_rows.append([a, b, float(report.commutator_norms[a, b])])
    _write_csv(out / "validate_commutators.csv", ["term_a", "term_b", "commutator_norm"], comm_rows)
    _write_csv(
        out / "validate_summary.csv",
        ["min_eigenvalue", "ground_dimension", "frustration_free"],
        [[report.min_eigenvalue, report.ground_dimension, int(report.frustration_free)]],
    )
    _write_manifest(out / "validate_manifest.txt", "validate", vars_of(args), args.seed, time.time() - t0)
    print(
        f"validate: min eigenvalue {report.min_eigenvalue:.3e}, ground dim "
        f"{report.ground_dimension}, frustration free: {report.frustration_free}"
    )
    return EXIT_OK


# --- plumbing -------------------------------------------------------------------


def _pool_map(fn, tasks, workers: int):
    if workers <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))  # map preserves task order


def vars_of(args) -> dict:
    skip = {"func", "config"}
    return {k: v for k, v in vars(args).items() if k not in skip and v is not None}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dissiplab",
        description="dissipative computation and steady-state engineering workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output directory (default: $DISSIPLAB_OUTDIR or ./runs)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--config", help="JSON file whose entries override flags")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--skip-figures", action="store_true", help="write tables only")

    p = sub.add_parser("dqc-gap", help="spectral gap of compiled circuits vs the closed form")
    common(p)
    p.add_argument("--t-min", type=int, default=1)
    p.add_argument("--t-max", type=int, default=6)
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--reps", type=int, default=3, help="random gate sets per (T, N)")
    p.set_defaults(func=cmd_dqc_gap)

    p = sub.add_parser("dqc-run", help="steady state, readout and relaxation of one circuit")
    common(p)
    p.add_argument("--circuit", help="circuit file (omit for a random circuit)")
    p.add_argument("--qubits", type=int, default=2)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--t-points", type=int, default=40)
    p.set_defaults(func=cmd_dqc_run)

    p = sub.add_parser("dqc-spectrum", help="full generator spectrum of one circuit")
    common(p)
    p.add_argument("--circuit")
    p.add_argument("--qubits", type=int, default=1)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--encoding", choices=["direct", "unary"], default="direct")
    p.set_defaults(func=cmd_dqc_spectrum)

    p = sub.add_parser("dse-run", help="measure-and-correct convergence run")
    common(p)
    p.add_argument("--hamiltonian", help="Hamiltonian file")
    p.add_argument("--preset", help="e.g. cluster3, cluster4")
    p.add_argument("--correction", choices=["stabilizer", "depolarizing"], default="stabilizer")
    p.add_argument("--per-site", action="store_true", help="one correction per support site")
    p.add_argument("--initial", choices=["mixed", "random"], default="mixed")
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_dse_run)

    p = sub.add_parser("graph-state", help="graph-state generator spectrum identity check")
    common(p)
    p.add_argument("--edges", help="comma list like 0-1,1-2")
    p.add_argument("--preset", choices=["path", "ring"], default="path")
    p.add_argument("--vertices", type=int)
    p.set_defaults(func=cmd_graph_state)

    p = sub.add_parser("toric-run", help="toric-code preparation from random inputs")
    common(p)
    p.add_argument("--lx", type=int, default=2)
    p.add_argument("--ly", type=int, default=2)
    p.add_argument("--inputs", type=int, default=20)
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_toric_run)

    p = sub.add_parser("mps-prepare", help="tree-scheduled matrix-product-state preparation")
    common(p)
    p.add_argument("--mps", help="site-tensor file")
    p.add_argument("--preset", default="aklt")
    p.add_argument("--sites", type=int, default=4)
    p.add_argument("--c", type=float, default=50.0)
    p.add_argument("--steps", type=int, help="default: the N^(log2 N + log2 C) budget")
    p.add_argument("--points", type=int, default=200, help="recorded trace points")
    p.add_argument("--mode", choices=["deterministic", "sampled"], default="deterministic")
    p.add_argument("--levels", action="store_true", help="track per-level errors")
    p.set_defaults(func=cmd_mps_prepare)

    p = sub.add_parser("reservoir-check", help="ancilla-mediated jump engineering sweep")
    common(p)
    p.add_argument("--ratios", default="10,30,100", help="gamma/omega values")
    p.add_argument("--omega", type=float, default=1.0)
    p.set_defaults(func=cmd_reservoir_check)

    p = sub.add_parser("validate", help="frustration-free Hamiltonian diagnostics")
    common(p)
    p.add_argument("--hamiltonian")
    p.add_argument("--preset")
    p.set_defaults(func=cmd_validate)

    return parser


def _apply_config(args) -> None:
    """Entries in the JSON config override parsed flag values."""
    if not getattr(args, "config", None):
        return
    try:
        overrides = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputFormatError(f"cannot read config: {exc}", 1) from None
    if not isinstance(overrides, dict):
        raise InputFormatError("config must be a JSON object", 1)
    valid = set(vars(args))
    for key, value in overrides.items():
        dest = key.replace("-", "_")
        if dest not in valid:
            raise InputFormatError(f"config field {key!r} is not a flag of this subcommand", 1)
        setattr(args, dest, value)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        return args.func(args)
    except InputFormatError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DimensionError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DqcBudgetExceeded, DseBudgetExceeded) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
