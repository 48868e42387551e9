"""Figure rendering for the command-line reports.

Every subcommand that writes a delimited table also renders a matching PNG
next to it.  Uses the Agg backend; figures carry no timestamps so repeated
runs produce stable output.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIG_DPI = 150


def save_figure(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=FIG_DPI, metadata={"Software": ""})
    plt.close(fig)


def gap_vs_depth_figure(rows, path) -> None:
    """rows: (T, N, rep, numeric_gap, closed_form_gap, abs_error)."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    ts = sorted({r[0] for r in rows})
    closed = {r[0]: r[4] for r in rows}
    ax1.plot(ts, [closed[t] for t in ts], "k-", lw=1.5, label="closed form")
    for n in sorted({r[1] for r in rows}):
        pts = [(r[0], r[3]) for r in rows if r[1] == n]
        ax1.plot(*zip(*pts), "o", ms=4, alpha=0.6, label=f"N={n}")
    ax1.set_xlabel("circuit depth T")
    ax1.set_ylabel("spectral gap")
    ax1.legend(fontsize=8)
    errs = [max(r[5], 1e-17) for r in rows]
    ax2.semilogy(range(len(errs)), errs, ".", ms=4)
    ax2.set_xlabel("instance")
    ax2.set_ylabel("|numeric - closed form|")
    ax2.grid(True, alpha=0.3)
    save_figure(fig, path)


def convergence_figure(steps, energies, overlaps, path, title="") -> None:
    fig, ax = plt.subplots(figsize=(6, 3.8))
    ax.semilogy(steps, np.clip(energies, 1e-16, None), label="energy")
    ax.set_xlabel("step")
    ax.set_ylabel("energy", color="C0")
    ax2 = ax.twinx()
    ax2.plot(steps, overlaps, "C1", label="ground overlap")
    ax2.set_ylabel("ground overlap", color="C1")
    ax2.set_ylim(-0.02, 1.02)
    if title:
        ax.set_title(title, fontsize=10)
    ax.grid(True, alpha=0.3)
    save_figure(fig, path)


def spectrum_figure(eigenvalues, path, title="") -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    ev = np.asarray(eigenvalues, dtype=complex)
    ax.plot(ev.real, ev.imag, ".", ms=4, alpha=0.7)
    ax.axvline(0.0, color="k", lw=0.5)
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    if title:
        ax.set_title(title, fontsize=10)
    ax.grid(True, alpha=0.3)
    save_figure(fig, path)


def distance_trace_figure(times, distances, path, title="") -> None:
    fig, ax = plt.subplots(figsize=(6, 3.8))
    ax.semilogy(times, np.clip(distances, 1e-16, None))
    ax.set_xlabel("time")
    ax.set_ylabel("trace distance to fixed point")
    if title:
        ax.set_title(title, fontsize=10)
    ax.grid(True, alpha=0.3)
    save_figure(fig, path)


def rate_sweep_figure(ratios, rates, exponent, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 3.8))
    ax.loglog(ratios, rates, "o-", label=f"fit exponent {exponent:.3f}")
    ax.set_xlabel("gamma / omega")
    ax.set_ylabel("fitted decay rate")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=9)
    save_figure(fig, path)


def preparation_figure(steps, fidelities, energies, path, title="") -> None:
    fig, ax = plt.subplots(figsize=(6, 3.8))
    ax.plot(steps, fidelities, "C0", label="target fidelity")
    ax.set_xlabel("step")
    ax.set_ylabel("fidelity", color="C0")
    ax.set_ylim(-0.02, 1.02)
    ax2 = ax.twinx()
    ax2.semilogy(steps, np.clip(energies, 1e-16, None), "C1")
    ax2.set_ylabel("parent energy", color="C1")
    if title:
        ax.set_title(title, fontsize=10)
    ax.grid(True, alpha=0.3)
    save_figure(fig, path)


def multiset_figure(analytic, numeric, path, title="") -> None:
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    ax.plot(sorted(np.real(analytic)), "C0.", ms=5, label="pairwise-sum values")
    ax.plot(sorted(np.real(numeric)), "C1+", ms=5, label="generator spectrum")
    ax.set_xlabel("index (sorted)")
    ax.set_ylabel("Re(eigenvalue)")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title, fontsize=10)
    ax.grid(True, alpha=0.3)
    save_figure(fig, path)
