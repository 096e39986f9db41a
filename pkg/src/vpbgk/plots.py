"""Figure rendering for run and study outputs (Agg backend, PNG files)."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def profile_figure(state, path):
    """Final macroscopic profiles and field on the spatial grid."""
    rho, u, temp = state.macro.rho, state.macro.u, state.macro.temp
    n_x = rho.shape[0]
    x = np.arange(n_x) / n_x
    fig, axes = plt.subplots(2, 2, figsize=(8.0, 5.5), sharex=True)
    panels = [
        (axes[0, 0], rho, r"$\rho$"),
        (axes[0, 1], u, r"$U$"),
        (axes[1, 0], temp, r"$T$"),
        (axes[1, 1], np.asarray(state.e), r"$E$"),
    ]
    for ax, values, label in panels:
        ax.plot(x, values, lw=1.2)
        ax.set_ylabel(label)
        ax.grid(alpha=0.3)
    for ax in axes[1]:
        ax.set_xlabel("x")
    fig.suptitle(f"t = {state.t:g}")
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)


def history_figure(log, path):
    """Per-step traces: mass deviation, max|E|, and min f over time."""
    t = log.t
    fig, axes = plt.subplots(3, 1, figsize=(7.0, 6.5), sharex=True)
    axes[0].plot(t, log.mass - log.mass[0], lw=1.0)
    axes[0].set_ylabel("mass drift")
    axes[1].semilogy(t, np.maximum(log.e_inf, 1e-300), lw=1.0)
    axes[1].set_ylabel(r"$\max_i |E_i|$")
    axes[2].plot(t, log.min_f, lw=1.0)
    axes[2].set_ylabel(r"$\min f$")
    axes[2].set_xlabel("t")
    for ax in axes:
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)


def convergence_figure(report, path):
    """Log-log self-convergence errors per metric with a slope-one guide."""
    fig, ax = plt.subplots(figsize=(6.5, 4.8))
    n_x = np.array([row.n_x for row in report.rows], dtype=float)
    for metric in report.metrics:
        errors = np.array([row.errors[metric] for row in report.rows])
        ax.loglog(n_x, errors, "o-", label=metric, lw=1.2, ms=4)
    # first-order reference through the first point of the first metric
    ref = report.rows[0].errors[report.metrics[0]] * n_x[0] / n_x
    ax.loglog(n_x, ref, "k--", lw=0.9, label="slope -1")
    ax.set_xlabel(r"$n_x$ (coarser level of each pair)")
    ax.set_ylabel("self-convergence error")
    ax.set_title(f"eps = {report.eps:g}, t_final = {report.t_final:g}, "
                 f"{report.dt_policy} dt")
    ax.grid(which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)
