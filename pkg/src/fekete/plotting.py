"""PNG figures for convergence reports (opt-in via ``report --figures``)."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path):
    fig.tight_layout()
    # fixed metadata keeps reruns byte-identical
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)


def plot_report(report: dict, out_dir) -> list:
    """Write metric-versus-degree figures; returns the file paths."""
    recs = report["records"]
    ks = np.array([r["k"] for r in recs], dtype=float)
    metric = "harmonic_discrepancy" if "harmonic_discrepancy_points" in recs[0] else "ks"
    paths = []

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.loglog(ks, [r[f"{metric}_points"] for r in recs], "o-", label="configuration")
    ax.loglog(ks, [r[f"{metric}_bergman"] for r in recs], "s--", label="Bergman measure")
    ax.set_xlabel("degree k")
    ax.set_ylabel(metric.replace("_", " "))
    ax.legend()
    paths.append(os.path.join(out_dir, "report_equidistribution.png"))
    _save(fig, paths[-1])

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(ks, [r["k_diameter"] for r in recs], "o-", label="k-diameter")
    ax.plot(ks, [r["l_functional"] for r in recs], "s--", label="L-functional")
    energy = report["summary"].get("equilibrium_energy")
    if energy is not None:
        ax.axhline(energy, color="k", lw=0.8, label="equilibrium energy")
    ax.set_xlabel("degree k")
    ax.legend()
    paths.append(os.path.join(out_dir, "report_energy.png"))
    _save(fig, paths[-1])

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.loglog([r["N"] for r in recs], [r["sup_rho"] for r in recs], "o-")
    ax.set_xlabel("dimension N")
    ax.set_ylabel("sup rho")
    paths.append(os.path.join(out_dir, "report_sup_rho.png"))
    _save(fig, paths[-1])
    return paths
