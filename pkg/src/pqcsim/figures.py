"""Render spectra and sweep tables to figure files alongside the JSON/CSV output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .grover import SweepRow
from .spectrometer import Spectrum


def spectrum_figure(spectrum: Spectrum, title: str | None = None):
    """Stick spectrum: upward lines for ancilla |0>, downward for |1>."""
    fig, ax = plt.subplots(figsize=(7, 3.2))
    xs, ys = [], []
    for p in spectrum.peaks:
        value = p.intensity if spectrum.mode == "expected" else p.count
        xs.append(p.freq_num / p.freq_den)
        ys.append(value if p.direction == "up" else -value)
    if xs:
        ax.vlines(xs, 0, ys, color="tab:blue", lw=1.5)
    ax.axhline(0, color="black", lw=0.8)
    ax.set_xlabel(r"ancilla transition frequency ($\pi$ rad/s)")
    ax.set_ylabel("intensity" if spectrum.mode == "expected" else "counts")
    if title:
        ax.set_title(title)
    ax.invert_xaxis()  # spectra read high field to the right
    fig.tight_layout()
    return fig


def sweep_figure(rows: list[SweepRow]):
    """Queries and query^2 * molecules product across register splits."""
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 5), sharex=True)
    n1 = [r.n1 for r in rows]
    ax1.plot(n1, [r.nq_asym for r in rows], "--", color="gray", label="asymptotic")
    ax1.plot(n1, [r.nq_real for r in rows], "o-", color="tab:blue", label="realized")
    ax1.set_ylabel("queries")
    ax1.set_yscale("log")
    ax1.legend()
    ax2.plot(n1, [r.product_asym for r in rows], "--", color="gray", label="asymptotic")
    ax2.plot(n1, [r.product_real for r in rows], "o-", color="tab:blue", label="realized")
    ax2.set_ylabel(r"queries$^2$ $\times$ molecules")
    ax2.set_xlabel("mixed qubits n1")
    ax2.legend()
    fig.tight_layout()
    return fig


def rpa_figure(counts: np.ndarray, marked: int):
    """Outcome histogram of one majority-vote trial, marked state highlighted."""
    fig, ax = plt.subplots(figsize=(7, 3.2))
    states = np.arange(len(counts))
    colors = ["tab:red" if s == marked else "tab:blue" for s in states]
    ax.bar(states, counts, color=colors, width=1.0)
    ax.set_xlabel("state")
    ax.set_ylabel("occurrences")
    fig.tight_layout()
    return fig


def save_figure(fig, path) -> None:
    fig.savefig(path, dpi=150)
    plt.close(fig)
