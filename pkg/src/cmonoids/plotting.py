"""Figures for reports: Cayley table heatmaps and length statistics."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .cmonoid import ClassSemigroup, CMonoidPresentation  # noqa: E402
from .lengths import box_lengths  # noqa: E402

MAX_TICK_LABELS = 24


def cayley_heatmap(cs: ClassSemigroup, path: str, title: str = "") -> str:
    T = cs.carrier.table
    n = T.shape[0]
    fig, ax = plt.subplots(figsize=(1.5 + 0.35 * n, 1.2 + 0.35 * n) if n > 12 else (6, 5))
    im = ax.imshow(T, cmap="viridis", interpolation="nearest")
    fig.colorbar(im, ax=ax, label="class index")
    if n <= MAX_TICK_LABELS:
        labels = [cs.label(x) for x in range(n)]
        marked = [f"{l} *" if x in cs.C_H else l for x, l in enumerate(labels)]
        ax.set_xticks(range(n), marked, rotation=90, fontsize=7)
        ax.set_yticks(range(n), marked, fontsize=7)
    ax.set_title(title or "class semigroup (* = class of an element of H)")
    fig.tight_layout()
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path


def lengths_plot(H: CMonoidPresentation, box_cap: int, path: str, title: str = "") -> str:
    """Minimum and maximum factorization length against degree over the box."""
    L = box_lengths(H, box_cap)
    degs = np.array([sum(e) for _, e in L])
    lo = np.array([min(v) for v in L.values()])
    hi = np.array([max(v) for v in L.values()])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter(degs - 0.08, lo, s=14, marker="v", label="min L(a)")
    ax.scatter(degs + 0.08, hi, s=14, marker="^", label="max L(a)")
    ax.set_xlabel("total degree of a")
    ax.set_ylabel("factorization length")
    ax.set_xticks(range(box_cap + 1))
    ax.legend(loc="upper left")
    ax.set_title(title or f"sets of lengths, box of degree <= {box_cap}")
    fig.tight_layout()
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path
