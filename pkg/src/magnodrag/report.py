"""File-based figure rendering for the CLI report path.

Kept out of the numerical core: only the CLI imports this module, and it
only ever writes image files (Agg backend, no display).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_AXIS_LABELS = {
    "sigma": r"$\sigma/\omega_b$",
    "velocity": "v (m/s)",
    "Gamma": r"$\Gamma/\omega_b$",
    "power": "power (W)",
}

_COLUMN_LABELS = {
    "ReEpsT": r"Re $\varepsilon_T$", "ImEpsT": r"Im $\varepsilon_T$",
    "ReNr": r"Re $n_r$", "ImNr": r"Im $n_r$",
    "ReNg": r"Re $n_g$", "ImNg": r"Im $n_g$",
    "DragM": r"$\Delta x$ (m)",
}


def render_png(tables, labels, column: str, path, title: str | None = None):
    """One panel: the named column of each family member versus the axis."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for table, label in zip(tables, labels):
        ax.plot(table.column("axis"), table.column(column),
                label=label or column, linewidth=1.2)
    ax.set_xlabel(_AXIS_LABELS.get(tables[0].axis_name, tables[0].axis_name))
    ax.set_ylabel(_COLUMN_LABELS.get(column, column))
    if title:
        ax.set_title(title)
    if any(labels):
        ax.legend(frameon=False, fontsize=9)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
