"""
Figures written next to the plot-data files.

Only the non-interactive Agg backend is used, so nothing here needs a
display.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

plt.rc("axes", linewidth=0.6)
plt.rc("font", size=9)


def render(path, columns, header, title=None, logy=False, kind="line"):
    """
    Plot every column after the first against the first and save to ``path``.

    Parameters
    ----------
    path : str or Path
        Output image; the format follows the suffix (png, pdf, svg).
    columns : sequence of 1-D arrays
    header : sequence of str
        Column names, used for the axis label and legend.
    logy : bool
        Logarithmic ordinate (cross-sections, residuals).
    kind : {"line", "step", "points"}
    """
    x = np.asarray(columns[0], dtype=float)
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    for name, y in zip(header[1:], columns[1:]):
        y = np.asarray(y, dtype=float)
        if kind == "points":
            ax.plot(x, y, "o", ms=3.5, label=name)
        elif kind == "step":
            ax.step(x, y, where="mid", label=name)
        else:
            ax.plot(x, y, lw=1.2, label=name)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(header[0])
    if len(header) == 2:
        ax.set_ylabel(header[1])
    else:
        ax.legend(frameon=False)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_convergence(path, studies, title=None):
    """Log-log residual vs spacing, one line per refinement study."""
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for st in studies:
        ax.loglog(st.spacings, st.residuals, "o-", ms=3, lw=1.0, label=f"{st.name} k={st.order}")
    ax.set_xlabel("grid spacing h")
    ax.set_ylabel("relative commutator residual")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False, fontsize=6, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
