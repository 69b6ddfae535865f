"""Figures for experiment metric files.

Uses the object-oriented Figure API directly so nothing touches pyplot's
global state or the interactive backend.
"""

from __future__ import annotations

from pathlib import Path

from matplotlib.figure import Figure

from .diversity import NONPAIRWISE_FIELDS, PAIRWISE_FIELDS

RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
}

LABELS = {
    "p": "mean accuracy P",
    "rho": r"$\rho_{av}$",
    "q": r"$Q_{av}$",
    "dis": r"$dis_{av}$",
    "df": r"$DF_{av}$",
    "entropy_e": "entropy E",
    "entropy_cc": r"$E_{cc}$",
    "kw": "KW variance",
    "kappa": r"$\kappa$",
    "gd": "GD",
}


def _series(rows, column):
    xs, ys = [], []
    for r in rows:
        v = r.get(column)
        if v is not None:
            xs.append(r["chunk_index"])
            ys.append(v)
    return xs, ys


def _save(fig: Figure, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    # fixed metadata keeps repeated renders byte-identical
    fig.savefig(path, dpi=120, bbox_inches="tight", metadata={"Software": None})
    return path


def accuracy_figure(rows) -> Figure:
    fig = Figure(figsize=(6.0, 4.0))
    ax, ax_size = fig.subplots(2, 1, sharex=True, gridspec_kw={"height_ratios": [2, 1]})
    ax.plot(*_series(rows, "prequential_accuracy"), marker="o", ms=3, lw=1)
    ax.set_ylabel("prequential accuracy")
    ax.grid(alpha=0.3)
    ax_size.step(*_series(rows, "ensemble_size"), where="mid", color="tab:gray")
    ax_size.set_ylabel("members")
    ax_size.set_xlabel("chunk")
    ax_size.grid(alpha=0.3)
    return fig


def diversity_figure(rows, modes) -> Figure:
    measures = ("p",) + PAIRWISE_FIELDS + NONPAIRWISE_FIELDS
    fig = Figure(figsize=(10.0, 5.5))
    axes = fig.subplots(2, 5, sharex=True).ravel()
    for ax, name in zip(axes, measures):
        for mode in modes:
            xs, ys = _series(rows, f"{mode}_{name}")
            if xs:
                ax.plot(xs, ys, lw=1, label=mode)
        ax.set_title(LABELS[name])
        ax.grid(alpha=0.3)
    for ax in axes[5:]:
        ax.set_xlabel("chunk")
    axes[0].legend(loc="best")
    fig.tight_layout()
    return fig


def plot_metrics(metrics_path, out_dir=None) -> list[Path]:
    """Render the accuracy and diversity figures next to a metrics CSV."""
    import matplotlib

    from .experiment import read_metrics

    metrics_path = Path(metrics_path)
    columns, rows = read_metrics(metrics_path)
    modes = sorted({c.rsplit("_p", 1)[0] for c in columns if c.endswith("_p")})
    out_dir = metrics_path.parent if out_dir is None else Path(out_dir)
    stem = metrics_path.stem
    written = []
    with matplotlib.rc_context(RC):
        written.append(_save(accuracy_figure(rows), out_dir / f"{stem}_accuracy.png"))
        if modes:
            written.append(_save(diversity_figure(rows, modes), out_dir / f"{stem}_diversity.png"))
    return written
