"""Line-plot and CDF rendering for harness result CSVs.

The functions here never write to the input file; output is a new image at
``spec.out_path``, so re-running with the same spec is idempotent.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import matplotlib
import numpy as np
import pandas as pd

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

# Preferred legend order; schemes not listed here follow alphabetically.
SCHEME_ORDER = ("bd", "mtzf", "bd-random", "mtzf-random")

LABELS = {
    "bd": "BD beamforming",
    "mtzf": "MTZF beamforming",
    "bd-random": "BD, random phases",
    "mtzf-random": "MTZF, random phases",
}

MIN_RATE_RE = re.compile(r"^min_rate_g(\d+)$")

PAPER_STYLE = {
    "figure.figsize": (5.2, 3.9),
    "figure.dpi": 120,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.4,
    "grid.linewidth": 0.6,
    "lines.linewidth": 1.4,
    "lines.markersize": 4.5,
    "legend.fontsize": 8,
    "legend.framealpha": 0.9,
}


class PlotInputError(ValueError):
    """Raised when the input CSV does not match the expected schema."""


@dataclass
class PlotSpec:
    """What to read, what kind of figure to draw, and where to write it.

    ``style_by`` names the column whose values key the solid/dashed line
    styling; by default the scheme column is used, with the random-phase
    baselines drawn dashed.
    """

    input_csv: str
    kind: str  # "sweep" | "cdf"
    out_path: str
    style: str = "default"  # "default" | "paper"
    x_label: str = "sweep value"
    y_label: str = ""
    style_by: str = "scheme"
    dashed_values: tuple = ("bd-random", "mtzf-random")
    extra: dict = field(default_factory=dict)


def load_results(path: str, required: tuple) -> pd.DataFrame:
    """Read a result CSV and check the columns a plot needs are present."""
    try:
        df = pd.read_csv(path, dtype={"scheme": str, "status": str})
    except FileNotFoundError:
        raise PlotInputError(f"input file not found: {path}")
    except pd.errors.EmptyDataError:
        raise PlotInputError(f"input file is empty: {path}")
    missing = [c for c in required if c not in df.columns]
    if missing:
        raise PlotInputError(
            f"{path}: missing required column(s) {', '.join(missing)}; "
            f"found {', '.join(df.columns)}")
    if "status" in df.columns:
        df = df[df["status"] == "ok"]
    return df


def min_rate_columns(df: pd.DataFrame) -> list:
    cols = [(int(m.group(1)), c) for c in df.columns
            for m in [MIN_RATE_RE.match(c)] if m]
    return [c for _, c in sorted(cols)]


def _scheme_order(schemes) -> list:
    known = [s for s in SCHEME_ORDER if s in schemes]
    rest = sorted(s for s in schemes if s not in SCHEME_ORDER)
    return known + rest


def _linestyle(spec: PlotSpec, value) -> str:
    return "--" if value in spec.dashed_values else "-"


def _apply_style(spec: PlotSpec):
    if spec.style == "paper":
        return plt.rc_context(PAPER_STYLE)
    return plt.rc_context({})


def plot_sweep(spec: PlotSpec) -> str:
    """Mean sum-rate vs. sweep value, one line per scheme, ±stderr band."""
    df = load_results(spec.input_csv,
                      ("scheme", "sweep_value", "trial", "sum_rate"))
    if df.empty:
        raise PlotInputError(f"{spec.input_csv}: no usable rows")
    markers = ["o", "s", "^", "v", "D", "x"]
    with _apply_style(spec):
        fig, ax = plt.subplots()
        for i, scheme in enumerate(_scheme_order(df["scheme"].unique())):
            sub = df[df["scheme"] == scheme]
            stats = (sub.groupby("sweep_value")["sum_rate"]
                     .agg(["mean", "sem", "count"]).sort_index())
            x = stats.index.to_numpy(dtype=float)
            mean = stats["mean"].to_numpy()
            sem = np.nan_to_num(stats["sem"].to_numpy())
            key = sub[spec.style_by].iloc[0] if spec.style_by in sub else scheme
            line, = ax.plot(x, mean, marker=markers[i % len(markers)],
                            linestyle=_linestyle(spec, key),
                            label=LABELS.get(scheme, scheme))
            ax.fill_between(x, mean - sem, mean + sem, alpha=0.2,
                            color=line.get_color())
        ax.set_xlabel(spec.x_label)
        ax.set_ylabel(spec.y_label or "sum rate (bit/s/Hz)")
        ax.legend()
        fig.tight_layout()
        fig.savefig(spec.out_path)
        plt.close(fig)
    return spec.out_path


def empirical_cdf(samples: np.ndarray):
    """Sorted sample points and CDF heights; step from 0 up to 1."""
    xs = np.sort(np.asarray(samples, dtype=float))
    ys = np.arange(1, xs.size + 1) / xs.size
    return xs, ys


def plot_cdf(spec: PlotSpec) -> str:
    """Empirical CDF of per-group minimum rates, one curve per (scheme, group)."""
    df = load_results(spec.input_csv, ("scheme",))
    groups = min_rate_columns(df)
    if not groups:
        raise PlotInputError(
            f"{spec.input_csv}: no min_rate_g<k> columns found; "
            f"found {', '.join(df.columns)}")
    df = df.dropna(subset=groups)
    if df.empty:
        raise PlotInputError(f"{spec.input_csv}: no usable rows")
    with _apply_style(spec):
        fig, ax = plt.subplots()
        for scheme in _scheme_order(df["scheme"].unique()):
            sub = df[df["scheme"] == scheme]
            for col in groups:
                xs, ys = empirical_cdf(sub[col].to_numpy())
                label = f"{LABELS.get(scheme, scheme)}, group {col.rsplit('g', 1)[1]}"
                ax.step(np.concatenate(([xs[0]], xs)),
                        np.concatenate(([0.0], ys)),
                        where="post", linestyle=_linestyle(spec, scheme),
                        label=label)
        ax.set_xlabel(spec.x_label if spec.x_label != "sweep value"
                      else "minimum rate (bit/s/Hz)")
        ax.set_ylabel(spec.y_label or "empirical CDF")
        ax.set_ylim(-0.02, 1.02)
        ax.legend()
        fig.tight_layout()
        fig.savefig(spec.out_path)
        plt.close(fig)
    return spec.out_path
