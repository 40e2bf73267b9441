#!/usr/bin/env python3
"""Render sweep CSVs (the simulator's output format) as comparison figures.

Input files follow the sweep schema: first column is the swept variable,
then ``<name>_success`` / ``<name>_stderr`` pairs for each decoder, then an
optional ``bound_success`` column.  Decoder series are drawn with error
bars; bound series are drawn as solid reference curves.  An optional
vertical line marks a sample-complexity threshold.

Usage:
    python plot_sweep.py --csv sweep.csv [more.csv ...] \
        --labels "lasso" "reweighted" "IT bound" \
        --out figure.png [--vline 4.0] [--x-label "N_n"] [--y-label ...]

Labels are assigned to series in file order, within each file in header
order (decoder columns first, then the bound column).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


class SchemaError(ValueError):
    """A CSV does not follow the sweep schema; the message names the issue."""


@dataclass
class Series:
    x: list
    y: list
    stderr: list | None
    label: str
    is_bound: bool


@dataclass
class FigureSpec:
    csv_paths: list
    labels: list
    x_label: str = ""
    y_label: str = "probability of exact support recovery"
    output_path: str = "figure.png"
    vline: float | None = None

    def __post_init__(self):
        if not self.csv_paths:
            raise SchemaError("at least one CSV path is required")


def read_sweep_csv(path: str) -> tuple[str, dict]:
    """Parse one sweep CSV into (x column name, {column: float list})."""
    with open(path) as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if len(lines) < 2:
        raise SchemaError(f"{path}: need a header row and at least one data row")
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    for row in rows:
        if len(row) != len(header):
            raise SchemaError(f"{path}: ragged row {row!r}")
    columns = {name: [float(row[j]) for row in rows]
               for j, name in enumerate(header)}
    return header[0], columns


def extract_series(path: str) -> tuple[str, list]:
    """All series in one file: decoder (with error bars), then bound."""
    x_name, columns = read_sweep_csv(path)
    x = columns[x_name]
    series = []
    for name in columns:
        if name.endswith("_success") and name != "bound_success":
            decoder = name[: -len("_success")]
            err_col = f"{decoder}_stderr"
            if err_col not in columns:
                raise SchemaError(
                    f"{path}: column {err_col!r} is missing (every decoder "
                    f"success column needs its stderr twin)")
            series.append(Series(x=x, y=columns[name], stderr=columns[err_col],
                                 label=decoder, is_bound=False))
    if "bound_success" in columns:
        series.append(Series(x=x, y=columns["bound_success"], stderr=None,
                             label="bound", is_bound=True))
    if not series:
        raise SchemaError(f"{path}: no *_success columns found")
    return x_name, series


def build_figure(spec: FigureSpec):
    """Assemble the matplotlib figure for ``spec`` (no file output)."""
    all_series = []
    x_names = []
    for path in spec.csv_paths:
        x_name, series = extract_series(path)
        x_names.append(x_name)
        all_series.extend(series)
    if spec.labels:
        if len(spec.labels) != len(all_series):
            raise SchemaError(
                f"got {len(spec.labels)} labels for {len(all_series)} series "
                f"({[s.label for s in all_series]})")
        for s, label in zip(all_series, spec.labels):
            s.label = label

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    handles = []
    for s in all_series:
        if s.is_bound:
            handles.append(ax.plot(s.x, s.y, "-", linewidth=2.2,
                                   label=s.label)[0])
        else:
            handles.append(ax.errorbar(s.x, s.y, yerr=s.stderr, linestyle="--",
                                       marker="o", markersize=4, capsize=3,
                                       label=s.label))
    if spec.vline is not None:
        ax.axvline(spec.vline, color="black", linestyle=":", linewidth=1.5)
    ax.set_xlabel(spec.x_label or x_names[0])
    ax.set_ylabel(spec.y_label)
    ax.set_ylim(-0.05, 1.05)
    ax.grid(True, alpha=0.3)
    ax.legend(handles=handles, loc="best")  # keep series order
    fig.tight_layout()
    return fig, ax


def plot_sweep(spec: FigureSpec) -> None:
    """Render the figure described by ``spec`` to spec.output_path."""
    fig, _ = build_figure(spec)
    fig.savefig(spec.output_path, dpi=150)
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Plot sweep CSVs as recovery-probability figures.")
    parser.add_argument("--csv", nargs="+", required=True, metavar="FILE")
    parser.add_argument("--labels", nargs="*", default=[],
                        help="one label per series (file order, decoders "
                             "before bound); defaults to column names")
    parser.add_argument("--out", required=True, help="output image (png/svg)")
    parser.add_argument("--vline", type=float, default=None,
                        help="vertical reference line (e.g. necessary N)")
    parser.add_argument("--x-label", default="")
    parser.add_argument("--y-label", default="probability of exact support recovery")
    args = parser.parse_args(argv)
    try:
        plot_sweep(FigureSpec(csv_paths=args.csv, labels=args.labels,
                              x_label=args.x_label, y_label=args.y_label,
                              output_path=args.out, vline=args.vline))
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
