"""Rendering: human-readable tables, deterministic CSV/JSON, and figures.

Numbers that no double can hold are printed through their log10: either
"log10(x) = -M" when M itself fits a double, or "log10(x) ~ -10^E" with
E = log10(|log10(x)|) otherwise.  CSV and JSON writers format floats via
repr and mpf values via fixed-digit strings, so identical runs produce
byte-identical files.
"""

from __future__ import annotations

import json
import os

import numpy as np
from mpmath import mp, mpf
import mpmath

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .logdomain import LogValue  # noqa: E402
from .solver import save_field_binary, save_field_csv  # noqa: E402


def render_log10(value: LogValue, digits: int = 6) -> str:
    """Human rendering of a log-domain number of any magnitude."""
    if value.sign == 0:
        return "0"
    sign = "-" if value.sign < 0 else ""
    with mp.workprec(max(mp.prec, 80)):
        l10 = value.log10()
        if abs(l10) < mpf(10) ** 300:
            return f"{sign}10^({mpmath.nstr(l10, digits)})"
        mag = mpmath.log10(abs(l10))
        return f"{sign}10^(-10^{mpmath.nstr(mag, digits)})" if l10 < 0 else (
            f"{sign}10^(+10^{mpmath.nstr(mag, digits)})"
        )


def chain_table(chain) -> str:
    """Fixed-width table of the constant chain's log10 values."""
    lines = [f"{'constant':>10s}  {'sign':>4s}  log10(value)"]
    for name, sign, mag in chain.as_records():
        lines.append(f"{name:>10s}  {'+' if sign > 0 else ('0' if sign == 0 else '-'):>4s}  {mag}")
    lines.append(f"{'':>10s}  branches: alpha={chain.alpha_branch}, c1={chain.c1_branch}")
    return "\n".join(lines)


def write_json(path, payload: dict):
    with open(path, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


def _csv_cell(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_sweep_csv(path, sweep_result):
    """Columns: param, lambda0, lambda1, relative_gap, log10_bound, certified, check_flags."""
    rows = []
    for p in sweep_result.points:
        if p.record is None:
            rows.append([p.param, float("nan"), float("nan"), float("nan"),
                         "", False, "skipped=1"])
            continue
        r = p.record
        with mp.workprec(r.chain.precision):
            log10_bound = mpmath.nstr(r.chain.bound.log10(), 20)
        flags = ";".join(
            f"{k}={'1' if v else ('0' if v is False else 'na')}"
            for k, v in sorted(r.checks.items())
        )
        rows.append([p.param, r.lambda0, r.lambda1, r.relative_gap,
                     log10_bound, r.certified, flags])
    with open(path, "w", newline="") as f:
        f.write("param,lambda0,lambda1,relative_gap,log10_bound,certified,check_flags\n")
        for row in rows:
            f.write(",".join(_csv_cell(v) for v in row) + "\n")


def sweep_summary(sweep_result) -> dict:
    return {
        "regime": sweep_result.regime,
        "fits": sweep_result.fits,
        "points": [
            {
                "param": p.param,
                "skipped": p.skipped,
                "error": p.error,
                **({} if p.record is None else {
                    "outcome": p.record.outcome,
                    "certified": p.record.certified,
                    "lambda0": p.record.lambda0,
                    "lambda1": p.record.lambda1,
                    "relative_gap": p.record.relative_gap,
                    "checks": p.record.checks,
                }),
            }
            for p in sweep_result.points
        ],
    }


# ----------------------------------------------------------------------
# figures


def plot_sweep(path, sweep_result):
    """Two panels: measured gap vs parameter, and the bound's log10 scale."""
    pts = [p for p in sweep_result.points if p.record is not None]
    params = [p.param for p in pts]
    gaps = [max(p.record.lambda1 - p.record.lambda0, 0.0) for p in pts]
    neglog = []
    for p in pts:
        with mp.workprec(p.record.chain.precision):
            neglog.append(float(mpmath.log10(abs(p.record.chain.bound.log10()))))
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.4))
    certified = [p.record.certified for p in pts]
    colors = ["tab:blue" if c else "tab:red" for c in certified]
    ax1.scatter(params, gaps, c=colors)
    positive = [g > 0 for g in gaps]
    if all(positive) and len(gaps) > 1:
        ax1.set_yscale("log")
    ax1.set_xlabel(sweep_result.regime + " parameter")
    ax1.set_ylabel("lambda1 - lambda0")
    ax1.set_title("measured gap")
    ax2.scatter(params, neglog, c=colors)
    ax2.set_xlabel(sweep_result.regime + " parameter")
    ax2.set_ylabel("log10 |log10 bound|")
    ax2.set_title("certified bound scale")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_eigenfunctions(path, record):
    """Heatmaps of the two eigenfunctions for 2D runs."""
    eigen = record.eigen
    if eigen is None or eigen.operator.grid.n != 2:
        return False
    grid = eigen.operator.grid
    extent = [grid.lo[0], grid.hi[0], grid.lo[1], grid.hi[1]]
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.8))
    for ax, field, lam, name in (
        (axes[0], eigen.psi0, eigen.lambda0, "psi0"),
        (axes[1], eigen.psi1, eigen.lambda1, "psi1"),
    ):
        im = ax.imshow(field.T, origin="lower", extent=extent, cmap="RdBu_r")
        ax.set_title(f"{name}, lambda = {lam:.6g}")
        fig.colorbar(im, ax=ax, shrink=0.85)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return True


def export_fields(outdir, record, fmt="csv"):
    """Write the eigenfunctions: always the dense binary layout, plus CSV
    for plotting when that format is selected."""
    eigen = record.eigen
    if eigen is None:
        return []
    grid = eigen.operator.grid
    written = []
    for name, field in (("psi0", eigen.psi0), ("psi1", eigen.psi1)):
        p = os.path.join(outdir, f"{name}.bin")
        save_field_binary(p, grid, field)
        written.append(p)
        if fmt == "csv":
            p = os.path.join(outdir, f"{name}.csv")
            save_field_csv(p, grid, field)
            written.append(p)
    return written
