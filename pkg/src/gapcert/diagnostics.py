"""Eigenfunction-level diagnostics for certified runs.

These operationalize the qualitative facts the certificate relies on: strict
positivity of the ground state, a nonpositive value of the normalized second
eigenfunction inside the perturbation support, the global sup bound after
support-normalization, the L2 bound against C18, the Harnack ratio against
C2, and the ground-state-transform gap formula evaluated on a straight tube.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    GeometryInfeasibleError,
    HypothesisViolationError,
    PositivityViolationError,
)
from .geometry import OmegaHat, Region, TubeSpec, straight_tube_volume
from .logdomain import LogValue
from .solver import EigenResult


@dataclass(frozen=True)
class GroundStateReport:
    sign_pure: bool
    min_value: float
    max_value: float
    harnack_ratio: float
    log10_harnack: float
    log10_C2: object          # mpf; astronomically large in general
    harnack_ok: bool
    region_nodes: int


def ground_state_diagnostics(
    result: EigenResult,
    omega_hat: OmegaHat,
    d: float,
    C2: LogValue,
    sign_tol: float = 1e-8,
) -> GroundStateReport:
    """Sign purity of psi0 and its Harnack ratio on the d/8-inflated region."""
    psi0 = result.psi0.ravel()[result.operator.node_of_unknown]
    amax = float(np.max(np.abs(psi0)))
    if amax == 0.0:
        raise PositivityViolationError("psi0 is identically zero")
    # orient by the dominant entry, then look for entries of the other sign
    if psi0[int(np.argmax(np.abs(psi0)))] < 0:
        psi0 = -psi0
    min_value = float(np.min(psi0))
    if min_value < -sign_tol * amax:
        raise PositivityViolationError(
            f"psi0 changes sign: min {min_value:.3e} vs sup {amax:.3e}"
        )
    pts = result.operator.unknown_points()
    in_region = omega_hat.dist(pts) < d / 8
    if not np.any(in_region):
        raise GeometryInfeasibleError("no grid nodes in the Harnack region")
    vals = psi0[in_region]
    lo, hi = float(np.min(vals)), float(np.max(vals))
    if lo <= 0:
        raise PositivityViolationError(
            f"psi0 not strictly positive on the Harnack region (min {lo:.3e})"
        )
    ratio = hi / lo
    log10_ratio = float(np.log10(ratio))
    log10_C2 = C2.log10()
    return GroundStateReport(
        sign_pure=True,
        min_value=min_value,
        max_value=amax,
        harnack_ratio=ratio,
        log10_harnack=log10_ratio,
        log10_C2=log10_C2,
        harnack_ok=bool(log10_ratio <= log10_C2),
        region_nodes=int(np.count_nonzero(in_region)),
    )


@dataclass(frozen=True)
class SecondEigenReport:
    node_min: float
    node_ok: bool
    node_tol: float
    global_max: float
    max_ok: bool
    l2_norm_sq: float
    log10_l2_budget: object   # mpf: log10(C18/|lambda1|)
    l2_ok: bool
    skipped_degenerate: bool


def second_eigenfunction_diagnostics(
    result: EigenResult,
    omega0: Region,
    C18: LogValue,
    node_tol: float = None,
    max_tol: float = 1e-6,
) -> SecondEigenReport:
    """Nonpositive-value, sup-normalization and L2 checks for psi1.

    Requires lambda1 < 0 (otherwise the run is outside the hypotheses) and a
    support-normalized result.  When the solver flagged lambda1 as part of a
    near-degenerate cluster, the simplicity-dependent checks are skipped.
    """
    if not result.lambda1 < 0:
        raise HypothesisViolationError(
            f"lambda1 = {result.lambda1:.6g} >= 0: outside the certificate hypotheses"
        )
    if not result.normalization.get("applied"):
        raise ValueError("second_eigenfunction_diagnostics needs a normalized EigenResult")
    op = result.operator
    h = op.grid.h
    if node_tol is None:
        node_tol = 10.0 * h
    skipped = bool(result.flags.get("lambda1_degenerate"))

    pts = op.node_points()
    psi1 = result.psi1.ravel()
    inside = omega0.dist(pts) <= 1e-12
    node_min = float(np.min(psi1[inside]))
    global_max = float(np.max(np.abs(psi1)))
    l2 = result.l2_norm_sq_psi1()
    budget = (C18 / LogValue.from_real(abs(result.lambda1))).log10()
    l2_ok = bool(np.log10(l2) <= budget) if l2 > 0 else True
    return SecondEigenReport(
        node_min=node_min,
        node_ok=skipped or bool(node_min <= node_tol),
        node_tol=node_tol,
        global_max=global_max,
        max_ok=skipped or bool(global_max <= 1.0 + max_tol),
        l2_norm_sq=l2,
        log10_l2_budget=budget,
        l2_ok=l2_ok,
        skipped_degenerate=skipped,
    )


@dataclass(frozen=True)
class GapFormulaReport:
    rhs: float
    inf_tube_psi0: float
    grad_l1: float
    tube_volume: float
    psi1_l2_sq: float
    tube_nodes: int


def gap_formula_rhs(result: EigenResult, tube: TubeSpec, nu: float) -> GapFormulaReport:
    """Discrete ground-state-transform lower bound for lambda1 - lambda0.

    nu * (inf_tube psi0)^2 * ||grad(psi1/psi0)||_{L1(tube)}^2
    / (|tube| * ||psi1||_{L2}^2), with centered differences for the gradient
    and the exact straight-tube volume.
    """
    op = result.operator
    grid = op.grid
    lo, hi = np.asarray(grid.lo), np.asarray(grid.hi)
    for endpoint in (tube.x_plus, tube.x_minus):
        ep = np.asarray(endpoint)
        if np.any(ep - tube.radius < lo) or np.any(ep + tube.radius > hi):
            raise GeometryInfeasibleError(f"tube endpoint {endpoint} exits the grid box")
    pts = op.node_points()
    in_tube = tube.contains(pts)
    if not np.any(in_tube):
        raise GeometryInfeasibleError("no grid nodes inside the tube; refine the grid")

    psi0 = result.psi0
    psi1 = result.psi1
    with np.errstate(divide="ignore", invalid="ignore"):
        w = psi1 / psi0
    grads = np.gradient(w, grid.h, edge_order=1)
    grad_mag = np.sqrt(np.sum([g**2 for g in grads], axis=0)).ravel()

    tube_vals = grad_mag[in_tube]
    if not np.all(np.isfinite(tube_vals)):
        raise PositivityViolationError("psi1/psi0 not finite on the tube; psi0 vanished there")
    grad_l1 = float(np.sum(tube_vals) * grid.h**grid.n)
    inf_psi0 = float(np.min(psi0.ravel()[in_tube]))
    if inf_psi0 <= 0:
        raise PositivityViolationError("psi0 not strictly positive on the tube")
    vol = straight_tube_volume(tube, grid.n)
    l2 = result.l2_norm_sq_psi1()
    rhs = nu * inf_psi0**2 * grad_l1**2 / (vol * l2)
    return GapFormulaReport(
        rhs=rhs,
        inf_tube_psi0=inf_psi0,
        grad_l1=grad_l1,
        tube_volume=vol,
        psi1_l2_sq=l2,
        tube_nodes=int(np.count_nonzero(in_tube)),
    )
