"""End-to-end certified runs: measure, evaluate the bound, solve, check.

A run is *certified* when the solved eigenvalues sit inside the hypotheses
(lambda0 < lambda1 < 0), every eigenfunction diagnostic passes, the
ground-state-transform chain inequality holds with its 5% discretization
allowance, and the certified lower bound is dominated by the measured
relative gap in log domain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from mpmath import mp, mpf
import mpmath

from .certificate import ConstantChain, Section5Constants, constant_chain, section5_chain
from .config import RunConfig
from .diagnostics import (
    GapFormulaReport,
    GroundStateReport,
    SecondEigenReport,
    gap_formula_rhs,
    ground_state_diagnostics,
    second_eigenfunction_diagnostics,
)
from .errors import AssumptionViolationError, GeometryInfeasibleError
from .geometry import MeasurementRecord, TubeSpec, measure_certificate_inputs
from .solver import EigenResult, EllipticProblem, assemble, lowest_eigenpairs, normalize

CHAIN_TOLERANCE = 0.05  # discretization allowance in the gap-formula link


@dataclass(frozen=True)
class ValidationRecord:
    inputs: object
    chain: ConstantChain
    section5: Section5Constants
    measurement: MeasurementRecord
    lambda0: float
    lambda1: float
    relative_gap: float
    checks: dict
    certified: bool
    outcome: str                 # "certified" | "not-in-hypotheses" | "uncertified"
    eigen: EigenResult = None
    ground_state: GroundStateReport = None
    second_eigen: SecondEigenReport = None
    gap_formula: GapFormulaReport = None
    tube: TubeSpec = None

    @property
    def log10_bound(self):
        return self.chain.bound.log10()

    def log10_relative_gap(self):
        if self.relative_gap <= 0:
            return mpf("-inf")
        with mp.workprec(64):
            return mpmath.log10(mpf(self.relative_gap))

    def as_dict(self):
        with mp.workprec(max(self.chain.precision, 64)):
            log10_bound = mpmath.nstr(self.log10_bound, 20)
        out = {
            "outcome": self.outcome,
            "certified": self.certified,
            "lambda0": self.lambda0,
            "lambda1": self.lambda1,
            "relative_gap": self.relative_gap,
            "log10_bound": log10_bound,
            "checks": dict(self.checks),
            "constants": [
                {"name": name, "sign": sign, "log10": mag}
                for name, sign, mag in self.chain.as_records()
            ],
            "branches": {"alpha": self.chain.alpha_branch, "c1": self.chain.c1_branch},
            "measurement": self.measurement.as_dict() if self.measurement else None,
        }
        if self.eigen is not None:
            out["solver"] = {
                "residual0": self.eigen.residual0,
                "residual1": self.eigen.residual1,
                "flags": dict(self.eigen.flags),
                "lambda2": self.eigen.lambda2,
                "h": self.eigen.operator.grid.h,
            }
        if self.ground_state is not None:
            out["ground_state"] = {
                "harnack_ratio": self.ground_state.harnack_ratio,
                "log10_harnack": self.ground_state.log10_harnack,
                "log10_C2": mpmath.nstr(self.ground_state.log10_C2, 20),
                "harnack_ok": self.ground_state.harnack_ok,
            }
        if self.second_eigen is not None:
            out["second_eigenfunction"] = {
                "node_min": self.second_eigen.node_min,
                "node_tol": self.second_eigen.node_tol,
                "global_max": self.second_eigen.global_max,
                "l2_norm_sq": self.second_eigen.l2_norm_sq,
                "log10_l2_budget": mpmath.nstr(self.second_eigen.log10_l2_budget, 20),
                "skipped_degenerate": self.second_eigen.skipped_degenerate,
            }
        if self.gap_formula is not None:
            out["gap_formula"] = {
                "rhs": self.gap_formula.rhs,
                "inf_tube_psi0": self.gap_formula.inf_tube_psi0,
                "grad_l1": self.gap_formula.grad_l1,
                "tube_volume": self.gap_formula.tube_volume,
                "tube_nodes": self.gap_formula.tube_nodes,
            }
        return out


def pick_tube(problem, r0: float, h: float) -> TubeSpec:
    """Straight tube between the two farthest support-ball centers."""
    centers, _radii = problem.omega0.support_balls()
    if len(centers) < 2:
        return None
    diff = centers[:, None, :] - centers[None, :, :]
    dist = np.linalg.norm(diff, axis=2)
    i, j = np.unravel_index(int(np.argmax(dist)), dist.shape)
    if dist[i, j] < 2 * h:
        return None
    return TubeSpec(tuple(centers[i]), tuple(centers[j]), r0)


def certify_and_solve(cfg: RunConfig) -> ValidationRecord:
    """Measure, certify and solve one configuration.

    A failed geometric assumption raises; lambda1 >= 0 produces an emitted,
    uncertified record with outcome "not-in-hypotheses".
    """
    problem = cfg.require_problem()
    meas = cfg.measurement
    inputs, record = measure_certificate_inputs(
        problem.domain,
        problem.omega0,
        problem.omega_hat,
        problem.A,
        problem.V,
        q=cfg.certificate.q,
        vhat_exponent_variant=cfg.certificate.vhat_exponent_variant,
        step=meas.step,
        refine_tol=meas.refine_tol,
        max_levels=meas.max_levels,
        supersample=meas.supersample,
        volume_method=meas.volume_method,
        seed=meas.seed,
    )
    if not record.report.all_passed:
        failed = [c.name for c in record.report.checks if c.passed is False]
        raise AssumptionViolationError(f"geometric assumptions failed: {', '.join(failed)}")

    precision = cfg.certificate.precision_bits
    chain = constant_chain(inputs, precision)
    s5 = section5_chain(inputs, precision)

    op = assemble(
        EllipticProblem(problem.domain, problem.A, problem.V, problem.omega0, problem.omega_hat),
        cfg.solver.h,
        averaging=cfg.solver.averaging,
    )
    eigen = lowest_eigenpairs(op, k=2, tol=cfg.solver.tol, seed=cfg.solver.seed)
    lam0, lam1 = eigen.lambda0, eigen.lambda1
    relative_gap = (lam1 - lam0) / abs(lam1) if lam1 != 0 else float("nan")

    checks = {"assumptions": True}
    if lam1 >= 0:
        checks["hypotheses"] = False
        return ValidationRecord(
            inputs=inputs, chain=chain, section5=s5, measurement=record,
            lambda0=lam0, lambda1=lam1, relative_gap=float("nan"),
            checks=checks, certified=False, outcome="not-in-hypotheses",
            eigen=eigen,
        )
    checks["hypotheses"] = True

    eigen = normalize(eigen, problem.omega0)
    gs = ground_state_diagnostics(eigen, problem.omega_hat, inputs.d, s5.C2)
    se = second_eigenfunction_diagnostics(eigen, problem.omega0, chain.C18)
    checks["sign_purity"] = gs.sign_pure
    checks["harnack"] = gs.harnack_ok
    checks["node"] = se.node_ok
    checks["normalization_max"] = se.max_ok
    checks["l2_bound"] = se.l2_ok

    tube = pick_tube(problem, inputs.r0, op.grid.h)
    gf = None
    if tube is not None:
        gf = gap_formula_rhs(eigen, tube, inputs.nu)
        gap = lam1 - lam0
        checks["gap_formula_chain"] = bool(gap >= (1 - CHAIN_TOLERANCE) * gf.rhs)
    else:
        checks["gap_formula_chain"] = None

    with mp.workprec(precision):
        log_gap = mpmath.log10(mpf(relative_gap)) if relative_gap > 0 else mpf("-inf")
        checks["main_inequality"] = bool(log_gap >= chain.bound.log10())

    certified = all(v is not False for v in checks.values())
    return ValidationRecord(
        inputs=inputs, chain=chain, section5=s5, measurement=record,
        lambda0=lam0, lambda1=lam1, relative_gap=relative_gap,
        checks=checks, certified=certified,
        outcome="certified" if certified else "uncertified",
        eigen=eigen, ground_state=gs, second_eigen=se, gap_formula=gf, tube=tube,
    )
