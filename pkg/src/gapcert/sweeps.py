"""Parameter sweeps over the four asymptotic regimes, with shape checks.

Each sweep derives per-point configurations from the base problem, runs the
full certify-and-solve pipeline, and fits the regime's predicted shape:

* separation: straight tunneling decay of the measured gap, and constancy of
  ln(bound) + c11*L + (n+1)*ln(L) past first-branch activation of c1;
* coupling: monotone |lambda1| decay toward the spectral threshold;
* semiclassical: the (a + b/sqrt(nu) + c*ln(nu)/sqrt(nu)) template for
  ln(bound), fitted in arbitrary precision because ln(bound) dwarfs doubles;
* contrast: bound validity and representability at growing contrast.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass

import numpy as np
from mpmath import mp, mpf
import mpmath

from .config import RunConfig, parse_config
from .errors import ConfigError, GapcertError, InsufficientDataError
from .validate import ValidationRecord, certify_and_solve

SHAPE_RTOL = 0.01  # relative constancy demanded of the separation shape


@dataclass(frozen=True)
class SweepPoint:
    param: float
    record: ValidationRecord = None
    error: str = None

    @property
    def skipped(self):
        return self.record is None


@dataclass(frozen=True)
class SweepResult:
    regime: str
    points: tuple
    fits: dict

    def certified_points(self):
        return [p for p in self.points if p.record is not None and p.record.certified]


def _point_raw(cfg: RunConfig, regime: str, value: float) -> dict:
    raw = copy.deepcopy(cfg.raw)
    raw.pop("sweep", None)
    problem = raw.get("problem")
    if problem is None:
        raise ConfigError("sweeps need a 'problem' section")
    if cfg.sweep and cfg.sweep.h:
        raw.setdefault("solver", {})["h"] = cfg.sweep.h
    if cfg.sweep:
        raw.setdefault("measurement", {})["max_levels"] = cfg.sweep.measurement_max_levels

    if regime == "separation":
        wells = problem["V"].get("wells", [])
        if len(wells) != 2:
            raise ConfigError("separation sweeps need exactly two wells in the base problem")
        radius = wells[0]["radius"]
        depth = wells[0]["depth"]
        base_centers = sorted(w["center"][0] for w in wells)
        base_sep = base_centers[1] - base_centers[0]
        half0 = problem["box"]["hi"][0]
        clearance = half0 - base_sep / 2 - radius
        half = value / 2 + radius + clearance
        h = raw.get("solver", {}).get("h", 1.0 / 64)
        if abs(2 * half / h - round(2 * half / h)) > 1e-9:
            raise ConfigError(
                f"separation {value} yields box extent {2*half} not divisible by h={h}"
            )
        problem["box"] = {"lo": [-half, -half], "hi": [half, half]}
        for s, w in zip((-1, 1), wells):
            w["center"] = [s * value / 2, 0.0]
        problem["omega0"] = {
            "disks": [{"center": w["center"], "radius": w["radius"]} for w in wells]
        }
    elif regime == "coupling":
        wells = problem["V"].get("wells", [])
        if not wells:
            raise ConfigError("coupling sweeps need wells in the base problem")
        for w in wells:
            w["depth"] = value
    elif regime == "semiclassical":
        A = problem["A"]
        if A.get("type") != "constant":
            raise ConfigError("semiclassical sweeps need a constant-coefficient base")
        diag = A.get("diag") or [A.get("value", 1.0)] * 2
        base_nu = A.get("nu") or min(diag)
        kappa = value / base_nu
        A["diag"] = [d * kappa for d in diag]
        if A.get("nu"):
            A["nu"] = A["nu"] * kappa
        if A.get("mu"):
            A["mu"] = A["mu"] * kappa
        A.pop("value", None)
    elif regime == "contrast":
        A = problem["A"]
        if A.get("type") != "checkerboard":
            raise ConfigError("contrast sweeps need a checkerboard base coefficient")
        A["low"] = value
        raw.setdefault("solver", {})["averaging"] = "harmonic"
    else:
        raise ConfigError(f"unknown sweep regime {regime!r}")
    return raw


def run_sweep(cfg: RunConfig) -> SweepResult:
    if cfg.sweep is None:
        raise ConfigError("config has no 'sweep' section")
    regime = cfg.sweep.regime
    points = []
    for value in cfg.sweep.values:
        raw = _point_raw(cfg, regime, value)
        try:
            record = certify_and_solve(parse_config(raw))
            points.append(SweepPoint(param=float(value), record=record))
        except GapcertError as exc:
            if exc.exit_code == 2:
                points.append(SweepPoint(param=float(value), error=str(exc)))
            else:
                raise
    points.sort(key=lambda p: p.param)
    fits = _fit(regime, points, cfg.certificate.precision_bits)
    return SweepResult(regime=regime, points=tuple(points), fits=fits)


# ----------------------------------------------------------------------
# fits


def _linear_fit(x, y):
    coeffs = np.polyfit(x, y, 1)
    yhat = np.polyval(coeffs, x)
    ss_res = float(np.sum((y - yhat) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(coeffs[0]), float(coeffs[1]), r2


def _fit(regime, points, precision):
    certified = [p for p in points if p.record is not None and p.record.certified]
    if regime == "separation":
        return _fit_separation(points, certified, precision)
    if regime == "coupling":
        return _fit_coupling(points, certified)
    if regime == "semiclassical":
        return _fit_semiclassical(points, certified, precision)
    if regime == "contrast":
        return _fit_contrast(points, certified)
    raise ConfigError(f"unknown sweep regime {regime!r}")


def _fit_separation(points, certified, precision):
    good = [p for p in certified if p.record.lambda1 < 0 and p.record.relative_gap > 0]
    if len(good) < 4:
        raise InsufficientDataError(
            f"separation fit needs at least 4 converged points, got {len(good)}"
        )
    s = np.array([p.param for p in good])
    gaps = np.array([p.record.lambda1 - p.record.lambda0 for p in good])
    slope, intercept, r2 = _linear_fit(s, np.log(gaps))
    decay_rate = -slope

    first_branch = [p for p in good if p.record.chain.c1_branch == "harnack"]
    shape = {"checked": False}
    if len(first_branch) >= 2:
        with mp.workprec(precision):
            ref = first_branch[0].record.chain
            c11 = ref.c11.to_mpf()
            n = first_branch[0].record.inputs.n
            ys = []
            for p in first_branch:
                L = mpf(p.record.inputs.L)
                ys.append(p.record.chain.bound.ln() + c11 * L + (n + 1) * mpmath.ln(L))
            mean = sum(ys) / len(ys)
            dev = max(abs(y - mean) for y in ys) / abs(mean)
            shape = {
                "checked": True,
                "n_points": len(first_branch),
                "relative_deviation": float(dev),
                "within_tolerance": bool(dev <= SHAPE_RTOL),
                "log10_c10": mpmath.nstr(mean / mpmath.ln(mpf(10)), 20),
            }
    return {
        "gap_decay": {
            "rate": decay_rate,
            "intercept": intercept,
            "r_squared": r2,
            "n_points": len(good),
        },
        "certificate_shape": shape,
    }


def _fit_coupling(points, certified):
    # deep wells first: |lambda1| should decay toward the threshold
    ordered = sorted(certified, key=lambda p: p.param)
    lam1 = [abs(p.record.lambda1) for p in ordered]
    decreasing = all(a > b for a, b in zip(lam1, lam1[1:]))
    threshold = None
    for p in sorted(points, key=lambda q: q.param):
        if p.record is not None and p.record.outcome == "not-in-hypotheses":
            threshold = p.param
            break
    return {
        "lambda1_abs_decreasing": bool(decreasing),
        "lambda1_abs": {str(p.param): abs(p.record.lambda1) for p in ordered},
        "threshold_param": threshold,
        "bound_positive_on_certified": all(
            p.record.chain.bound.is_positive for p in certified
        ),
    }


def _fit_semiclassical(points, certified, precision):
    ordered = sorted(certified, key=lambda p: -p.param)  # decreasing nu
    gaps = [p.record.relative_gap for p in ordered]
    numeric_decreasing = all(a > b for a, b in zip(gaps, gaps[1:]))
    fit = {"checked": False}
    if len(certified) >= 4:
        with mp.workprec(precision):
            nus = [mpf(p.param) for p in ordered]
            ys = [p.record.chain.bound.ln() for p in ordered]
            X = [[mpf(1), nu ** mpf("-0.5"), nu ** mpf("-0.5") * mpmath.ln(nu)] for nu in nus]
            ata = mp.matrix(3, 3)
            atb = mp.matrix(3, 1)
            for row, y in zip(X, ys):
                for i in range(3):
                    atb[i] += row[i] * y
                    for j in range(3):
                        ata[i, j] += row[i] * row[j]
            beta = mp.lu_solve(ata, atb)
            yhat = [sum(row[i] * beta[i] for i in range(3)) for row in X]
            mean = sum(ys) / len(ys)
            ss_res = sum((y - yh) ** 2 for y, yh in zip(ys, yhat))
            ss_tot = sum((y - mean) ** 2 for y in ys)
            r2 = float(1 - ss_res / ss_tot) if ss_tot > 0 else 1.0
            fit = {
                "checked": True,
                "r_squared": r2,
                "coefficients_log10": [mpmath.nstr(b / mpmath.ln(mpf(10)), 12) for b in beta],
            }
    return {
        "numeric_gap_decreasing": bool(numeric_decreasing),
        "relative_gaps": {str(p.param): p.record.relative_gap for p in ordered},
        "template_fit": fit,
    }


def _fit_contrast(points, certified):
    log_scales = {}
    for p in certified:
        with mp.workprec(p.record.chain.precision):
            val = mpmath.log10(abs(p.record.chain.bound.log10()))
        log_scales[str(p.param)] = float(val)
    return {
        "all_certified_satisfy_main_inequality": all(
            p.record.checks.get("main_inequality") for p in certified
        ),
        "bound_finite_on_certified": all(
            p.record.chain.bound.is_finite() and p.record.chain.bound.is_positive
            for p in certified
        ),
        "log10_abs_log10_bound": log_scales,
        "n_certified": len(certified),
        "n_skipped": sum(1 for p in points if p.skipped),
    }
