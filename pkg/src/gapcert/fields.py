"""Coefficient and potential fields, parsed from config dictionaries.

Fields evaluate vectorized on (N, n) point arrays.  Coefficient fields carry
their declared ellipticity window (nu, mu); the declared window may be wider
than the tight range of the field, but assembly verifies the samples stay
inside it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


# ----------------------------------------------------------------------
# potentials
class PotentialField:
    def __call__(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def scaled(self, kappa: float) -> "PotentialField":
        return _ScaledPotential(self, kappa)


@dataclass(frozen=True)
class ConstantPotential(PotentialField):
    value: float = 0.0

    def __call__(self, pts):
        return np.full(pts.shape[0], self.value)


@dataclass(frozen=True)
class WellsPotential(PotentialField):
    """Sum of disk-supported flat wells over a constant background."""

    wells: tuple  # ((center tuple, radius, depth), ...)
    background: float = 0.0

    def __call__(self, pts):
        out = np.full(pts.shape[0], self.background)
        for center, radius, depth in self.wells:
            c = np.asarray(center)
            inside = np.sum((pts - c) ** 2, axis=1) < radius**2
            out = out + np.where(inside, depth, 0.0)
        return out


@dataclass(frozen=True)
class _ScaledPotential(PotentialField):
    base: PotentialField
    kappa: float

    def __call__(self, pts):
        return self.kappa * self.base(pts)


def parse_potential(spec: dict, n: int) -> PotentialField:
    kind = spec.get("type")
    if kind == "constant":
        return ConstantPotential(float(spec.get("value", 0.0)))
    if kind == "wells":
        wells = tuple(
            (tuple(float(x) for x in w["center"]), float(w["radius"]), float(w["depth"]))
        for w in spec["wells"])
        for center, radius, depth in wells:
            if len(center) != n:
                raise ConfigError(f"well center {center} has wrong dimension (expected {n})")
            if radius <= 0:
                raise ConfigError("well radius must be positive")
        return WellsPotential(wells, float(spec.get("background", 0.0)))
    raise ConfigError(f"unknown potential type {kind!r}")


# ----------------------------------------------------------------------
# coefficients
class CoefficientField:
    """Symmetric coefficient matrix A(x) with declared ellipticity (nu, mu)."""

    nu: float
    mu: float

    def diag(self, pts: np.ndarray) -> np.ndarray:
        """Diagonal entries, shape (N, n)."""
        raise NotImplementedError

    def offdiag(self, pts: np.ndarray) -> np.ndarray:
        """The (0,1) entry, shape (N,); only n == 2 supports nonzero values."""
        return np.zeros(pts.shape[0])

    @property
    def has_offdiag(self) -> bool:
        return False

    def scaled(self, kappa: float) -> "CoefficientField":
        return _ScaledCoefficient(self, kappa)


@dataclass(frozen=True)
class ConstantCoefficient(CoefficientField):
    diag_values: tuple
    a12: float = 0.0
    nu: float = 0.0
    mu: float = 0.0

    def __post_init__(self):
        n = len(self.diag_values)
        if self.a12 and n != 2:
            raise ConfigError("off-diagonal coefficient only supported for n = 2")
        lo, hi = _sym_range(self.diag_values, self.a12)
        nu = self.nu if self.nu else lo
        mu = self.mu if self.mu else hi
        if not 0 < nu:
            raise ConfigError("coefficient matrix must be positive definite")
        if nu > mu:
            raise ConfigError(f"declared ellipticity window is empty: nu={nu} > mu={mu}")
        # nu == mu is fine for plain solves; the certificate itself insists on
        # a strict window and rejects it at CertificateInputs construction
        if lo < nu - 1e-12 or hi > mu + 1e-12:
            raise ConfigError(
                f"coefficient range [{lo}, {hi}] escapes the declared window [{nu}, {mu}]"
            )
        object.__setattr__(self, "nu", float(nu))
        object.__setattr__(self, "mu", float(mu))

    def diag(self, pts):
        return np.tile(np.asarray(self.diag_values, dtype=float), (pts.shape[0], 1))

    def offdiag(self, pts):
        return np.full(pts.shape[0], self.a12)

    @property
    def has_offdiag(self):
        return self.a12 != 0.0


def _sym_range(diag_values, a12):
    if len(diag_values) == 2 and a12:
        a, b = diag_values
        mid, rad = (a + b) / 2, np.hypot((a - b) / 2, a12)
        return mid - rad, mid + rad
    return min(diag_values), max(diag_values)


@dataclass(frozen=True)
class CheckerboardCoefficient(CoefficientField):
    """Isotropic two-valued coefficient on a unit-lattice checkerboard."""

    low: float
    high: float
    period: float = 1.0
    nu: float = 0.0
    mu: float = 0.0

    def __post_init__(self):
        if not 0 < self.low < self.high:
            raise ConfigError("checkerboard needs 0 < low < high")
        object.__setattr__(self, "nu", float(self.low))
        object.__setattr__(self, "mu", float(self.high))

    def _values(self, pts):
        cells = np.floor(pts / self.period).astype(np.int64)
        parity = np.sum(cells, axis=1) % 2
        return np.where(parity == 0, self.low, self.high)

    def diag(self, pts):
        v = self._values(pts)
        return np.repeat(v[:, None], pts.shape[1], axis=1)


@dataclass(frozen=True)
class _ScaledCoefficient(CoefficientField):
    base: CoefficientField
    kappa: float

    @property
    def nu(self):
        return self.base.nu * self.kappa

    @property
    def mu(self):
        return self.base.mu * self.kappa

    def diag(self, pts):
        return self.kappa * self.base.diag(pts)

    def offdiag(self, pts):
        return self.kappa * self.base.offdiag(pts)

    @property
    def has_offdiag(self):
        return self.base.has_offdiag


def parse_coefficient(spec: dict, n: int) -> CoefficientField:
    kind = spec.get("type")
    if kind == "constant":
        diag = spec.get("diag")
        if diag is None:
            diag = [float(spec.get("value", 1.0))] * n
        if len(diag) != n:
            raise ConfigError(f"coefficient diag has wrong dimension (expected {n})")
        return ConstantCoefficient(
            tuple(float(v) for v in diag),
            a12=float(spec.get("a12", 0.0)),
            nu=float(spec.get("nu", 0.0)),
            mu=float(spec.get("mu", 0.0)),
        )
    if kind == "checkerboard":
        return CheckerboardCoefficient(
            low=float(spec["low"]),
            high=float(spec["high"]),
            period=float(spec.get("period", 1.0)),
        )
    raise ConfigError(f"unknown coefficient type {kind!r}")
