"""Concrete domain configurations and their measured certificate scalars.

The domain is an axis-aligned box with a per-face Dirichlet/Neumann split.
The perturbation support and its convex enlargement are unions of disks/balls
and axis boxes; the enlargement must be convex, which covers three forms: an
inflated convex hull, a single disk, or a single box.  All suprema over
center points are discretized with a refinement loop, and the measured norms
are padded by the observed inter-refinement variation so the certificate
errs on the small (safe) side.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from .certificate import CertificateInputs, unit_ball_volume
from .errors import (
    AssumptionViolationError,
    ConfigError,
    GeometryInfeasibleError,
    UnsupportedMethodError,
)

# ----------------------------------------------------------------------
# primitives


@dataclass(frozen=True)
class Disk:
    center: tuple
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ConfigError("disk radius must be positive")

    @property
    def n(self):
        return len(self.center)

    def dist(self, pts):
        c = np.asarray(self.center)
        return np.maximum(np.linalg.norm(pts - c, axis=1) - self.radius, 0.0)

    def contains(self, pts):
        c = np.asarray(self.center)
        return np.sum((pts - c) ** 2, axis=1) < self.radius**2

    def bounds(self):
        c = np.asarray(self.center)
        return c - self.radius, c + self.radius

    def support_points(self):
        """(points, radius) so that the primitive = union of balls."""
        return np.asarray([self.center]), self.radius


@dataclass(frozen=True)
class BoxPrim:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        if not all(a < b for a, b in zip(self.lo, self.hi)):
            raise ConfigError("box primitive needs lo < hi per axis")

    @property
    def n(self):
        return len(self.lo)

    def dist(self, pts):
        lo, hi = np.asarray(self.lo), np.asarray(self.hi)
        d = np.maximum(np.maximum(lo - pts, pts - hi), 0.0)
        return np.linalg.norm(d, axis=1)

    def contains(self, pts):
        lo, hi = np.asarray(self.lo), np.asarray(self.hi)
        return np.all((pts > lo) & (pts < hi), axis=1)

    def bounds(self):
        return np.asarray(self.lo), np.asarray(self.hi)

    def support_points(self):
        corners = np.asarray(list(itertools.product(*zip(self.lo, self.hi))))
        return corners, 0.0


@dataclass(frozen=True)
class Region:
    """A finite union of disks/balls and axis boxes."""

    primitives: tuple

    def __post_init__(self):
        if not self.primitives:
            raise ConfigError("region needs at least one primitive")
        dims = {p.n for p in self.primitives}
        if len(dims) != 1:
            raise ConfigError("mixed-dimension primitives in one region")

    @property
    def n(self):
        return self.primitives[0].n

    def dist(self, pts):
        return np.min([p.dist(pts) for p in self.primitives], axis=0)

    def contains(self, pts):
        out = np.zeros(pts.shape[0], dtype=bool)
        for p in self.primitives:
            out |= p.contains(pts)
        return out

    def bounds(self, pad=0.0):
        los, his = zip(*(p.bounds() for p in self.primitives))
        return np.min(los, axis=0) - pad, np.max(his, axis=0) + pad

    def support_balls(self):
        """All primitives as (center, radius) balls; box corners count as radius 0."""
        centers, radii = [], []
        for p in self.primitives:
            pts, r = p.support_points()
            for x in pts:
                centers.append(x)
                radii.append(r)
        return np.asarray(centers), np.asarray(radii)

    def diameter(self):
        """Exact diameter of the closure of the union."""
        centers, radii = self.support_balls()
        diff = centers[:, None, :] - centers[None, :, :]
        dist = np.linalg.norm(diff, axis=2) + radii[:, None] + radii[None, :]
        return float(np.max(dist))


FACE_NAMES = {2: ("xmin", "xmax", "ymin", "ymax"), 3: ("xmin", "xmax", "ymin", "ymax", "zmin", "zmax")}


@dataclass(frozen=True)
class DomainSpec:
    """The computational box and its Dirichlet/Neumann boundary split."""

    lo: tuple
    hi: tuple
    gamma: dict  # face name -> "dirichlet" | "neumann"

    def __post_init__(self):
        n = len(self.lo)
        if n not in FACE_NAMES:
            raise ConfigError("domain boxes support n = 2 or 3 only")
        if not all(a < b for a, b in zip(self.lo, self.hi)):
            raise ConfigError("domain box needs lo < hi per axis")
        faces = FACE_NAMES[n]
        if set(self.gamma) != set(faces):
            raise ConfigError(f"gamma must assign each face of {faces} exactly once")
        for v in self.gamma.values():
            if v not in ("dirichlet", "neumann"):
                raise ConfigError(f"unknown boundary condition {v!r}")

    @property
    def n(self):
        return len(self.lo)

    @property
    def dirichlet_everywhere(self):
        return all(v == "dirichlet" for v in self.gamma.values())

    def boundary_dist(self, pts):
        lo, hi = np.asarray(self.lo), np.asarray(self.hi)
        return np.min(np.minimum(pts - lo, hi - pts), axis=1)

    def extents(self):
        return np.asarray(self.hi) - np.asarray(self.lo)


def domain_from_config(box: dict, gamma) -> DomainSpec:
    lo, hi = tuple(box["lo"]), tuple(box["hi"])
    n = len(lo)
    if gamma == "all":
        gamma = {f: "dirichlet" for f in FACE_NAMES[n]}
    return DomainSpec(lo, hi, dict(gamma))


@dataclass(frozen=True)
class TubeSpec:
    """A straight cylinder of given radius between two endpoints."""

    x_plus: tuple
    x_minus: tuple
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ConfigError("tube radius must be positive")

    @property
    def ell(self):
        return float(np.linalg.norm(np.asarray(self.x_plus) - np.asarray(self.x_minus)))

    def contains(self, pts):
        a = np.asarray(self.x_minus)
        b = np.asarray(self.x_plus)
        axis = b - a
        ell = np.linalg.norm(axis)
        u = axis / ell
        s = (pts - a) @ u
        perp = pts - a - np.outer(s, u)
        return (s >= 0) & (s <= ell) & (np.linalg.norm(perp, axis=1) < self.radius)


# ----------------------------------------------------------------------
# convex hull distances


def hull_distance(pts: np.ndarray, centers: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """Distance from points to the convex hull of a union of balls.

    Exact in 2D via the support-function minimax (candidate directions are
    the per-point unconstrained optima and the x-independent pairwise
    crossings).  In higher dimensions a Frank-Wolfe dual bound is returned,
    which can only underestimate the distance (the safe side for the
    certificate: more centers are included in suprema).
    """
    pts = np.atleast_2d(pts)
    if pts.shape[1] == 2:
        return _hull_distance_2d(pts, centers, radii)
    return _hull_distance_dual(pts, centers, radii)


def _hull_distance_2d(pts, centers, radii):
    m = len(centers)
    static_dirs = []
    for i in range(m):
        for j in range(i + 1, m):
            w = centers[j] - centers[i]
            w2 = float(w @ w)
            if w2 == 0.0:
                continue
            b = radii[i] - radii[j]
            disc = w2 - b * b
            if disc < 0:
                continue
            root = math.sqrt(disc)
            wperp = np.array([-w[1], w[0]])
            for s in (1.0, -1.0):
                static_dirs.append((b * w + s * root * wperp) / w2)
    best = np.full(pts.shape[0], -np.inf)
    if static_dirs:
        U = np.asarray(static_dirs)  # (K, 2), unit vectors
        # g(u) = x.u - max_i (c_i.u + r_i)
        support = np.max(U @ centers.T + radii[None, :], axis=1)  # (K,)
        best = np.max(pts @ U.T - support[None, :], axis=1)
    # per-point optimal directions u = (x - c_i)/|x - c_i|
    for i in range(m):
        diff = pts - centers[i]
        norm = np.linalg.norm(diff, axis=1)
        safe = norm > 1e-300
        u = np.where(safe[:, None], diff / np.maximum(norm, 1e-300)[:, None], 0.0)
        vals = u @ centers.T + radii[None, :]  # (N, m)
        g = np.sum(u * pts, axis=1) - np.max(vals, axis=1)
        best = np.maximum(best, np.where(safe, g, -np.inf))
    return np.maximum(best, 0.0)


def _hull_distance_dual(pts, centers, radii, iters=200):
    # Frank-Wolfe on the projection; report the dual value max_u (x.u - h(u))
    out = np.zeros(pts.shape[0])
    for k, x in enumerate(pts):
        i0 = int(np.argmin(np.linalg.norm(centers - x, axis=1) - radii))
        z = centers[i0] + (
            radii[i0] * (x - centers[i0]) / max(np.linalg.norm(x - centers[i0]), 1e-300)
        )
        best = 0.0
        for _ in range(iters):
            g = x - z
            ng = np.linalg.norm(g)
            if ng < 1e-14:
                break
            u = g / ng
            support = np.max(centers @ u + radii)
            best = max(best, float(x @ u - support))
            idx = int(np.argmax(centers @ u + radii))
            s = centers[idx] + radii[idx] * u
            dz = s - z
            denom = float(dz @ dz)
            if denom < 1e-30:
                break
            gamma = min(1.0, max(0.0, float(g @ dz) / denom))
            if gamma <= 0.0:
                break
            z = z + gamma * dz
        out[k] = best
    return out


# ----------------------------------------------------------------------
# the convex enlargement


class OmegaHat:
    """Convex enlargement of the perturbation support."""

    def dist(self, pts):
        raise NotImplementedError

    def clearance(self) -> float:
        """Distance from the hull of the support to the enlargement boundary."""
        raise NotImplementedError

    def dist_to_domain_boundary(self, domain: DomainSpec) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class HullInflate(OmegaHat):
    omega0: Region
    margin: float

    def __post_init__(self):
        if self.margin <= 0:
            raise ConfigError("hull inflation margin must be positive")

    def dist(self, pts):
        centers, radii = self.omega0.support_balls()
        return np.maximum(hull_distance(pts, centers, radii) - self.margin, 0.0)

    def clearance(self):
        return self.margin

    def dist_to_domain_boundary(self, domain):
        return separation_distance(self.omega0, domain) - self.margin


@dataclass(frozen=True)
class DiskHat(OmegaHat):
    omega0: Region
    disk: Disk

    def dist(self, pts):
        return self.disk.dist(pts)

    def clearance(self):
        centers, radii = self.omega0.support_balls()
        c = np.asarray(self.disk.center)
        reach = np.linalg.norm(centers - c, axis=1) + radii
        return float(self.disk.radius - np.max(reach))

    def dist_to_domain_boundary(self, domain):
        c = np.asarray(self.disk.center)
        lo, hi = np.asarray(domain.lo), np.asarray(domain.hi)
        return float(min(np.min(c - lo), np.min(hi - c)) - self.disk.radius)


@dataclass(frozen=True)
class BoxHat(OmegaHat):
    omega0: Region
    box: BoxPrim

    def dist(self, pts):
        return self.box.dist(pts)

    def clearance(self):
        centers, radii = self.omega0.support_balls()
        lo, hi = np.asarray(self.box.lo), np.asarray(self.box.hi)
        inner = np.minimum(np.min(centers - lo, axis=1), np.min(hi - centers, axis=1)) - radii
        return float(np.min(inner))

    def dist_to_domain_boundary(self, domain):
        lo, hi = np.asarray(domain.lo), np.asarray(domain.hi)
        blo, bhi = np.asarray(self.box.lo), np.asarray(self.box.hi)
        return float(min(np.min(blo - lo), np.min(hi - bhi)))


def omega_hat_from_config(spec: dict, omega0: Region) -> OmegaHat:
    kind = spec.get("type")
    if kind == "hull_inflate":
        return HullInflate(omega0, float(spec["margin"]))
    if kind == "disk":
        return DiskHat(omega0, Disk(tuple(spec["center"]), float(spec["radius"])))
    if kind == "box":
        return BoxHat(omega0, BoxPrim(tuple(spec["lo"]), tuple(spec["hi"])))
    raise ConfigError(f"unknown omega_hat type {kind!r}")


def region_from_config(spec: dict) -> Region:
    prims = []
    for d in spec.get("disks", ()):
        prims.append(Disk(tuple(float(x) for x in d["center"]), float(d["radius"])))
    for b in spec.get("boxes", ()):
        prims.append(BoxPrim(tuple(float(x) for x in b["lo"]), tuple(float(x) for x in b["hi"])))
    return Region(tuple(prims))


# ----------------------------------------------------------------------
# measurements


def separation_distance(omega0: Region, domain: DomainSpec) -> float:
    """Exact distance from the support union to the domain-box boundary."""
    lo, hi = np.asarray(domain.lo), np.asarray(domain.hi)
    d = math.inf
    for p in omega0.primitives:
        centers, radius = p.support_points()
        margins = np.minimum(np.min(centers - lo, axis=1), np.min(hi - centers, axis=1))
        d = min(d, float(np.min(margins) - radius))
    if d <= 0:
        raise AssumptionViolationError(
            f"support touches or crosses the domain boundary (separation {d:g})"
        )
    return d


def tube_parameters(omega0: Region, omega_hat: OmegaHat) -> tuple:
    """(L, r0): max straight-cylinder length and guaranteed radius.

    L is the diameter of the closure of the support; r0 the clearance of its
    convex hull inside the enlargement, which keeps every straight tube of
    radius r0 between support points inside the enlargement.
    """
    L = omega0.diameter()
    r0 = omega_hat.clearance()
    if r0 <= 0:
        raise GeometryInfeasibleError(
            f"the convex enlargement does not contain the support hull (clearance {r0:g})"
        )
    return L, r0


def straight_tube_volume(tube: TubeSpec, n: int) -> float:
    """Volume of a straight tube: (unit (n-1)-ball volume) * r^(n-1) * length."""
    return unit_ball_volume(n - 1) * tube.radius ** (n - 1) * tube.ell


@dataclass(frozen=True)
class VolumeEstimate:
    value: float
    error: float
    method: str

    def upper(self):
        return self.value + self.error


def neighborhood_volume(
    omega0: Region,
    t: float,
    method: str = "grid",
    resolution=None,
    seed: int = 0,
) -> VolumeEstimate:
    """Lebesgue volume of the open t-neighborhood of the support."""
    if t < 0:
        raise ConfigError("neighborhood offset t must be >= 0")
    if method == "analytic":
        if len(omega0.primitives) == 1 and isinstance(omega0.primitives[0], Disk):
            disk = omega0.primitives[0]
            n = omega0.n
            return VolumeEstimate(unit_ball_volume(n) * (disk.radius + t) ** n, 0.0, method)
        raise UnsupportedMethodError("analytic volume only supported for a single ball")
    lo, hi = omega0.bounds(pad=t * 1.001 + 1e-9)
    extent = hi - lo
    if method == "grid":
        h = resolution if resolution else float(np.min(extent)) / 128
        vals = []
        for level in range(2):
            hh = h / (2**level)
            counts = np.maximum(np.ceil(extent / hh).astype(int), 2)
            axes = [lo[k] + (np.arange(counts[k]) + 0.5) * extent[k] / counts[k]
                    for k in range(len(extent))]
            cell = float(np.prod(extent / counts))
            mesh = np.meshgrid(*axes, indexing="ij")
            pts = np.stack([m.ravel() for m in mesh], axis=1)
            inside = omega0.contains(pts) | (omega0.dist(pts) < t)
            vals.append(float(np.count_nonzero(inside)) * cell)
        # level difference with headroom; plain |v1 - v0| occasionally undercovers
        return VolumeEstimate(vals[-1], 1.5 * abs(vals[-1] - vals[0]) + 1e-12, method)
    if method == "montecarlo":
        num = int(resolution) if resolution else 200_000
        rng = np.random.default_rng(seed)
        pts = lo + rng.random((num, len(extent))) * extent
        inside = omega0.contains(pts) | (omega0.dist(pts) < t)
        box_vol = float(np.prod(extent))
        frac = np.count_nonzero(inside) / num
        sigma = box_vol * math.sqrt(max(frac * (1 - frac), 1e-12) / num)
        return VolumeEstimate(box_vol * frac, 3 * sigma, method)
    raise UnsupportedMethodError(f"unknown volume method {method!r}")


# ----------------------------------------------------------------------
# local norms


@dataclass(frozen=True)
class LocalNormResult:
    value: float          # padded value fed to the certificate
    raw_value: float      # finest-level quadrature value
    padding: float
    argmax_center: tuple
    levels: int
    history: tuple


def _field_on_lattice(fn, lo, counts, cell, supersample, block_rows=64):
    """Cell averages of fn over a regular lattice, supersample^n points/cell."""
    dim = len(counts)
    ss = int(supersample)
    fine = [int(counts[k]) * ss for k in range(dim)]
    axes = [lo[k] + (np.arange(fine[k]) + 0.5) * cell[k] / ss for k in range(dim)]
    out = np.empty(tuple(int(c) for c in counts))
    for start in range(0, int(counts[0]), block_rows):
        stop = min(start + block_rows, int(counts[0]))
        mesh = np.meshgrid(axes[0][start * ss : stop * ss], *axes[1:], indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        vals = fn(pts).reshape([(stop - start) * ss] + fine[1:])
        if dim == 2:
            out[start:stop] = vals.reshape(stop - start, ss, counts[1], ss).mean(axis=(1, 3))
        elif dim == 3:
            out[start:stop] = vals.reshape(
                stop - start, ss, counts[1], ss, counts[2], ss
            ).mean(axis=(1, 3, 5))
        else:
            out[start:stop] = vals.reshape(stop - start, ss).mean(axis=1)
    return out


def _ball_kernel(radius, cell, supersample):
    """Coverage fractions of a ball over lattice cells centered at the origin."""
    dim = len(cell)
    reach = [int(math.ceil(radius / cell[k] + 0.5)) for k in range(dim)]
    axes = [np.arange(-reach[k], reach[k] + 1) * cell[k] for k in range(dim)]
    offsets = [
        (np.arange(supersample) + 0.5) / supersample - 0.5
        for _ in range(dim)
    ]
    cover = np.zeros([len(a) for a in axes])
    sub = np.meshgrid(*[offsets[k] * cell[k] for k in range(dim)], indexing="ij")
    sub = np.stack([s.ravel() for s in sub], axis=1)  # (ss^n, dim)
    mesh = np.meshgrid(*axes, indexing="ij")
    base = np.stack([m.ravel() for m in mesh], axis=1)  # (K, dim)
    for delta in sub:
        cover += (np.sum((base + delta) ** 2, axis=1) < radius**2).reshape(cover.shape)
    return cover / len(sub)


def local_norm_sup(
    V,
    center_mask,
    ball_radius: float,
    q: float,
    lattice_lo,
    lattice_hi,
    step: float,
    refine_tol: float = 1e-4,
    max_levels: int = 4,
    supersample: int = 4,
) -> LocalNormResult:
    """sup over admissible centers of the local L_{q/2} norm of V on balls.

    The quadrature is a tensor midpoint rule on a supersampled lattice with
    ball-coverage masking; center points live on the same lattice and are
    admitted by ``center_mask``.  The lattice is refined (halved) until the
    sup is stable to ``refine_tol`` relative or ``max_levels`` is hit, and
    the final inter-refinement variation is added as conservative padding.
    """
    lo = np.asarray(lattice_lo, dtype=float)
    hi = np.asarray(lattice_hi, dtype=float)
    extent = hi - lo
    dim = len(extent)
    exponent = q / 2.0

    def density(pts):
        return np.abs(V(pts)) ** exponent

    history = []
    argmax = None
    prev = None
    for level in range(max_levels + 1):
        hh = step / (2**level)
        counts = np.maximum(np.ceil(extent / hh).astype(int), 4)
        cell = extent / counts
        F = _field_on_lattice(density, lo, counts, cell, supersample)
        K = _ball_kernel(ball_radius, cell, supersample)
        integrals = fftconvolve(F, K, mode="same") * float(np.prod(cell))
        axes = [lo[k] + (np.arange(counts[k]) + 0.5) * cell[k] for k in range(dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        admissible = center_mask(pts).reshape(integrals.shape)
        if not np.any(admissible):
            raise GeometryInfeasibleError("no admissible center points on the lattice")
        masked = np.where(admissible, integrals, -np.inf)
        flat_idx = int(np.argmax(masked))
        best = float(masked.ravel()[flat_idx])
        value = max(best, 0.0) ** (2.0 / q)
        argmax = tuple(float(v) for v in pts[flat_idx])
        history.append(value)
        if prev is not None and abs(value - prev) <= refine_tol * max(abs(value), 1e-300):
            break
        prev = value
    padding = abs(history[-1] - history[-2]) if len(history) > 1 else 0.0
    return LocalNormResult(
        value=history[-1] + padding,
        raw_value=history[-1],
        padding=padding,
        argmax_center=argmax,
        levels=len(history),
        history=tuple(history),
    )


def region_norm(
    V,
    region: Region,
    q: float,
    step: float,
    refine_tol: float = 1e-4,
    max_levels: int = 4,
    supersample: int = 4,
) -> LocalNormResult:
    """L_{q/2} norm of V over a region, same lattice/refinement scheme."""
    lo, hi = region.bounds(pad=1e-9)
    extent = hi - lo
    dim = len(extent)
    exponent = q / 2.0

    def density(pts):
        return np.abs(V(pts)) ** exponent * region.contains(pts)

    history = []
    prev = None
    for level in range(max_levels + 1):
        hh = step / (2**level)
        counts = np.maximum(np.ceil(extent / hh).astype(int), 4)
        cell = extent / counts
        F = _field_on_lattice(density, lo, counts, cell, supersample)
        value = float(np.sum(F) * np.prod(cell)) ** (2.0 / q)
        history.append(value)
        if prev is not None and abs(value - prev) <= refine_tol * max(abs(value), 1e-300):
            break
        prev = value
    padding = abs(history[-1] - history[-2]) if len(history) > 1 else 0.0
    return LocalNormResult(
        value=history[-1] + padding,
        raw_value=history[-1],
        padding=padding,
        argmax_center=(),
        levels=len(history),
        history=tuple(history),
    )


# ----------------------------------------------------------------------
# assumption report and input measurement


@dataclass(frozen=True)
class AssumptionCheck:
    name: str
    passed: object  # True/False, or None when deferred
    measured: object
    requirement: str


@dataclass(frozen=True)
class AssumptionReport:
    checks: tuple

    @property
    def all_passed(self):
        return all(c.passed is not False for c in self.checks)

    def as_dict(self):
        return {
            c.name: {"passed": c.passed, "measured": c.measured, "requirement": c.requirement}
            for c in self.checks
        }


def assumption_check(
    domain: DomainSpec,
    omega0: Region,
    omega_hat: OmegaHat,
    V,
    sample_step: float = None,
) -> AssumptionReport:
    """Verify the standing geometric assumptions; failures are data, not errors."""
    checks = []
    try:
        d = separation_distance(omega0, domain)
        checks.append(AssumptionCheck("separation", d > 0, d, "dist(support, boundary) > 0"))
    except AssumptionViolationError:
        d = 0.0
        checks.append(AssumptionCheck("separation", False, 0.0, "dist(support, boundary) > 0"))

    clearance = omega_hat.clearance()
    checks.append(
        AssumptionCheck(
            "enlargement-contains-support", clearance > 0, clearance, "hull clearance > 0"
        )
    )
    hat_dist = omega_hat.dist_to_domain_boundary(domain)
    need = 0.75 * d
    checks.append(
        AssumptionCheck(
            "enlargement-clearance",
            hat_dist >= need - 1e-12,
            hat_dist,
            f"dist(enlargement, boundary) >= 3d/4 = {need:g}",
        )
    )
    checks.append(
        AssumptionCheck("enlargement-connected", True, "convex by construction", "path-connected")
    )

    # negative part vanishes outside the support, checked on a lattice
    step = sample_step if sample_step else max(d / 40.0, 1e-3)
    lo, hi = np.asarray(domain.lo), np.asarray(domain.hi)
    counts = np.maximum(np.ceil((hi - lo) / step).astype(int), 4)
    axes = [lo[k] + (np.arange(counts[k]) + 0.5) * (hi[k] - lo[k]) / counts[k]
            for k in range(len(lo))]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    outside = ~omega0.contains(pts)
    vals = V(pts)
    bad = outside & (vals < -1e-12)
    if np.any(bad):
        worst = pts[bad][int(np.argmin(vals[bad]))]
        checks.append(
            AssumptionCheck(
                "negative-part-support",
                False,
                tuple(float(x) for x in worst),
                "V^- = 0 outside the support (lattice check)",
            )
        )
    else:
        checks.append(
            AssumptionCheck(
                "negative-part-support", True, 0.0, "V^- = 0 outside the support (lattice check)"
            )
        )
    checks.append(
        AssumptionCheck(
            "spectral-hypotheses",
            None,
            "deferred",
            "lambda0 < lambda1 < 0 <= inf spec(comparison operator); needs eigenvalues",
        )
    )
    return AssumptionReport(tuple(checks))


@dataclass(frozen=True)
class MeasurementRecord:
    d: float
    L: float
    r0: float
    sup_local_V: LocalNormResult
    sup_local_Vminus: LocalNormResult
    norm_Vminus_Omega0: LocalNormResult
    vol_Omega0_d4: VolumeEstimate
    report: AssumptionReport

    def as_dict(self):
        def norm_dict(r):
            return {
                "value": r.value,
                "raw": r.raw_value,
                "padding": r.padding,
                "argmax_center": list(r.argmax_center),
                "levels": r.levels,
            }

        return {
            "d": self.d,
            "L": self.L,
            "r0": self.r0,
            "sup_local_V": norm_dict(self.sup_local_V),
            "sup_local_Vminus": norm_dict(self.sup_local_Vminus),
            "norm_Vminus_Omega0": norm_dict(self.norm_Vminus_Omega0),
            "vol_Omega0_d4": {
                "value": self.vol_Omega0_d4.value,
                "error": self.vol_Omega0_d4.error,
                "method": self.vol_Omega0_d4.method,
            },
            "assumptions": self.report.as_dict(),
        }


def measure_certificate_inputs(
    domain: DomainSpec,
    omega0: Region,
    omega_hat: OmegaHat,
    A,
    V,
    q: float,
    dirichlet_everywhere=None,
    vhat_exponent_variant: str = "literal",
    step: float = None,
    refine_tol: float = 1e-4,
    max_levels: int = 4,
    supersample: int = 4,
    volume_method: str = "grid",
    seed: int = 0,
):
    """Measure all certificate scalars for a concrete configuration.

    Padding choices keep the certificate on the safe side: norms and the
    neighborhood volume are rounded up.
    """
    d = separation_distance(omega0, domain)
    L, r0 = tube_parameters(omega0, omega_hat)
    step = step if step else d / 40.0
    report = assumption_check(domain, omega0, omega_hat, V, sample_step=step)

    sup_v = local_norm_sup(
        V,
        lambda pts: omega_hat.dist(pts) < d / 4,
        ball_radius=d / 4,
        q=q,
        lattice_lo=domain.lo,
        lattice_hi=domain.hi,
        step=step,
        refine_tol=refine_tol,
        max_levels=max_levels,
        supersample=supersample,
    )

    def vminus(pts):
        return np.maximum(-V(pts), 0.0)

    sup_vm = local_norm_sup(
        vminus,
        lambda pts: omega0.contains(pts),
        ball_radius=d / 2,
        q=q,
        lattice_lo=domain.lo,
        lattice_hi=domain.hi,
        step=step,
        refine_tol=refine_tol,
        max_levels=max_levels,
        supersample=supersample,
    )
    norm_vm = region_norm(
        vminus, omega0, q=q, step=step, refine_tol=refine_tol,
        max_levels=max_levels, supersample=supersample,
    )
    vol = neighborhood_volume(
        omega0, d / 4, method=volume_method, resolution=step, seed=seed
    )
    if dirichlet_everywhere is None:
        dirichlet_everywhere = domain.dirichlet_everywhere
    inputs = CertificateInputs(
        n=domain.n,
        q=float(q),
        mu=float(A.mu),
        nu=float(A.nu),
        d=d,
        L=L,
        r0=r0,
        sup_local_V=sup_v.value,
        sup_local_Vminus=sup_vm.value,
        norm_Vminus_Omega0=norm_vm.value,
        vol_Omega0_d4=vol.upper(),
        dirichlet_everywhere=bool(dirichlet_everywhere),
        vhat_exponent_variant=vhat_exponent_variant,
    )
    record = MeasurementRecord(
        d=d, L=L, r0=r0,
        sup_local_V=sup_v, sup_local_Vminus=sup_vm, norm_Vminus_Omega0=norm_vm,
        vol_Omega0_d4=vol, report=report,
    )
    return inputs, record
