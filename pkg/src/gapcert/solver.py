"""Conservative finite-difference discretization and sparse eigensolver.

Vertex-centered finite volumes on a uniform grid over the box: unknowns sit
at nodes, Dirichlet-face nodes are eliminated, Neumann faces get half
control volumes with zero boundary flux.  The assembled pencil is
(S, W) with S the flux+potential matrix scaled by h^-n (so an interior row
of the all-Dirichlet Laplacian is the classical stencil (2n, -1, ..)/h^2)
and W the diagonal of control-volume fractions.  S is symmetric
bit-for-bit by construction.

The two lowest eigenpairs come from shift-invert Lanczos with a sparse
factorization, or an AMG-preconditioned inner solve above a size threshold;
both paths are deterministic given the starting-vector seed.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import AssemblyError, ConfigError, ConvergenceError
from .fields import CoefficientField, PotentialField
from .geometry import DomainSpec, Region

# above this many unknowns the factorization is replaced by AMG-CG
DIRECT_SOLVE_LIMIT = 900_000


@dataclass(frozen=True)
class EllipticProblem:
    domain: DomainSpec
    A: CoefficientField
    V: PotentialField
    omega0: Region = None
    omega_hat: object = None


@dataclass(frozen=True)
class GridMeta:
    lo: tuple
    hi: tuple
    h: float
    shape: tuple  # nodes per axis

    @property
    def n(self):
        return len(self.shape)

    def axes(self):
        return [self.lo[k] + self.h * np.arange(self.shape[k]) for k in range(self.n)]

    def points(self):
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass(frozen=True)
class DiscreteOperator:
    grid: GridMeta
    matrix: sp.csr_matrix          # S: flux + potential, h^-n scaled
    mass: np.ndarray               # W diagonal (control-volume fractions)
    unknown_of_node: np.ndarray    # flat node index -> unknown index or -1
    node_of_unknown: np.ndarray
    gamma: dict
    problem: EllipticProblem

    @property
    def num_unknowns(self):
        return len(self.node_of_unknown)

    def node_points(self):
        return self.grid.points()

    def unknown_points(self):
        return self.grid.points()[self.node_of_unknown]

    def full_field(self, u: np.ndarray) -> np.ndarray:
        """Pad an unknown vector with Dirichlet zeros, shaped on the node lattice."""
        full = np.zeros(int(np.prod(self.grid.shape)))
        full[self.node_of_unknown] = u
        return full.reshape(self.grid.shape)

    def l2_norm_sq(self, u: np.ndarray) -> float:
        """Discrete squared L2(Omega) norm of an unknown vector."""
        return float(np.sum(self.mass * u**2) * self.grid.h ** self.grid.n)


def _ellipticity_check(A: CoefficientField, pts: np.ndarray, nu: float, mu: float):
    diag = A.diag(pts)
    if A.has_offdiag:
        b = A.offdiag(pts)
        mid = (diag[:, 0] + diag[:, 1]) / 2
        rad = np.hypot((diag[:, 0] - diag[:, 1]) / 2, b)
        lo, hi = mid - rad, mid + rad
    else:
        lo, hi = np.min(diag, axis=1), np.max(diag, axis=1)
    tol = 1e-10 * max(mu, 1.0)
    bad = (lo < nu - tol) | (hi > mu + tol)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise AssemblyError(
            f"ellipticity violated at {tuple(float(x) for x in pts[i])}: "
            f"sampled range [{lo[i]:.6g}, {hi[i]:.6g}] escapes [{nu:.6g}, {mu:.6g}]"
        )


def assemble(problem: EllipticProblem, h: float, averaging: str = "arithmetic") -> DiscreteOperator:
    """Assemble the symmetric pencil (S, W) for the divergence-form operator.

    Face coefficients are the arithmetic (or harmonic) average of the two
    adjacent node values of A.
    """
    domain = problem.domain
    n = domain.n
    lo, hi = np.asarray(domain.lo, float), np.asarray(domain.hi, float)
    counts = (hi - lo) / h
    shape = []
    for k in range(n):
        c = counts[k]
        if abs(c - round(c)) > 1e-9 * max(abs(c), 1):
            raise ConfigError(f"grid step {h} does not divide the box extent {hi[k]-lo[k]}")
        shape.append(int(round(c)) + 1)
    shape = tuple(shape)
    grid = GridMeta(tuple(lo), tuple(hi), float(h), shape)
    pts = grid.points()
    num_nodes = pts.shape[0]

    _ellipticity_check(problem.A, pts, problem.A.nu, problem.A.mu)

    # Dirichlet mask per node
    axes_idx = np.meshgrid(*[np.arange(s) for s in shape], indexing="ij")
    flat_idx = [a.ravel() for a in axes_idx]
    names_lohi = {2: (("xmin", "xmax"), ("ymin", "ymax")),
                  3: (("xmin", "xmax"), ("ymin", "ymax"), ("zmin", "zmax"))}[n]
    dirichlet = np.zeros(num_nodes, dtype=bool)
    on_boundary_axis = []
    for k in range(n):
        at_lo = flat_idx[k] == 0
        at_hi = flat_idx[k] == shape[k] - 1
        on_boundary_axis.append(at_lo | at_hi)
        if domain.gamma[names_lohi[k][0]] == "dirichlet":
            dirichlet |= at_lo
        if domain.gamma[names_lohi[k][1]] == "dirichlet":
            dirichlet |= at_hi

    unknown_of_node = np.full(num_nodes, -1, dtype=np.int64)
    node_of_unknown = np.nonzero(~dirichlet)[0]
    unknown_of_node[node_of_unknown] = np.arange(len(node_of_unknown))

    # control-volume fractions (product over axes of 1/2 on boundary)
    w = np.ones(num_nodes)
    for k in range(n):
        w *= np.where(on_boundary_axis[k], 0.5, 1.0)

    diagA = problem.A.diag(pts)
    strides = np.ones(n, dtype=np.int64)
    for k in range(n - 2, -1, -1):
        strides[k] = strides[k + 1] * shape[k + 1]

    rows, cols, vals = [], [], []
    diag_acc = np.zeros(num_nodes)

    for k in range(n):
        # faces between node (.., i_k, ..) and (.., i_k+1, ..)
        left = flat_idx[k] < shape[k] - 1
        li = np.nonzero(left)[0]
        ri = li + strides[k]
        if averaging == "arithmetic":
            aface = 0.5 * (diagA[li, k] + diagA[ri, k])
        elif averaging == "harmonic":
            aface = 2.0 / (1.0 / diagA[li, k] + 1.0 / diagA[ri, k])
        else:
            raise ConfigError(f"unknown averaging mode {averaging!r}")
        # face area fraction: half per shared off-axis boundary
        frac = np.ones(len(li))
        for m in range(n):
            if m != k:
                frac *= np.where(on_boundary_axis[m][li], 0.5, 1.0)
        t = aface * frac / h**2
        ul, ur = unknown_of_node[li], unknown_of_node[ri]
        both = (ul >= 0) & (ur >= 0)
        rows.append(ul[both]); cols.append(ur[both]); vals.append(-t[both])
        rows.append(ur[both]); cols.append(ul[both]); vals.append(-t[both])
        np.add.at(diag_acc, li[ul >= 0], t[ul >= 0])
        np.add.at(diag_acc, ri[ur >= 0], t[ur >= 0])

    if problem.A.has_offdiag:
        if n != 2:
            raise ConfigError("off-diagonal coefficients supported for n = 2 only")
        if not domain.dirichlet_everywhere:
            raise ConfigError("off-diagonal coefficients need Dirichlet on every face")
        b = problem.A.offdiag(pts)
        # symmetric cross-difference for -d_x(b d_y u) - d_y(b d_x u)
        inner = (flat_idx[0] < shape[0] - 1) & (flat_idx[1] < shape[1] - 1)
        li = np.nonzero(inner)[0]
        # diagonal pair (i, j) <-> (i+1, j+1): weight -b/(2h^2); antidiagonal +b
        for da, db, sgn in (((0, 0), (1, 1), -1.0), ((0, 1), (1, 0), +1.0)):
            ia = li + da[0] * strides[0] + da[1] * strides[1]
            ib = li + db[0] * strides[0] + db[1] * strides[1]
            bface = 0.5 * (b[ia] + b[ib])
            t = sgn * bface / (2 * h**2)
            ua, ub = unknown_of_node[ia], unknown_of_node[ib]
            both = (ua >= 0) & (ub >= 0)
            rows.append(ua[both]); cols.append(ub[both]); vals.append(t[both])
            rows.append(ub[both]); cols.append(ua[both]); vals.append(t[both])

    nun = len(node_of_unknown)
    offdiag = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(nun, nun),
    ).tocsr()
    Vn = problem.V(pts)
    diag_total = diag_acc[node_of_unknown] + Vn[node_of_unknown] * w[node_of_unknown]
    S = (offdiag + sp.diags(diag_total)).tocsr()
    S.sum_duplicates()
    return DiscreteOperator(
        grid=grid,
        matrix=S,
        mass=w[node_of_unknown],
        unknown_of_node=unknown_of_node,
        node_of_unknown=node_of_unknown,
        gamma=dict(domain.gamma),
        problem=problem,
    )


@dataclass(frozen=True)
class EigenResult:
    lambda0: float
    lambda1: float
    psi0: np.ndarray           # full node-lattice arrays
    psi1: np.ndarray
    residual0: float
    residual1: float
    normalization: dict
    flags: dict
    lambda2: float
    operator: DiscreteOperator

    @property
    def gap(self):
        return self.lambda1 - self.lambda0

    def unknown_vector(self, which: int) -> np.ndarray:
        field = self.psi0 if which == 0 else self.psi1
        return field.ravel()[self.operator.node_of_unknown]

    def l2_norm_sq_psi1(self) -> float:
        return self.operator.l2_norm_sq(self.unknown_vector(1))


def _shift(problem: EllipticProblem, op: DiscreteOperator) -> float:
    # lambda0 >= -max V^-, so one below that is strictly under the spectrum
    pts = op.node_points()
    vmin = float(np.min(problem.V(pts)))
    return min(vmin, 0.0) - 1.0


def lowest_eigenpairs(
    op: DiscreteOperator,
    k: int = 2,
    tol: float = 1e-9,
    seed: int = 1234,
    maxiter: int = None,
) -> EigenResult:
    """Two algebraically smallest eigenpairs of the pencil (S, W).

    Shift-invert Lanczos from a seeded start vector; an extra eigenvalue is
    computed to flag near-degeneracy of lambda1.  Residuals are measured as
    ||W^-1 S psi - lambda psi|| / ||psi||.
    """
    if k != 2:
        raise ConfigError("only the two lowest eigenpairs are supported")
    S = op.matrix
    n = S.shape[0]
    W = sp.diags(op.mass).tocsr()
    sigma = _shift(op.problem, op)
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(n)
    kk = min(3, n - 1)
    try:
        if n <= DIRECT_SOLVE_LIMIT:
            vals, vecs = spla.eigsh(
                S.tocsc(), k=kk, M=W, sigma=sigma, which="LM", v0=v0, maxiter=maxiter
            )
        else:
            import pyamg

            shifted = (S - sigma * W).tocsr()
            ml = pyamg.smoothed_aggregation_solver(shifted, max_coarse=500)
            pre = ml.aspreconditioner(cycle="V")

            def solve(bvec):
                x, info = spla.cg(shifted, bvec, rtol=1e-12, atol=0.0, maxiter=1500, M=pre)
                if info != 0:
                    raise ConvergenceError(f"inner CG failed (info={info})")
                return x

            OPinv = spla.LinearOperator((n, n), matvec=solve)
            vals, vecs = spla.eigsh(
                S, k=kk, M=W, sigma=sigma, which="LM", v0=v0, OPinv=OPinv, maxiter=maxiter
            )
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceError(f"eigensolver did not converge: {exc}") from exc

    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    winv = 1.0 / op.mass
    residuals = []
    for i in range(kk):
        v = vecs[:, i]
        r = winv * (S @ v) - vals[i] * v
        residuals.append(float(np.linalg.norm(r) / np.linalg.norm(v)))
    scale = max(abs(vals[0]), 1.0)
    for i in range(min(2, kk)):
        if residuals[i] > tol * scale:
            raise ConvergenceError(
                f"residual {residuals[i]:.3e} exceeds tol {tol:.1e} for eigenvalue {vals[i]:.6g}",
                best_residual=residuals[i],
            )
    lam2 = float(vals[2]) if kk > 2 else float("nan")
    flags = {
        "gap_degenerate": bool(vals[1] - vals[0] < 10 * tol * abs(vals[0])),
        "lambda1_degenerate": bool(kk > 2 and lam2 - vals[1] < 10 * tol * max(abs(vals[1]), 1.0)),
    }
    result = EigenResult(
        lambda0=float(vals[0]),
        lambda1=float(vals[1]),
        psi0=op.full_field(vecs[:, 0]),
        psi1=op.full_field(vecs[:, 1]),
        residual0=residuals[0],
        residual1=residuals[1],
        normalization={"applied": False},
        flags=flags,
        lambda2=lam2,
        operator=op,
    )
    return result


def normalize(result: EigenResult, omega0: Region) -> EigenResult:
    """Orient psi0 positive (sup = 1); scale psi1 so its max over the closed
    support region is +1.  Idempotent."""
    op = result.operator
    pts = op.node_points()
    psi0 = result.psi0.ravel().copy()
    i0 = int(np.argmax(np.abs(psi0)))
    s0 = np.sign(psi0[i0]) or 1.0
    psi0 *= s0 / abs(psi0[i0])

    psi1 = result.psi1.ravel().copy()
    in_closure = omega0.dist(pts) <= 1e-12
    if not np.any(in_closure):
        raise ConfigError("no grid nodes inside the support region; refine the grid")
    sub = psi1[in_closure]
    j = int(np.argmax(np.abs(sub)))
    scale = sub[j]
    if scale == 0.0:
        raise ConvergenceError("psi1 vanishes identically on the support region")
    psi1 /= scale
    node_idx = np.nonzero(in_closure)[0][j]
    return replace(
        result,
        psi0=psi0.reshape(result.psi0.shape),
        psi1=psi1.reshape(result.psi1.shape),
        normalization={
            "applied": True,
            "psi1_max_node": tuple(float(x) for x in pts[node_idx]),
            "psi1_scale": float(scale),
            "psi0_scale": float(s0 / abs(result.psi0.ravel()[i0])),
        },
    )


# ----------------------------------------------------------------------
# field export

_MAGIC = b"GAPF"


def save_field_binary(path, grid: GridMeta, field: np.ndarray):
    """Dense row-major doubles with a (n, dims, h, origin) header."""
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<i", grid.n))
        f.write(struct.pack(f"<{grid.n}i", *grid.shape))
        f.write(struct.pack("<d", grid.h))
        f.write(struct.pack(f"<{grid.n}d", *grid.lo))
        f.write(np.ascontiguousarray(field, dtype="<f8").tobytes())


def load_field_binary(path):
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != _MAGIC:
            raise ConfigError(f"not a field file: bad magic {magic!r}")
        (n,) = struct.unpack("<i", f.read(4))
        shape = struct.unpack(f"<{n}i", f.read(4 * n))
        (h,) = struct.unpack("<d", f.read(8))
        lo = struct.unpack(f"<{n}d", f.read(8 * n))
        data = np.frombuffer(f.read(), dtype="<f8").reshape(shape)
    return GridMeta(lo, tuple(lo[k] + h * (shape[k] - 1) for k in range(n)), h, shape), data


def save_field_csv(path, grid: GridMeta, field: np.ndarray):
    """Plot-friendly CSV: one row per node, coordinates then value."""
    pts = grid.points()
    vals = np.asarray(field).ravel()
    cols = ["x", "y", "z"][: grid.n]
    with open(path, "w", newline="") as f:
        f.write(",".join(cols + ["value"]) + "\n")
        for row, v in zip(pts, vals):
            coords = ",".join(repr(float(c)) for c in row)
            f.write(f"{coords},{v!r}\n")
