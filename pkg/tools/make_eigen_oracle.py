#!/usr/bin/env python3
"""Reference eigenvalues for the symmetric double-well configurations.

Exploits the two mirror symmetries of the standard instance: the ground
state is even in x and y, the second state odd in x and even in y, so each
is the lowest eigenvalue of the same flux assembly on the quarter box with
the matching Neumann/Dirichlet faces on the symmetry planes.  This reaches
h = 1/256 at a quarter of the unknowns; values are Richardson-extrapolated
(second-order stencil) and frozen into the test suite.

Run from the repository root:  python3 tools/make_eigen_oracle.py
"""

import json
import sys
import time

sys.path.insert(0, "src")

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from gapcert.fields import parse_coefficient, parse_potential
from gapcert.geometry import domain_from_config
from gapcert.solver import DIRECT_SOLVE_LIMIT, EllipticProblem, assemble, lowest_eigenpairs


def quarter_eigenvalue(half, h, wells_depth, sep, radius, x_parity, seed=1234):
    """Lowest eigenvalue of the quarter-domain operator with symmetry faces."""
    gamma = {
        "xmin": "dirichlet" if x_parity == "odd" else "neumann",
        "ymin": "neumann",
        "xmax": "dirichlet",
        "ymax": "dirichlet",
    }
    dom = domain_from_config({"lo": [0.0, 0.0], "hi": [half, half]}, gamma)
    A = parse_coefficient({"type": "constant", "diag": [1.0, 1.0], "nu": 1.0, "mu": 2.0}, 2)
    V = parse_potential(
        {"type": "wells", "wells": [{"center": [sep / 2, 0.0], "radius": radius,
                                     "depth": wells_depth}]}, 2
    )
    op = assemble(EllipticProblem(dom, A, V), h)
    n = op.matrix.shape[0]
    W = sp.diags(op.mass).tocsr()
    sigma = wells_depth - 1.0
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(n)
    if n <= DIRECT_SOLVE_LIMIT:
        vals = spla.eigsh(op.matrix.tocsc(), k=1, M=W, sigma=sigma, which="LM",
                          v0=v0, return_eigenvectors=False)
        return float(vals[0]), n
    import pyamg

    shifted = (op.matrix - sigma * W).tocsr()
    ml = pyamg.smoothed_aggregation_solver(shifted, max_coarse=500)
    pre = ml.aspreconditioner(cycle="V")
    X0 = rng.standard_normal((n, 4))
    vals, _ = spla.lobpcg(op.matrix, X0, B=W, M=pre, largest=False, tol=1e-9, maxiter=500)
    return float(np.sort(vals)[0]), n


def main():
    half, depth, sep, radius = 6.0, -8.0, 4.0, 0.5
    hs = [1.0 / 64, 1.0 / 128, 1.0 / 256]
    out = {"config": {"half": half, "depth": depth, "sep": sep, "radius": radius}}
    for parity, name in (("even", "lambda0"), ("odd", "lambda1")):
        vals = []
        for h in hs:
            t0 = time.time()
            lam, n = quarter_eigenvalue(half, h, depth, sep, radius, parity)
            print(f"{name} h=1/{round(1/h)}: {lam:.12f}  ({n} unknowns, {time.time()-t0:.1f}s)",
                  flush=True)
            vals.append(lam)
        rich = vals[-1] + (vals[-1] - vals[-2]) / 3.0
        ratio = (vals[0] - vals[1]) / (vals[1] - vals[2])
        out[name] = {"values": dict(zip([f"1/{round(1/h)}" for h in hs], vals)),
                     "richardson": rich, "order_ratio": ratio}
        print(f"{name}: richardson = {rich:.12f}, refinement ratio = {ratio:.3f}", flush=True)
    with open("tools/eigen_oracle.json", "w") as f:
        json.dump(out, f, indent=2, sort_keys=True)
    print("written tools/eigen_oracle.json")


if __name__ == "__main__":
    main()
