import dataclasses
import math

import numpy as np
import pytest

from gapcert.diagnostics import (
    gap_formula_rhs,
    ground_state_diagnostics,
    second_eigenfunction_diagnostics,
)
from gapcert.errors import (
    GeometryInfeasibleError,
    HypothesisViolationError,
    PositivityViolationError,
)
from gapcert.fields import parse_coefficient, parse_potential
from gapcert.geometry import Disk, Region, TubeSpec, domain_from_config, omega_hat_from_config
from gapcert.logdomain import LogValue
from gapcert.solver import EllipticProblem, assemble, lowest_eigenpairs, normalize


@pytest.fixture(scope="module")
def double_well():
    dom = domain_from_config({"lo": [-5, -5], "hi": [5, 5]}, "all")
    A = parse_coefficient({"type": "constant", "diag": [1, 1], "nu": 1.0, "mu": 2.0}, 2)
    V = parse_potential({"type": "wells", "wells": [
        {"center": [-1.5, 0.0], "radius": 0.5, "depth": -8.0},
        {"center": [1.5, 0.0], "radius": 0.5, "depth": -8.0}]}, 2)
    omega0 = Region((Disk((-1.5, 0.0), 0.5), Disk((1.5, 0.0), 0.5)))
    hat = omega_hat_from_config({"type": "hull_inflate", "margin": 0.6}, omega0)
    op = assemble(EllipticProblem(dom, A, V, omega0, hat), 1 / 32)
    res = normalize(lowest_eigenpairs(op, tol=1e-9), omega0)
    return dom, omega0, hat, res


BIG = LogValue.exp2(1e6)  # stand-in for the astronomically large constants


def test_ground_state_sign_pure_and_harnack(double_well):
    _dom, _omega0, hat, res = double_well
    rep = ground_state_diagnostics(res, hat, d=3.0, C2=BIG)
    assert rep.sign_pure
    assert rep.harnack_ratio > 1
    assert rep.harnack_ok
    assert rep.log10_harnack <= float(rep.log10_C2)


def test_ground_state_flipped_entry_raises(double_well):
    _dom, _omega0, hat, res = double_well
    bad_psi0 = res.psi0.copy()
    # flip one interior entry well above the sign tolerance
    idx = np.unravel_index(np.argmax(bad_psi0), bad_psi0.shape)
    bad_psi0[idx] = -0.5 * bad_psi0[idx]
    corrupted = dataclasses.replace(res, psi0=bad_psi0)
    with pytest.raises(PositivityViolationError):
        ground_state_diagnostics(corrupted, hat, d=3.0, C2=BIG)


def test_second_eigen_checks(double_well):
    _dom, omega0, _hat, res = double_well
    rep = second_eigenfunction_diagnostics(res, omega0, C18=BIG)
    assert rep.node_ok and rep.node_min < -0.9  # deeply negative for symmetric wells
    assert rep.max_ok and rep.global_max <= 1 + 1e-6
    assert rep.l2_ok
    assert not rep.skipped_degenerate


def test_second_eigen_antisymmetry(double_well):
    _dom, _omega0, _hat, res = double_well
    psi1 = res.psi1
    flipped = psi1[::-1, :]  # x -> -x on the node lattice
    scale = np.max(np.abs(psi1))
    assert np.max(np.abs(psi1 + flipped)) <= 1e-6 * scale


def test_second_eigen_requires_negative_lambda1(double_well):
    _dom, omega0, _hat, res = double_well
    positive = dataclasses.replace(res, lambda1=0.25)
    with pytest.raises(HypothesisViolationError):
        second_eigenfunction_diagnostics(positive, omega0, C18=BIG)


def test_gap_formula_proportional_fields_vanish(double_well):
    _dom, _omega0, _hat, res = double_well
    proportional = dataclasses.replace(res, psi1=2.0 * res.psi0)
    tube = TubeSpec((1.5, 0.0), (-1.5, 0.0), 0.4)
    rep = gap_formula_rhs(proportional, tube, nu=1.0)
    assert rep.rhs <= 1e-20


def test_gap_formula_chain_inequality(double_well):
    _dom, _omega0, _hat, res = double_well
    tube = TubeSpec((1.5, 0.0), (-1.5, 0.0), 0.4)
    rep = gap_formula_rhs(res, tube, nu=1.0)
    gap = res.lambda1 - res.lambda0
    assert rep.rhs > 0
    assert gap >= 0.95 * rep.rhs
    assert rep.tube_volume == pytest.approx(2 * 0.4 * 3.0)


def test_gap_formula_radius_halving_consistency(double_well):
    _dom, _omega0, _hat, res = double_well
    full = gap_formula_rhs(res, TubeSpec((1.5, 0.0), (-1.5, 0.0), 0.4), nu=1.0)
    half = gap_formula_rhs(res, TubeSpec((1.5, 0.0), (-1.5, 0.0), 0.2), nu=1.0)
    # exact volume scaling, restricted L1 shrinks, tube infimum grows
    assert half.tube_volume == pytest.approx(full.tube_volume / 2)
    assert half.grad_l1 <= full.grad_l1
    assert half.inf_tube_psi0 >= full.inf_tube_psi0
    # the reported rhs is exactly its parts recombined
    expected = 1.0 * half.inf_tube_psi0**2 * half.grad_l1**2 / (
        half.tube_volume * half.psi1_l2_sq)
    assert half.rhs == pytest.approx(expected, rel=1e-12)
    gap = res.lambda1 - res.lambda0
    assert gap >= 0.95 * half.rhs


def test_gap_formula_tube_must_stay_inside(double_well):
    _dom, _omega0, _hat, res = double_well
    with pytest.raises(GeometryInfeasibleError):
        gap_formula_rhs(res, TubeSpec((6.0, 0.0), (-1.5, 0.0), 0.4), nu=1.0)
