import copy
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gapcert.certificate import CertificateInputs


P0_INPUTS = dict(
    n=2, q=4.0, mu=2.0, nu=1.0, d=1.0, L=4.0, r0=0.125,
    sup_local_V=1.0, sup_local_Vminus=1.0,
    norm_Vminus_Omega0=1.0, vol_Omega0_d4=10.0,
)


@pytest.fixture
def p0_inputs():
    return CertificateInputs(**P0_INPUTS)


def wells_config(
    depth=-8.0,
    sep=4.0,
    radius=0.5,
    half=6.0,
    h=1.0 / 32,
    gamma="all",
    margin=None,
    A=None,
    max_levels=1,
    outdir="out",
):
    """Config dict for a symmetric double-well instance.

    The enlargement margin defaults to d/5, safely under the d/4 clearance
    cap for any geometry.
    """
    if margin is None:
        margin = (half - sep / 2 - radius) / 5.0
    wells = [
        {"center": [-sep / 2, 0.0], "radius": radius, "depth": depth},
        {"center": [sep / 2, 0.0], "radius": radius, "depth": depth},
    ]
    return {
        "problem": {
            "box": {"lo": [-half, -half], "hi": [half, half]},
            "gamma": gamma,
            "A": A or {"type": "constant", "diag": [1.0, 1.0], "nu": 1.0, "mu": 2.0},
            "V": {"type": "wells", "wells": copy.deepcopy(wells)},
            "omega0": {"disks": [{"center": w["center"], "radius": w["radius"]} for w in wells]},
            "omega_hat": {"type": "hull_inflate", "margin": margin},
        },
        "certificate": {"q": 4.0, "precision_bits": 192},
        "solver": {"h": h, "tol": 1e-9, "seed": 1234},
        "measurement": {"max_levels": max_levels},
        "output": {"dir": outdir, "plots": False},
    }
