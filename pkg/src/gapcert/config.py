"""Run configuration: schema validation and object construction.

One JSON config fully determines a run.  The schema (config_schema.json,
shipped with the package) rejects unknown keys; anything structural that the
schema cannot express is checked during construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import jsonschema

from .certificate import DEFAULT_PRECISION, CertificateInputs
from .errors import ConfigError
from .fields import parse_coefficient, parse_potential
from .geometry import (
    DomainSpec,
    OmegaHat,
    Region,
    domain_from_config,
    omega_hat_from_config,
    region_from_config,
)


def _schema():
    with resources.files("gapcert").joinpath("config_schema.json").open() as f:
        return json.load(f)


_SCHEMA = None


def validate_config_dict(raw: dict) -> None:
    global _SCHEMA
    if _SCHEMA is None:
        _SCHEMA = _schema()
    try:
        jsonschema.validate(raw, _SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {path}: {exc.message}") from exc


@dataclass(frozen=True)
class ProblemSetup:
    domain: DomainSpec
    omega0: Region
    omega_hat: OmegaHat
    A: object
    V: object

    @property
    def n(self):
        return self.domain.n


@dataclass(frozen=True)
class SolverSettings:
    h: float = 1.0 / 64
    tol: float = 1e-9
    seed: int = 1234
    averaging: str = "arithmetic"


@dataclass(frozen=True)
class MeasurementSettings:
    step: float = None
    refine_tol: float = 1e-4
    max_levels: int = 4
    supersample: int = 4
    volume_method: str = "grid"
    seed: int = 0


@dataclass(frozen=True)
class CertificateSettings:
    q: float
    vhat_exponent_variant: str = "literal"
    precision_bits: int = DEFAULT_PRECISION


@dataclass(frozen=True)
class SweepSettings:
    regime: str
    values: tuple
    h: float = None
    measurement_max_levels: int = 2


@dataclass(frozen=True)
class OutputSettings:
    dir: str = "out"
    format: str = "csv"
    plots: bool = True


@dataclass(frozen=True)
class RunConfig:
    raw: dict
    certificate: CertificateSettings
    problem: ProblemSetup = None
    explicit_inputs: CertificateInputs = None
    solver: SolverSettings = field(default_factory=SolverSettings)
    measurement: MeasurementSettings = field(default_factory=MeasurementSettings)
    sweep: SweepSettings = None
    output: OutputSettings = field(default_factory=OutputSettings)

    def require_problem(self) -> ProblemSetup:
        if self.problem is None:
            raise ConfigError("this command needs a 'problem' section in the config")
        return self.problem


def _build_problem(spec: dict) -> ProblemSetup:
    omega0 = region_from_config(spec["omega0"])
    domain = domain_from_config(spec["box"], spec["gamma"])
    if omega0.n != domain.n:
        raise ConfigError("omega0 and box dimensions disagree")
    omega_hat = omega_hat_from_config(spec["omega_hat"], omega0)
    A = parse_coefficient(spec["A"], domain.n)
    V = parse_potential(spec["V"], domain.n)
    return ProblemSetup(domain, omega0, omega_hat, A, V)


def parse_config(raw: dict) -> RunConfig:
    validate_config_dict(raw)
    if "certificate" not in raw:
        raise ConfigError("config needs a 'certificate' section (at least the exponent q)")
    cert = CertificateSettings(**raw["certificate"])
    problem = _build_problem(raw["problem"]) if "problem" in raw else None
    explicit = None
    if "certificate_inputs" in raw:
        ci = dict(raw["certificate_inputs"])
        explicit = CertificateInputs(
            q=cert.q, vhat_exponent_variant=cert.vhat_exponent_variant, **ci
        )
    if problem is None and explicit is None:
        raise ConfigError("config needs either 'problem' or 'certificate_inputs'")
    solver = SolverSettings(**raw.get("solver", {}))
    meas = MeasurementSettings(**raw.get("measurement", {}))
    sweep = None
    if "sweep" in raw:
        s = dict(raw["sweep"])
        s["values"] = tuple(s["values"])
        sweep = SweepSettings(**s)
    output = OutputSettings(**raw.get("output", {}))
    return RunConfig(
        raw=raw,
        certificate=cert,
        problem=problem,
        explicit_inputs=explicit,
        solver=solver,
        measurement=meas,
        sweep=sweep,
        output=output,
    )


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as f:
            raw = json.load(f)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_config(raw)
