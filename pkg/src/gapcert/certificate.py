"""Evaluation of the explicit spectral-gap certificate.

Given the scalar inputs (dimension, integrability exponent, ellipticity
constants, separation distance, cylinder parameters, potential norms and the
inflated-support volume) this module evaluates, entirely in log2-domain
arbitrary precision, every constant of the certified lower bound for the
relative spectral gap, plus an independent second evaluation route through
the Harnack-iteration constants for cross-checking.

The two routes share only the :class:`~gapcert.logdomain.LogValue` primitive;
their formulas are written out separately on purpose.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from mpmath import mp, mpf
import mpmath

from .errors import (
    InconsistentInputError,
    InvalidInputError,
    PrecisionExhaustedError,
)
from .logdomain import LogValue, log_max, log_min

DEFAULT_PRECISION = 192

VHAT_VARIANTS = ("literal", "dimensional")


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in n dimensions, pi^(n/2)/Gamma(n/2+1)."""
    if not isinstance(n, int) or n < 1:
        raise InvalidInputError(f"dimension must be an integer >= 1, got {n!r}")
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def unit_sphere_area(n: int) -> float:
    """Area of the unit sphere in n dimensions, 2*pi^(n/2)/Gamma(n/2)."""
    if not isinstance(n, int) or n < 2:
        raise InvalidInputError(f"dimension must be an integer >= 2, got {n!r}")
    return 2 * math.pi ** (n / 2) / math.gamma(n / 2)


def sobolev_pair(n: int, q: float) -> tuple[float, float]:
    """The embedding exponent p and the dual exponent qhat = q/(q-2).

    p = n/(n-2) for n > 2 and qhat + 1 for n = 2; p > qhat holds for every
    admissible (n, q).
    """
    if not isinstance(n, int) or n < 2:
        raise InvalidInputError(f"dimension must be an integer >= 2, got {n!r}")
    if not q > n:
        raise InvalidInputError(f"integrability exponent must satisfy q > n, got q={q}, n={n}")
    qhat = q / (q - 2)
    p = n / (n - 2) if n > 2 else qhat + 1
    return p, qhat


@dataclass(frozen=True)
class CertificateInputs:
    """Scalar inputs of the gap certificate.

    Norms are L_{q/2} quantities: ``sup_local_V`` is the sup over centers in
    the (d/4)-inflated hull region of the local norm of V on balls of radius
    d/4; ``sup_local_Vminus`` the sup over centers in the perturbation support
    of the local norm of V^- on balls of radius d/2; ``norm_Vminus_Omega0``
    the norm of V^- over the whole perturbation support; ``vol_Omega0_d4``
    the volume of its (d/4)-inflation.
    """

    n: int
    q: float
    mu: float
    nu: float
    d: float
    L: float
    r0: float
    sup_local_V: float
    sup_local_Vminus: float
    norm_Vminus_Omega0: float
    vol_Omega0_d4: float
    dirichlet_everywhere: bool = False
    vhat_exponent_variant: str = "literal"

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise InvalidInputError(f"n must be an integer >= 2, got {self.n!r}")
        if not self.q > self.n:
            raise InvalidInputError(f"q > n required, got q={self.q}, n={self.n}")
        if not 0 < self.nu < self.mu:
            raise InvalidInputError(f"0 < nu < mu required, got nu={self.nu}, mu={self.mu}")
        for name in ("d", "L", "vol_Omega0_d4"):
            if not getattr(self, name) > 0:
                raise InvalidInputError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0 < self.r0 <= self.d:
            raise InvalidInputError(f"0 < r0 <= d required, got r0={self.r0}, d={self.d}")
        for name in ("sup_local_V", "sup_local_Vminus", "norm_Vminus_Omega0"):
            if getattr(self, name) < 0:
                raise InvalidInputError(f"{name} must be nonnegative")
        if self.vhat_exponent_variant not in VHAT_VARIANTS:
            raise InvalidInputError(
                f"vhat_exponent_variant must be one of {VHAT_VARIANTS}, "
                f"got {self.vhat_exponent_variant!r}"
            )

    def scaled(self, kappa: float) -> "CertificateInputs":
        """Inputs for the operator multiplied by kappa (coefficients and V)."""
        return CertificateInputs(
            n=self.n,
            q=self.q,
            mu=self.mu * kappa,
            nu=self.nu * kappa,
            d=self.d,
            L=self.L,
            r0=self.r0,
            sup_local_V=self.sup_local_V * kappa,
            sup_local_Vminus=self.sup_local_Vminus * kappa,
            norm_Vminus_Omega0=self.norm_Vminus_Omega0 * kappa,
            vol_Omega0_d4=self.vol_Omega0_d4,
            dirichlet_everywhere=self.dirichlet_everywhere,
            vhat_exponent_variant=self.vhat_exponent_variant,
        )


@dataclass(frozen=True)
class DerivedExponents:
    """Unit-ball/sphere measures and the Sobolev exponent pair, as mpf."""

    theta_big: mpf
    theta_small: mpf
    theta_big_nm1: mpf
    p: mpf
    qhat: mpf


def derived_exponents(n: int, q, precision: int = DEFAULT_PRECISION) -> DerivedExponents:
    if not isinstance(n, int) or n < 2:
        raise InvalidInputError(f"dimension must be an integer >= 2, got {n!r}")
    with mp.workprec(precision):
        qm = mpf(q)
        if not qm > n:
            raise InvalidInputError(f"q > n required, got q={q}, n={n}")
        half = mpf(n) / 2
        theta_big = mpmath.pi**half / mpmath.gamma(half + 1)
        theta_small = 2 * mpmath.pi**half / mpmath.gamma(half)
        hm1 = mpf(n - 1) / 2
        theta_big_nm1 = mpmath.pi**hm1 / mpmath.gamma(hm1 + 1)
        qhat = qm / (qm - 2)
        p = mpf(n) / (n - 2) if n > 2 else qhat + 1
        return DerivedExponents(theta_big, theta_small, theta_big_nm1, p, qhat)


_CHAIN_FIELDS = (
    "C1", "Vhat", "r1", "alpha",
    "c1", "c2", "c3", "c4", "c5", "c6", "c7", "c8", "c9",
    "bound", "C18", "c11",
)


@dataclass(frozen=True)
class ConstantChain:
    """All certificate constants in log domain, plus branch metadata."""

    C1: LogValue
    Vhat: LogValue
    r1: LogValue
    alpha: LogValue
    c1: LogValue
    c2: LogValue
    c3: LogValue
    c4: LogValue
    c5: LogValue
    c6: LogValue
    c7: LogValue
    c8: LogValue
    c9: LogValue
    bound: LogValue
    C18: LogValue
    c11: LogValue
    alpha_branch: str = "series"
    c1_branch: str = "harnack"
    precision: int = DEFAULT_PRECISION

    def as_records(self, digits: int = 20):
        """Flat (name, sign, log10-magnitude string) serialization."""
        records = []
        with mp.workprec(max(self.precision, 64)):
            for name in _CHAIN_FIELDS:
                lv: LogValue = getattr(self, name)
                mag = "-inf" if lv.sign == 0 else mpmath.nstr(lv.log10(), digits)
                records.append((name, lv.sign, mag))
        return records


@dataclass(frozen=True)
class Section5Constants:
    """The Harnack-iteration constants, evaluated on their own route."""

    C5: LogValue
    C7: LogValue
    C9: LogValue
    C10: LogValue
    C11: LogValue
    C12: LogValue
    C13: LogValue
    C2: LogValue
    precision: int = DEFAULT_PRECISION


class _Ctx:
    """Working-precision scalars shared by one chain evaluation."""

    def __init__(self, inputs: CertificateInputs, precision: int):
        self.inputs = inputs
        self.n = inputs.n
        self.q = mpf(inputs.q)
        self.mu = mpf(inputs.mu)
        self.nu = mpf(inputs.nu)
        self.d = mpf(inputs.d)
        self.L = mpf(inputs.L)
        self.r0 = mpf(inputs.r0)
        self.sup_v = mpf(inputs.sup_local_V)
        self.sup_vm = mpf(inputs.sup_local_Vminus)
        self.norm_vm = mpf(inputs.norm_Vminus_Omega0)
        self.vol = mpf(inputs.vol_Omega0_d4)
        ex = derived_exponents(inputs.n, inputs.q, precision)
        self.Th = ex.theta_big
        self.th = ex.theta_small
        self.Th_nm1 = ex.theta_big_nm1
        self.p = ex.p
        self.qh = ex.qhat


def _lv(x) -> LogValue:
    return LogValue.from_real(x)


def _checked(name: str, value: LogValue) -> LogValue:
    if not value.is_finite():
        raise PrecisionExhaustedError(name)
    return value


def _value_of(name: str, value: LogValue):
    """Materialize a LogValue as mpf, attributing guard failures to `name`."""
    try:
        return value.to_mpf()
    except PrecisionExhaustedError as exc:
        raise PrecisionExhaustedError(name, str(exc)) from exc


def _semibound_bracket(ctx: _Ctx) -> LogValue:
    """8*nu/d^2 (unless pure Dirichlet) + 3^(nq/(q-n)) (2(p+1)/nu)^(n/(q-n)) W^(q/(q-n))."""
    n, q, p = ctx.n, ctx.q, ctx.p
    term2 = (
        _lv(3) ** (n * q / (q - n))
        * _lv(2 * (p + 1) / ctx.nu) ** (n / (q - n))
        * _lv(ctx.sup_vm) ** (q / (q - n))
    )
    if ctx.inputs.dirichlet_everywhere:
        return term2
    return _lv(8 * ctx.nu / ctx.d**2) + term2


def semibound_constant(inputs: CertificateInputs, precision: int = DEFAULT_PRECISION) -> LogValue:
    """The lower-semibound constant of the quadratic form."""
    with mp.workprec(precision):
        return _checked("C1", _semibound_bracket(_Ctx(inputs, precision)))


def _potential_strength(ctx: _Ctx) -> LogValue:
    if ctx.inputs.vhat_exponent_variant == "literal":
        E = mpf(ctx.n) * ctx.q / 2
    else:
        E = 2 * mpf(ctx.n) / ctx.q
    bracket = _semibound_bracket(ctx)
    vhat = _lv(ctx.sup_v) + _lv(ctx.Th) ** (2 / ctx.q) * _lv(ctx.d / 2) ** E * bracket
    if vhat.is_zero:
        raise InconsistentInputError(
            "potential strength is exactly zero; the certificate's hypotheses "
            "exclude a vanishing perturbation"
        )
    return vhat


def potential_strength(inputs: CertificateInputs, precision: int = DEFAULT_PRECISION) -> LogValue:
    """The composite local-norm strength of the potential (must be nonzero)."""
    with mp.workprec(precision):
        return _checked("Vhat", _potential_strength(_Ctx(inputs, precision)))


def _alpha(c4: LogValue, n, q) -> tuple[LogValue, str]:
    """min{-log4(1 - 2^-c4), 1 - n/q} with a series branch for large c4."""
    c4_val = _value_of("alpha", c4)
    ln4 = mpmath.ln(mpf(4))
    if c4_val > 64:
        # -log4(1-x) = (x + x^2/2 + ...)/ln 4 for x = 2^-c4; relative error
        # of the two-term truncation is below 2^(-2*c4)
        log2_alpha = -c4_val - mpmath.log(ln4, 2)
        if c4_val < mp.prec + 64:
            x = mpf(2) ** (-c4_val)
            log2_alpha += mpmath.log(1 + x / 2 + x**2 / 3, 2)
        small = LogValue.exp2(log2_alpha)
        branch = "series"
    else:
        with mp.extraprec(int(c4_val) + 64):
            val = -mpmath.ln(1 - mpf(2) ** (-c4_val)) / ln4
        small = _lv(val)
        branch = "log"
    cap = _lv(1 - mpf(n) / q)
    if cap < small:
        return cap, "integrability"
    return small, branch


def constant_chain(inputs: CertificateInputs, precision: int = DEFAULT_PRECISION) -> ConstantChain:
    """Evaluate the full certificate chain in dependency order.

    Raises :class:`PrecisionExhaustedError` naming the first constant that
    fails to evaluate finitely at the requested precision.
    """
    with mp.workprec(precision):
        ctx = _Ctx(inputs, precision)
        n, q, p, qh = ctx.n, ctx.q, ctx.p, ctx.qh
        mu, nu, d, L = ctx.mu, ctx.nu, ctx.d, ctx.L
        Th, th = ctx.Th, ctx.th

        C1 = _checked("C1", _semibound_bracket(ctx))
        Vhat = _checked("Vhat", _potential_strength(ctx))

        c6 = _checked(
            "c6",
            _lv(9) * _lv(2) ** (2 * n + 9) * _lv(Th) ** ((1 - q) / q) / n
            * _lv(th + 1) * _lv(mu / nu),
        )
        c5 = _checked(
            "c5",
            log_max(
                _lv(2) ** (2 * n + 1) / _lv(Th),
                _lv(4) ** ((q * n / (q - n)) ** 2) * c6 ** (q * n / (q - n)),
            ),
        )
        c4 = _checked(
            "c4",
            _lv(3)
            + _lv(81) * _lv(2) ** (n + 9) * _lv(th + 1) ** 2 / (n * n)
            * _lv(mu / nu) ** 2 * c5 ** (2 * (n - 1) / mpf(n)),
        )
        alpha, alpha_branch = _alpha(c4, n, q)
        _checked("alpha", alpha)

        c4_val = _value_of("c4", c4)
        four_pow_alpha = LogValue.exp2(2 * _value_of("c3", alpha))
        c3 = _checked(
            "c3",
            four_pow_alpha
            * log_max(
                _lv(2),
                LogValue.exp2(c4_val + 2)
                * _lv(nu / (9 * mpmath.sqrt(mpf(6)) * mu * (p + 1)))
                / _lv(Th) ** (mpf(1) / n),
            ),
        )
        r1 = _checked(
            "r1",
            log_min(
                _lv(Th) ** (-mpf(1) / n)
                * (_lv(nu) / (_lv(12 * (p + 1) ** 2) * Vhat)) ** (q / (2 * (q - n))),
                _lv(d / 4),
            ),
        )
        grad_core = _lv(2) ** (n + 4) * _lv(mu * Th) + _lv(2) ** (
            n * (1 + 2 / q) - 3
        ) * Vhat * _lv(Th) ** (1 / qh) * _lv(d) ** (2 * (1 - n / q))
        c7 = _checked(
            "c7",
            _lv(Th) ** mpf("0.5") * _lv(nu) ** mpf("0.5")
            / _lv(2 ** (n + 1) * mpmath.e)
            * grad_core ** mpf("-0.5"),
        )
        cell = _lv(Th) ** (2 / q) * _lv(d) ** (2 * n / q - 2) / _lv(4) ** (2 * n / q)
        c8 = _checked(
            "c8",
            _lv((p + 1) ** 4 / p)
            * (_lv(2) ** 11 * _lv(1 + 4 * mu / nu) * cell + _lv(4) * Vhat / nu)
            * (_lv(2) ** 11 * _lv(1 + mu / nu) * cell + Vhat / nu),
        )
        c7_val = _value_of("c9", c7)
        log_ratio = (_lv(2 * p**3 / qh**2) / c7).ln() / mpmath.ln(p / qh)
        c9 = _checked(
            "c9",
            _lv(4 * (p + 1) ** 2 * p * qh / (p - qh) ** 2) * Vhat / nu
            * (LogValue.one() + c7 / qh)
            + _lv(2) ** (11 - 4 * n / q) * _lv((p + 1) ** 2 * qh)
            * _lv(Th) ** (2 / q) * _lv(d) ** (2 * n / q - 2)
            * _lv(1 / p + 4 * p / (p - qh) ** 2 * mu / nu)
            * _lv(log_ratio) ** 2,
        )
        c2 = _checked(
            "c2",
            LogValue.exp2(
                p * qh / (p - qh) + (p * qh + qh**2) / (p - qh) ** 2 - 2 * (n - 1) / c7_val
            )
            * _lv(p / qh) ** (p**2 * qh / (c7_val * (p - qh) ** 2))
            * _lv(1 + 2 * p**2 / qh**2) ** (qh / (2 * (p - qh)))
            * log_max(
                _lv(Th * d**n) ** (2 / c7_val),
                _lv(Th * d**n) ** ((p + qh) / (c7_val * qh)),
            )
            * log_max(c8 ** (qh / (2 * (p - qh))), c8 ** (qh**2 / (2 * p * (p - qh))))
            * log_max(c9 ** (p * qh / (c7_val * (p - qh))), c9 ** (p**2 / (c7_val * (p - qh)))),
        )

        inv_alpha = _value_of("c1", LogValue.one() / alpha)
        c2_8Ld = c2 ** (8 * L / d)
        candidates = [
            (_lv(3) * c3 * c2_8Ld) ** (-inv_alpha) * r1,
            _lv(d / 8),
            _lv(ctx.r0),
        ]
        labels = ["harnack", "d-eighth", "r0"]
        c1 = log_min(*candidates)
        c1_branch = labels[min(range(3), key=lambda i: (candidates[i] > c1, i))]
        _checked("c1", c1)

        denom_sum = (
            _lv((p + 1) / nu) ** (n / (q - n)) * _lv(ctx.norm_vm) ** (q / (q - n))
            + _lv(4 * mu) / r1**2
        )
        bound = _checked(
            "bound",
            _lv(ctx.Th_nm1) * c1 ** (n - 1) * _lv(nu)
            / (_lv(9 * L * ctx.vol) * denom_sum * c2_8Ld),
        )

        C18 = _checked("C18", (C1 + _lv(4 * mu) / r1**2) * _lv(ctx.vol))
        ln_c2 = c2.ln()
        if not ln_c2 > 0:
            raise PrecisionExhaustedError("c11", "c2 <= 1 leaves no Harnack decay rate")
        c11 = _checked(
            "c11",
            _lv(8 / d) * (LogValue.one() + _lv(n - 1) / alpha) * _lv(ln_c2),
        )

        return ConstantChain(
            C1=C1, Vhat=Vhat, r1=r1, alpha=alpha,
            c1=c1, c2=c2, c3=c3, c4=c4, c5=c5, c6=c6, c7=c7, c8=c8, c9=c9,
            bound=bound, C18=C18, c11=c11,
            alpha_branch=alpha_branch, c1_branch=c1_branch, precision=precision,
        )


def gap_bound(inputs: CertificateInputs, precision: int = DEFAULT_PRECISION) -> LogValue:
    """The certified lower bound for (lambda1 - lambda0)/|lambda1|."""
    return constant_chain(inputs, precision).bound


def section5_chain(inputs: CertificateInputs, precision: int = DEFAULT_PRECISION) -> Section5Constants:
    """Evaluate the Harnack-iteration constants independently of the chain."""
    with mp.workprec(precision):
        ctx = _Ctx(inputs, precision)
        n, q, p, qh = ctx.n, ctx.q, ctx.p, ctx.qh
        mu, nu, d = ctx.mu, ctx.nu, ctx.d
        Th = ctx.Th

        Vhat = _checked("Vhat", _potential_strength(ctx))
        cell = _lv(Th) ** (2 / q) * _lv(d) ** (2 * n / q - 2) / _lv(4) ** (2 * n / q)
        C5 = _checked(
            "C5",
            _lv((p + 1) ** 2) * (_lv(2) ** 11 * _lv(1 + 4 * mu / nu) * cell + _lv(4) * Vhat / nu),
        )
        C7 = _checked(
            "C7",
            _lv((p + 1) ** 2) * (_lv(2) ** 11 * _lv(1 + mu / nu) * cell + Vhat / nu),
        )
        C9 = _checked(
            "C9",
            _lv(Th) ** mpf("0.5") * _lv(nu) ** mpf("-0.5")
            * (
                _lv(2) ** (n + 4) * _lv(mu * Th)
                + _lv(2) ** (n * (1 + 2 / q) - 3) * Vhat * _lv(Th) ** (1 / qh)
                * _lv(d) ** (2 * (1 - n / q))
            )
            ** mpf("0.5"),
        )
        C10 = _checked("C10", _lv(Th) / (_lv(2) ** (n + 1) * _lv(mpmath.e) * C9))
        C11 = _checked("C11", _lv(2) ** (n + 1) * _lv(Th))
        C10_val = _value_of("C13", C10)
        log_ratio = (_lv(2 * p**3 / qh**2) / C10).ln() / mpmath.ln(p / qh)
        C12 = _checked(
            "C12",
            _lv(4 * (p + 1) ** 2 * p**2 / (p - qh) ** 2) * Vhat / nu
            * (LogValue.one() + C10 / qh)
            + _lv(2) ** (11 - 4 * n / q) * _lv((p + 1) ** 2)
            * _lv(Th) ** (2 / q) * _lv(d) ** (2 * n / q - 2)
            * _lv(1 + 4 * p**2 / (p - qh) ** 2 * mu / nu)
            * _lv(log_ratio) ** 2,
        )
        iter_pos = C5 * C7 / p
        iter_neg = C12 * qh / p
        C13 = _checked(
            "C13",
            LogValue.exp2(
                p * qh / (p - qh) + (p * qh + qh**2) / (p - qh) ** 2 - 2 * (n - 1) / C10_val
            )
            * _lv(p / qh) ** (p**2 * qh / (C10_val * (p - qh) ** 2))
            * _lv(1 + 2 * p**2 / qh**2) ** (qh / (2 * (p - qh)))
            * log_max(
                _lv(Th * d**n) ** (2 / C10_val),
                _lv(Th * d**n) ** ((p + qh) / (C10_val * qh)),
            )
            * log_max(
                iter_pos ** (qh / (2 * (p - qh))), iter_pos ** (qh**2 / (2 * p * (p - qh)))
            )
            * log_max(
                iter_neg ** (p * qh / (C10_val * (p - qh))),
                iter_neg ** (p**2 / (C10_val * (p - qh))),
            ),
        )
        C2 = _checked("C2", C13 ** (4 * ctx.L / d))
        return Section5Constants(
            C5=C5, C7=C7, C9=C9, C10=C10, C11=C11, C12=C12, C13=C13, C2=C2,
            precision=precision,
        )


def cross_check_full(
    inputs: CertificateInputs, precision: int = DEFAULT_PRECISION
) -> dict[str, mpf]:
    """Relative log-domain discrepancies between the two evaluation routes.

    Returns {name: |ln a - ln b| / max(|ln b|, 1)} for the renaming identities
    c2 = C13, c7 = C10, c8 = C5*C7/p, c9 = C12*qhat/p.
    """
    with mp.workprec(precision):
        chain = constant_chain(inputs, precision)
        s5 = section5_chain(inputs, precision)
        ex = derived_exponents(inputs.n, inputs.q, precision)
        p, qh = ex.p, ex.qhat
        pairs = {
            "c2": (chain.c2, s5.C13),
            "c7": (chain.c7, s5.C10),
            "c8": (chain.c8, s5.C5 * s5.C7 / p),
            "c9": (chain.c9, s5.C12 * qh / p),
        }
        return {
            name: abs(a.ln() - b.ln()) / max(abs(b.ln()), mpf(1))
            for name, (a, b) in pairs.items()
        }
