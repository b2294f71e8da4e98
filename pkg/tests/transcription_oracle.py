"""Independent straight-line transcription of the certified-bound formulas.

This module is the reference oracle for the constant chain: every formula was
typed here directly from the printed displays, in plain value arithmetic with
mpmath, before and independently of ``gapcert.certificate``.  It shares no
code with the library (other than mpmath itself) and deliberately uses a
different representation: quantities are carried as mpf *values* wherever the
binary exponent stays a manageable integer, and only the cylinder radius
``c1``, the final bound, and their descendants are carried as natural logs.

Tests compare ``gapcert``'s log2-domain output against these numbers; frozen
20-digit snapshots derived from this module live in the test files.
"""

from mpmath import mp, mpf, gamma, sqrt, log, exp, pi, e as euler_e
import mpmath


def _theta_big(n):
    # volume of the unit ball
    return pi ** (mpf(n) / 2) / gamma(mpf(n) / 2 + 1)


def _theta_small(n):
    # area of the unit sphere
    return 2 * pi ** (mpf(n) / 2) / gamma(mpf(n) / 2)


def _sobolev_pair(n, q):
    qhat = q / (q - 2)
    p = mpf(n) / (n - 2) if n > 2 else qhat + 1
    return p, qhat


def _neg_log4_one_minus_pow2(c4):
    """-log_4(1 - 2^-c4), accurate at any magnitude of c4."""
    if c4 <= 1024:
        with mp.extraprec(int(c4) + 64):
            return -log(1 - mpf(2) ** (-c4)) / log(4)
    # series of -log(1-x)/log(4) for x = 2^-c4
    x = mpf(2) ** (-c4)
    return (x + x**2 / 2 + x**3 / 3) / log(4)


def reference_chain(
    n,
    q,
    mu,
    nu,
    d,
    L,
    r0,
    sup_local_v,
    sup_local_vminus,
    norm_vminus_omega0,
    vol_omega0_d4,
    dirichlet_everywhere=False,
    vhat_variant="literal",
    prec=400,
):
    """Evaluate every constant of the gap certificate and return natural logs.

    Returns a dict mapping constant names to mpf values of ln(constant);
    a constant that is exactly zero maps to mpf('-inf').
    """
    with mp.workprec(prec):
        n = int(n)
        q = mpf(q)
        mu, nu, d, L, r0 = (mpf(v) for v in (mu, nu, d, L, r0))
        sup_v = mpf(sup_local_v)
        sup_vm = mpf(sup_local_vminus)
        norm_vm = mpf(norm_vminus_omega0)
        vol = mpf(vol_omega0_d4)

        Th = _theta_big(n)
        Th_nm1 = _theta_big(n - 1)
        th = _theta_small(n)
        p, qh = _sobolev_pair(n, q)

        # lower-semibound constant; the first term drops for pure Dirichlet
        boundary_term = mpf(0) if dirichlet_everywhere else 8 * nu / d**2
        bracket = boundary_term + mpf(3) ** (n * q / (q - n)) * (
            2 * (p + 1) / nu
        ) ** (n / (q - n)) * sup_vm ** (q / (q - n))
        C1 = bracket

        if vhat_variant == "literal":
            E = n * q / 2
        elif vhat_variant == "dimensional":
            E = 2 * mpf(n) / q
        else:
            raise ValueError(vhat_variant)
        Vhat = sup_v + Th ** (2 / q) * (d / 2) ** E * bracket

        out = {}

        def put(name, value):
            out[name] = log(value) if value > 0 else mpf("-inf")

        put("C1", C1)
        put("Vhat", Vhat)

        c6 = 9 * mpf(2) ** (2 * n + 9) * Th ** ((1 - q) / q) / n * (th + 1) * mu / nu
        c5 = max(
            mpf(2) ** (2 * n + 1) / Th,
            mpf(4) ** ((q * n / (q - n)) ** 2) * c6 ** (q * n / (q - n)),
        )
        c4 = 3 + 81 * mpf(2) ** (n + 9) * (th + 1) ** 2 / n**2 * (mu / nu) ** 2 * c5 ** (
            2 * (n - 1) / mpf(n)
        )
        alpha = min(_neg_log4_one_minus_pow2(c4), 1 - n / q)
        c3 = mpf(4) ** alpha * max(
            mpf(2), mpf(2) ** (c4 + 2) * nu / (9 * sqrt(mpf(6)) * mu * (p + 1) * Th ** (mpf(1) / n))
        )
        r1 = min(
            Th ** (-mpf(1) / n) * (nu / (12 * (p + 1) ** 2 * Vhat)) ** (q / (2 * (q - n))),
            d / 4,
        )
        # kernel of the pointwise-gradient constant, shared by both routes
        grad_core = (
            mpf(2) ** (n + 4) * mu * Th
            + mpf(2) ** (n * (1 + 2 / q) - 3) * Vhat * Th ** (1 / qh) * d ** (2 * (1 - n / q))
        )
        c7 = Th ** mpf("0.5") * nu ** mpf("0.5") / (mpf(2) ** (n + 1) * euler_e) * grad_core ** mpf(
            "-0.5"
        )
        c8 = (
            (p + 1) ** 4
            / p
            * (
                mpf(2) ** 11 * (1 + 4 * mu / nu) * Th ** (2 / q) * d ** (2 * n / q - 2)
                / mpf(4) ** (2 * n / q)
                + 4 * Vhat / nu
            )
            * (
                mpf(2) ** 11 * (1 + mu / nu) * Th ** (2 / q) * d ** (2 * n / q - 2)
                / mpf(4) ** (2 * n / q)
                + Vhat / nu
            )
        )
        c9 = 4 * (p + 1) ** 2 * p * qh * Vhat / ((p - qh) ** 2 * nu) * (1 + c7 / qh) + mpf(2) ** (
            11 - 4 * n / q
        ) * (p + 1) ** 2 * qh * Th ** (2 / q) * d ** (2 * n / q - 2) * (
            1 / p + 4 * p / (p - qh) ** 2 * mu / nu
        ) * (log(2 * p**3 / (c7 * qh**2)) / log(p / qh)) ** 2
        c2 = (
            mpf(2)
            ** (p * qh / (p - qh) + (p * qh + qh**2) / (p - qh) ** 2 - 2 * (n - 1) / c7)
            * (p / qh) ** (p**2 * qh / (c7 * (p - qh) ** 2))
            * (1 + 2 * p**2 / qh**2) ** (qh / (2 * (p - qh)))
            * max((Th * d**n) ** (2 / c7), (Th * d**n) ** ((p + qh) / (c7 * qh)))
            * max(c8 ** (qh / (2 * (p - qh))), c8 ** (qh**2 / (2 * p * (p - qh))))
            * max(c9 ** (p * qh / (c7 * (p - qh))), c9 ** (p**2 / (c7 * (p - qh))))
        )

        put("c6", c6)
        put("c5", c5)
        put("c4", c4)
        put("alpha", alpha)
        put("c3", c3)
        put("r1", r1)
        put("c7", c7)
        put("c8", c8)
        put("c9", c9)
        put("c2", c2)

        # c1 and the bound live in ln-domain: their binary exponents are ~2^c4
        ln_c1 = min(
            log(r1) - (log(3) + log(c3) + 8 * L / d * log(c2)) / alpha,
            log(d / 8),
            log(r0),
        )
        out["c1"] = ln_c1

        denom_sum = ((p + 1) / nu) ** (n / (q - n)) * norm_vm ** (q / (q - n)) + 4 * mu / r1**2
        ln_bound = (
            log(Th_nm1)
            + (n - 1) * ln_c1
            + log(nu)
            - log(9 * L * vol * denom_sum)
            - 8 * L / d * log(c2)
        )
        out["bound"] = ln_bound

        put("C18", (C1 + 4 * mu / r1**2) * vol)
        put("c11", 8 / d * (1 + (n - 1) / alpha) * log(c2))

        # second route: the Harnack-iteration constants in their original form
        S5_C5 = (p + 1) ** 2 * (
            mpf(2) ** 11 * (1 + 4 * mu / nu) * Th ** (2 / q) * d ** (2 * n / q - 2)
            / mpf(4) ** (2 * n / q)
            + 4 * Vhat / nu
        )
        S5_C7 = (p + 1) ** 2 * (
            mpf(2) ** 11 * (1 + mu / nu) * Th ** (2 / q) * d ** (2 * n / q - 2)
            / mpf(4) ** (2 * n / q)
            + Vhat / nu
        )
        S5_C9 = Th ** mpf("0.5") * nu ** mpf("-0.5") * grad_core ** mpf("0.5")
        S5_C10 = Th / (mpf(2) ** (n + 1) * euler_e * S5_C9)
        S5_C11 = mpf(2) ** (n + 1) * Th
        S5_C12 = 4 * (p + 1) ** 2 * p**2 / (p - qh) ** 2 * Vhat / nu * (1 + S5_C10 / qh) + mpf(
            2
        ) ** (11 - 4 * n / q) * (p + 1) ** 2 * Th ** (2 / q) * d ** (2 * n / q - 2) * (
            1 + 4 * p**2 / (p - qh) ** 2 * mu / nu
        ) * (log(2 * p**3 / (S5_C10 * qh**2)) / log(p / qh)) ** 2
        S5_C13 = (
            mpf(2)
            ** (p * qh / (p - qh) + (p * qh + qh**2) / (p - qh) ** 2 - 2 * (n - 1) / S5_C10)
            * (p / qh) ** (p**2 * qh / (S5_C10 * (p - qh) ** 2))
            * (1 + 2 * p**2 / qh**2) ** (qh / (2 * (p - qh)))
            * max((Th * d**n) ** (2 / S5_C10), (Th * d**n) ** ((p + qh) / (S5_C10 * qh)))
            * max(
                (S5_C5 * S5_C7 / p) ** (qh / (2 * (p - qh))),
                (S5_C5 * S5_C7 / p) ** (qh**2 / (2 * p * (p - qh))),
            )
            * max(
                (S5_C12 * qh / p) ** (p * qh / (S5_C10 * (p - qh))),
                (S5_C12 * qh / p) ** (p**2 / (S5_C10 * (p - qh))),
            )
        )
        put("S5.C5", S5_C5)
        put("S5.C7", S5_C7)
        put("S5.C9", S5_C9)
        put("S5.C10", S5_C10)
        put("S5.C11", S5_C11)
        put("S5.C12", S5_C12)
        put("S5.C13", S5_C13)
        out["S5.C2"] = 4 * L / d * log(S5_C13)

        return out


def log10_strings(chain, digits=20):
    """Render {name: ln value} as {name: 20-digit log10 string} for freezing."""
    out = {}
    with mp.workprec(max(mp.prec, 240)):
        for k, v in chain.items():
            out[k] = mpmath.nstr(v / log(mpf(10)), digits)
    return out


if __name__ == "__main__":
    import json
    import sys

    args = json.loads(sys.argv[1]) if len(sys.argv) > 1 else {}
    ref = dict(
        n=2, q=4, mu=2, nu=1, d=1, L=4, r0=0.125,
        sup_local_v=1, sup_local_vminus=1, norm_vminus_omega0=1, vol_omega0_d4=10,
        dirichlet_everywhere=False, vhat_variant="literal",
    )
    ref.update(args)
    for name, s in log10_strings(reference_chain(**ref)).items():
        print(f"{name:8s} log10 = {s}")
