"""Leading-order long-time behaviour of q (gauge form) and u (DNLS form).

On the ray xi = -x/(4t),

    q ~ |t|^{-1/2} alpha(xi) exp(-+ i kappa log(8|t|) + i x^2/(4t)),   t -> +-inf,

with |alpha|^2 = kappa/(2 xi) and a case-dependent phase.  u differs from q
by the limit of exp(i int_{-inf}^x |q|^2), which depends on xi only.
"""

from dataclasses import asdict, dataclass

import numpy as np

from . import cauchy, model_rhp
from .errors import AsymptoticsError, DomainError
from .model_rhp import SignCase
from .specfun import gamma_complex

T_MIN = 5.0


@dataclass
class AsymptoticProfile:
    xi: float
    case: str
    kappa: float
    alpha_mod: float
    alpha_arg: float
    gauge_phase: float

    def to_dict(self):
        return asdict(self)


def sign_case_for(x, t):
    if t == 0:
        raise DomainError("t must be nonzero")
    # x = 0 is handled as the x > 0 side; the two sides agree in the limit
    return SignCase(int(np.sign(t)), 1 if x >= 0 else -1)


def _arg_gamma(kappa, xi_sign):
    if kappa == 0:
        # arg Gamma(i k) -> -pi/2 (k -> 0+), +pi/2 (k -> 0-), and sign(k) = sign(xi)
        return -xi_sign * np.pi / 2
    return float(np.angle(gamma_complex(1j * kappa)))


def alpha_eval(rc, xi, case, kap=None, strict=True):
    """Complex amplitude alpha(xi) for the sign case (t sign, x sign).

    With strict=False the case formula is evaluated even when xi lies on the
    other side of 0 from the case (used to compare the formulas themselves).
    """
    kap = cauchy.Kappa(rc) if kap is None else kap
    if kap.trivial:
        return 0j
    if strict and xi != 0 and np.sign(xi) != case.xi_sign:
        raise DomainError(f"xi={xi} is not on the side of sign case {case.key}")
    if xi == 0:
        mod2 = abs(complex(kap.rho(0.0))) ** 2 / (4 * np.pi)
        k = 0.0
    else:
        k = kap(xi)
        mod2 = k / (2 * xi)
        if mod2 < 0 and strict:
            raise AsymptoticsError(f"kappa/xi < 0 at xi={xi}")
    rho = complex(kap.rho(xi))
    if rho == 0:
        return 0j
    ag = _arg_gamma(k, case.xi_sign)
    if case.t_sign > 0:
        arg = np.pi / 4 + ag + np.angle(rho) + cauchy.stieltjes_log(kap, xi, "left") / np.pi
        if case.x_sign < 0:
            arg -= np.pi
    else:
        arg = -np.pi / 4 - ag + np.angle(rho) + cauchy.stieltjes_log(kap, xi, "right") / np.pi
        if case.x_sign > 0:
            arg += np.pi
    return np.sqrt(abs(mod2)) * np.exp(1j * arg)


def carrier(kappa, x, t):
    s = np.sign(t)
    return np.exp(-1j * s * kappa * np.log(8 * abs(t)) + 1j * x * x / (4 * t))


def _check_t(t, t_min):
    if abs(t) < t_min:
        raise DomainError(f"|t|={abs(t)} below t_min={t_min}")


def q_asymptotic(rc, x, t, kap=None, t_min=T_MIN):
    kap = cauchy.Kappa(rc) if kap is None else kap
    _check_t(t, t_min)
    xi = -x / (4 * t)
    case = sign_case_for(x, t)
    a = alpha_eval(rc, xi, case, kap)
    k = kap(xi) if xi != 0 else 0.0
    return a * carrier(k, x, t) / np.sqrt(abs(t))


def q_model_route(rc, x, t, kap=None):
    """Same leading term assembled from the frozen data and the model's beta12."""
    kap = cauchy.Kappa(rc) if kap is None else kap
    xi = -x / (4 * t)
    case = sign_case_for(x, t)
    fd = model_rhp.freeze(rc, xi, t, case, kap)
    return model_rhp.q_model(model_rhp.model_solution(fd), t)


def _log_over_s(kap, xi, t_sign):
    side = "right" if t_sign > 0 else "left"
    return cauchy.log_over_s_integral(kap, xi, side)


def gauge_phase_asymptotic(rc, xi, t_sign, kap=None):
    """Limit of exp(i int_{-inf}^x |q|^2 dy) along the ray xi as t -> +-inf."""
    if xi == 0:
        raise DomainError("xi must be nonzero")
    kap = cauchy.Kappa(rc) if kap is None else kap
    if kap.trivial:
        return 1 + 0j
    return np.exp(-1j / np.pi * _log_over_s(kap, xi, t_sign))


def u_asymptotic(rc, x, t, kap=None, t_min=T_MIN):
    xi = -x / (4 * t) if t else 0.0
    if xi == 0:
        raise DomainError("xi must be nonzero")
    kap = cauchy.Kappa(rc) if kap is None else kap
    return q_asymptotic(rc, x, t, kap, t_min) * gauge_phase_asymptotic(rc, xi, np.sign(t), kap)


def profile(rc, xi, case, kap=None):
    kap = cauchy.Kappa(rc) if kap is None else kap
    a = alpha_eval(rc, xi, case, kap)
    g = gauge_phase_asymptotic(rc, xi, case.t_sign, kap) if xi != 0 else np.nan
    return AsymptoticProfile(
        xi=float(xi),
        case=case.key,
        kappa=float(kap(xi)),
        alpha_mod=float(abs(a)),
        alpha_arg=float(np.angle(a)) % (2 * np.pi),
        gauge_phase=float(np.angle(g)) if xi != 0 else float("nan"),
    )


def total_log_over_s(kap):
    """int_R log(1 - s|rho(s)|^2)/s ds."""
    return cauchy.log_over_s_integral(kap, 0.0, "left") + cauchy.log_over_s_integral(kap, 0.0, "right")


def plancherel_check(q, rc, kap=None):
    """|exp(i int |q0|^2) - exp(-(i/pi) int log(1 - s|rho|^2)/s ds)|."""
    kap = cauchy.Kappa(rc) if kap is None else kap
    x = q.x
    mass = np.trapezoid(np.abs(q.samples) ** 2, x)
    spectral = total_log_over_s(kap) if not kap.trivial else 0.0
    return float(abs(np.exp(1j * mass) - np.exp(-1j / np.pi * spectral)))
