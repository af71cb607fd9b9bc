"""Parabolic-cylinder model problem at a stationary point.

Phi(zeta) is analytic off the real line, has a constant jump J across it and
behaves like (I + m/zeta) E(zeta)^{-1} at infinity, where

    t > 0:  E = exp(+i zeta^2 sigma3 / 4) zeta^{-i kappa sigma3}
    t < 0:  E = exp(-i zeta^2 sigma3 / 4) zeta^{+i kappa sigma3}.

Two of the four sign cases take zeta^{i kappa} with arg zeta in (-pi, pi),
the other two with arg zeta in (0, 2 pi).  With the cut on the positive half
line the diagonal of J picks up exp(-+2 pi kappa); `jump_matrix` returns the
jump the closed forms actually satisfy, which for the shifted-branch cases is
the textbook jump conjugated by exp(pi kappa sigma3).

beta = Phi' Phi^{-1} -+ (i zeta / 2) sigma3 is constant; only beta12 is
computed, beta21 = kappa / beta12.  The 1/zeta coefficient obeys
m12 = -i beta12 (t > 0) and m12 = +i beta12 (t < 0).
"""

from dataclasses import dataclass

import numpy as np

from . import cauchy
from .errors import DegenerateInputError, DomainError, SpectralConditionError
from .specfun import gamma_complex, pcf_D

SECTORS = ("O1", "O2", "O3", "O4", "O5", "O6")


@dataclass(frozen=True)
class SignCase:
    t_sign: int
    x_sign: int

    def __post_init__(self):
        if self.t_sign not in (1, -1) or self.x_sign not in (1, -1):
            raise ValueError("signs must be +1 or -1")

    @classmethod
    def from_key(cls, key):
        signs = {"+": 1, "-": -1}
        return cls(signs[key[0]], signs[key[1]])

    @classmethod
    def from_xt(cls, x, t):
        if t == 0 or x == 0:
            raise DomainError("sign case needs x != 0 and t != 0")
        return cls(int(np.sign(t)), int(np.sign(x)))

    @property
    def key(self):
        return ("+" if self.t_sign > 0 else "-") + ("+" if self.x_sign > 0 else "-")

    @property
    def shifted_branch(self):
        # arg zeta in (0, 2 pi) when the signs of t and x differ
        return self.t_sign != self.x_sign

    @property
    def xi_sign(self):
        # xi = -x / (4t)
        return -self.t_sign * self.x_sign

    @property
    def uses_breve(self):
        # the cut-left / cut-right mismatch brings in the left reflection coefficient
        return self.key in ("+-", "--")


ALL_CASES = tuple(SignCase.from_key(k) for k in ("++", "+-", "-+", "--"))


@dataclass(frozen=True)
class FrozenData:
    xi: float
    kappa: float
    r_xi: complex
    case: SignCase
    t: float = None

    @property
    def literal_margin(self):
        """1 - xi |r_xi|^2 for the r_xi stored here."""
        return 1 - self.xi * abs(self.r_xi) ** 2

    @property
    def degenerate(self):
        return self.kappa == 0 or self.r_xi == 0


def _check_xi_sign(xi, case):
    if xi == 0 or np.sign(xi) != case.xi_sign:
        raise DomainError(f"xi={xi} is incompatible with sign case {case.key}")


def _r_modulus_factor(case, kappa):
    # |r_xi| / |rho(xi)| for each case
    return {"++": 1.0, "--": 1.0, "+-": np.exp(2 * np.pi * kappa), "-+": np.exp(-2 * np.pi * kappa)}[case.key]


def freeze(rc, xi, t, case=None, kap=None):
    """Frozen scattering data r_xi for the model problem at xi = -x/(4t)."""
    if abs(t) < 1:
        raise DomainError(f"|t| = {abs(t)} < 1")
    case = case or SignCase(int(np.sign(t)), int(-np.sign(xi) * np.sign(t)))
    if case.t_sign != np.sign(t):
        raise DomainError(f"case {case.key} does not match t={t}")
    _check_xi_sign(xi, case)
    kap = cauchy.Kappa(rc) if kap is None else kap
    margin = float(kap.margin(xi))
    if not margin > 0:
        raise SpectralConditionError(f"1 - xi|rho(xi)|^2 = {margin:.3e} at xi={xi}", margin=margin)
    k = kap(xi)
    tt = abs(t)
    if kap.trivial:
        return FrozenData(xi, 0.0, 0j, case, t)
    if case.uses_breve:
        base = cauchy.breve_rho(rc, xi, kap)
    else:
        base = complex(kap.rho(xi))
    if case.key == "++":
        d2 = cauchy.delta0_eval(rc, xi, "left", kap) ** 2
    elif case.key == "+-":
        d2 = cauchy.delta0_eval(rc, xi, "right", kap) ** 2
    elif case.key == "-+":
        d2 = cauchy.delta0_eval(rc, xi, "right", kap) ** -2
    else:
        d2 = cauchy.delta0_eval(rc, xi, "left", kap) ** -2
    s = case.t_sign
    r = base * d2 * np.exp(-1j * s * k * np.log(8 * tt)) * np.exp(4j * s * tt * xi * xi)
    return FrozenData(xi, k, complex(r), case, t)


def frozen_from_kappa(xi, kappa, case, phase=0.0):
    """FrozenData with |r_xi| fixed by kappa, for tests of the model alone."""
    _check_xi_sign(xi, case)
    if np.sign(kappa) not in (0, np.sign(xi)):
        raise DomainError("kappa and xi must share a sign")
    rho_mod = np.sqrt((1 - np.exp(-2 * np.pi * kappa)) / xi)
    r = rho_mod * _r_modulus_factor(case, kappa) * np.exp(1j * phase)
    return FrozenData(float(xi), float(kappa), complex(r), case)


def jump_matrix(fd):
    """Constant jump Phi_+ = Phi_- J across the real line."""
    xi, k, r, key = fd.xi, fd.kappa, fd.r_xi, fd.case.key
    e = np.exp(-2 * np.pi * k)
    low = -xi * np.conj(r)
    if key == "++":
        return np.array([[1 - xi * abs(r) ** 2, r], [low, 1]])
    if key == "--":
        return np.array([[1, r], [low, 1 - xi * abs(r) ** 2]])
    if key == "+-":
        return np.array([[1, r], [low * e * e, e]])
    return np.array([[e, r], [low / (e * e), 1]])


def _prefactor(case, kappa):
    w = np.sqrt(2 * np.pi) * np.exp(-np.pi * kappa / 2)
    if case.t_sign > 0:
        c = w * np.exp(1j * np.pi / 4) / gamma_complex(-1j * kappa)
        return c * (np.exp(2 * np.pi * kappa) if case.key == "+-" else 1)
    c = w * np.exp(3j * np.pi / 4) / gamma_complex(1j * kappa)
    return c * (np.exp(-2 * np.pi * kappa) if case.key == "-+" else 1)


def beta12_eval(fd):
    """Closed-form beta12 for the case; 0 when kappa = 0."""
    if fd.kappa == 0:
        return 0j
    if fd.r_xi == 0:
        raise DegenerateInputError("r_xi = 0 with kappa != 0")
    return complex(_prefactor(fd.case, fd.kappa) / (-fd.xi * np.conj(fd.r_xi)))


@dataclass(frozen=True)
class ModelSolution:
    frozen: FrozenData
    beta12: complex
    beta21: complex

    @property
    def case(self):
        return self.frozen.case

    @property
    def kappa(self):
        return self.frozen.kappa

    @property
    def m12(self):
        return -1j * self.case.t_sign * self.beta12


def model_solution(fd, beta12=None):
    b12 = beta12_eval(fd) if beta12 is None else complex(beta12)
    if fd.kappa == 0:
        return ModelSolution(fd, 0j, 0j)
    return ModelSolution(fd, b12, fd.kappa / b12)


# entries of Phi: (order sign, prefactor (c, d) for exp(pi (c kappa + i d) / 4), rotation / pi)
# orders: 11 -> s i kappa, 12 -> -s i kappa - 1, 21 -> s i kappa - 1, 22 -> -s i kappa, s = t sign
_TABLE = {
    ("+", "upper"): ((-3, 0, -0.75), (1, -1, -0.25), (-3, -3, -0.75), (1, 0, -0.25)),
    ("++", "lower"): ((1, 0, 0.25), (-3, 3, 0.75), (1, 1, 0.25), (-3, 0, 0.75)),
    ("+-", "lower"): ((-7, 0, -1.75), (5, -5, -1.25), (-7, -7, -1.75), (5, 0, -1.25)),
    ("-", "upper"): ((1, 0, -0.25), (-3, -3, -0.75), (1, -1, -0.25), (-3, 0, -0.75)),
    ("-+", "lower"): ((5, 0, -1.25), (-7, -7, -1.75), (5, -5, -1.25), (-7, 0, -1.75)),
    ("--", "lower"): ((-3, 0, 0.75), (1, 1, 0.25), (-3, 3, 0.75), (1, 0, 0.25)),
}


def _entries(case, half):
    if half == "upper":
        return _TABLE[(case.key[0], "upper")]
    return _TABLE[(case.key, "lower")]


def _half_of(zeta, half):
    if half is not None:
        if half not in ("upper", "lower"):
            raise ValueError("half must be 'upper' or 'lower'")
        return half
    if np.any(np.imag(zeta) == 0):
        raise DomainError("real zeta needs an explicit half ('upper' or 'lower')")
    up = np.imag(zeta) > 0
    if np.all(up):
        return "upper"
    if not np.any(up):
        return "lower"
    return None


def arg_on_branch(zeta, shifted, half=None):
    """arg zeta on (-pi, pi] or [0, 2 pi); on the real line `half` picks the side."""
    zeta = np.asarray(zeta, dtype=complex)
    th = np.angle(zeta)
    if half is not None:
        on_axis = zeta.imag == 0
        neg = on_axis & (zeta.real < 0)
        pos = on_axis & (zeta.real > 0)
        th = np.where(neg, np.pi if half == "upper" else -np.pi, th)
        th = np.where(pos, 0.0, th)
    if shifted:
        th = np.where(th < 0, th + 2 * np.pi, th)
        if half == "lower":
            th = np.where(zeta.imag == 0, np.where(zeta.real > 0, 2 * np.pi, np.pi), th)
    return th


def normalizer(ms, zeta, half=None):
    """E(zeta) as 2x2 stacks (diagonal), so that Phi E -> I at infinity."""
    zeta = np.asarray(zeta, dtype=complex)
    s = ms.case.t_sign
    logz = np.log(np.abs(zeta)) + 1j * arg_on_branch(zeta, ms.case.shifted_branch, half)
    e11 = np.exp(s * (1j * zeta * zeta / 4 - 1j * ms.kappa * logz))
    out = np.zeros(zeta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = e11
    out[..., 1, 1] = 1 / e11
    return out


def phi_eval(ms, zeta, half=None):
    """Phi(zeta) as an array of shape zeta.shape + (2, 2).

    For real zeta pass half='upper' or 'lower' to get the boundary value.
    """
    zeta = np.asarray(zeta, dtype=complex)
    h = _half_of(zeta, half)
    if h is None:
        up = zeta.imag > 0
        out = np.empty(zeta.shape + (2, 2), dtype=complex)
        out[up] = phi_eval(ms, zeta[up], "upper")
        out[~up] = phi_eval(ms, zeta[~up], "lower")
        return out
    k = ms.kappa
    if k == 0:
        return np.linalg.inv(normalizer(ms, zeta, half))
    s = ms.case.t_sign
    orders = (s * 1j * k, -s * 1j * k - 1, s * 1j * k - 1, -s * 1j * k)
    mults = (1, -s * 1j * k / ms.beta21, s * 1j * k / ms.beta12, 1)
    out = np.empty(zeta.shape + (2, 2), dtype=complex)
    for idx, (a, m, (c, d, rot)) in enumerate(zip(orders, mults, _entries(ms.case, h))):
        pref = m * np.exp(np.pi * (c * k + 1j * d) / 4)
        out[..., idx // 2, idx % 2] = pref * pcf_D(a, zeta * np.exp(1j * np.pi * rot))
    return out


def jump_residual(ms, zeta_real):
    """Frobenius norm of Phi_+ - Phi_- J at real zeta (scalar or array)."""
    x = np.asarray(zeta_real, dtype=float)
    if np.any(x == 0):
        raise DomainError("jump residual is evaluated away from zeta = 0")
    z = x.astype(complex)
    up = phi_eval(ms, z, "upper")
    lo = phi_eval(ms, z, "lower")
    J = jump_matrix(ms.frozen) if ms.kappa != 0 else np.eye(2)
    res = np.linalg.norm(up - lo @ J, axis=(-2, -1))
    return res if res.ndim else float(res)


def beta12_wronskian(fd, zeta0=1.0):
    """beta12 from Phi^-_11 Phi^+_21 - Phi^-_21 Phi^+_11 = J_21 evaluated numerically.

    Phi_11 does not depend on beta and Phi_21 scales like 1/beta12, so one
    evaluation with beta12 = 1 fixes it.
    """
    if fd.kappa == 0:
        return 0j
    probe = ModelSolution(fd, 1 + 0j, complex(fd.kappa))
    z = complex(zeta0)
    up = phi_eval(probe, z, "upper")
    lo = phi_eval(probe, z, "lower")
    w = lo[0, 0] * up[1, 0] - lo[1, 0] * up[0, 0]
    return complex(w / jump_matrix(fd)[1, 0])


def _lower(l):
    return np.array([[1, 0], [l, 1]], dtype=complex)


def _upper(u):
    return np.array([[1, u], [0, 1]], dtype=complex)


def p_matrix(fd, sector):
    """Constant triangular factor P on sector O1..O6 (O1 = (0, pi/4), counterclockwise).

    P = I on O2 and O5.  The factors split J on each half line so that
    Phi P E is continuous across the real axis, with the branch-cut monodromy
    diag(b, 1/b) on whichever half line carries the cut.
    """
    if sector not in SECTORS:
        raise ValueError(f"sector must be one of {SECTORS}")
    if sector in ("O2", "O5") or fd.degenerate:
        return np.eye(2, dtype=complex)
    J = jump_matrix(fd)
    if fd.case.t_sign > 0:
        # lower factors on O1, O4; upper on O3, O6
        if sector == "O6":
            return _upper(J[0, 1] / J[1, 1])
        if sector == "O1":
            return _lower(-J[1, 0] / J[1, 1])
        if sector == "O3":
            return _upper(-J[0, 1] / J[0, 0])
        return _lower(J[1, 0] / J[0, 0])
    # t < 0: upper factors on O1, O4; lower on O3, O6
    if sector == "O6":
        return _lower(J[1, 0] / J[0, 0])
    if sector == "O1":
        return _upper(-J[0, 1] / J[0, 0])
    if sector == "O4":
        return _upper(J[0, 1] / J[1, 1])
    return _lower(-J[1, 0] / J[1, 1])


def sector_of(zeta):
    th = np.angle(complex(zeta))
    edges = np.pi * np.array([0, 0.25, 0.75, 1.0])
    if th > 0:
        return SECTORS[int(np.searchsorted(edges, th)) - 1]
    return SECTORS[6 - int(np.searchsorted(edges, -th))]


def npc_eval(ms, zeta):
    """Phi P E at a point off the real line; tends to I at infinity."""
    zeta = complex(zeta)
    P = p_matrix(ms.frozen, sector_of(zeta))
    return phi_eval(ms, zeta) @ P @ normalizer(ms, zeta)


def q_model(ms, t):
    """Leading term 2 i m12 / sqrt(8|t|) of the reconstructed potential."""
    return 2j * ms.m12 / np.sqrt(8 * abs(t))
