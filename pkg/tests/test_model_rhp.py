import numpy as np
import pytest

from dnls_asymptotics import cauchy as C
from dnls_asymptotics import model_rhp as M
from dnls_asymptotics.errors import DegenerateInputError, DomainError, SpectralConditionError
from conftest import synthetic_rc

ZETAS = np.array([-10, -5, -2, -1, -0.5, 0.5, 1, 2, 5, 10.0])
# sqrt(-log(3/4) / (2 pi)), mpmath at 30 digits
ABS_BETA12_XI1 = 0.2139766900146409


def xi_for(case, mag=1.0):
    return case.xi_sign * mag


def solution(case, kappa, xi=None, phase=0.7):
    xi = xi_for(case) if xi is None else xi
    return M.model_solution(M.frozen_from_kappa(xi, np.sign(xi) * kappa, case, phase))


def test_sign_case_keys():
    assert [c.key for c in M.ALL_CASES] == ["++", "+-", "-+", "--"]
    assert M.SignCase.from_xt(3.0, -2.0).key == "-+"
    assert [c.shifted_branch for c in M.ALL_CASES] == [False, True, True, False]
    with pytest.raises(DomainError):
        M.SignCase.from_xt(0.0, 1.0)


@pytest.mark.parametrize("case", M.ALL_CASES, ids=lambda c: c.key)
@pytest.mark.parametrize("kappa", [0.05, 0.3, 1.0])
@pytest.mark.parametrize("xi_mag", [0.5, 2.0])
def test_jump_residual_sweep(case, kappa, xi_mag):
    ms = solution(case, kappa, xi_for(case, xi_mag))
    assert np.max(M.jump_residual(ms, ZETAS)) <= 1e-8


@pytest.mark.parametrize("case", M.ALL_CASES, ids=lambda c: c.key)
@pytest.mark.parametrize("kappa", [0.05, 0.3, 1.0])
def test_determinant_and_beta_routes(case, kappa):
    ms = solution(case, kappa)
    for z in (1 + 1j, -2 + 0.5j, 3 - 2j, -0.5 - 0.5j, 10j, -7j):
        assert abs(np.linalg.det(M.phi_eval(ms, z)) - 1) <= 1e-8
    assert abs(M.beta12_wronskian(ms.frozen, 1.0) / ms.beta12 - 1) <= 1e-7
    assert abs(M.beta12_wronskian(ms.frozen, -2.5) / ms.beta12 - 1) <= 1e-7
    assert abs(ms.beta12 * ms.beta21 - ms.kappa) <= 1e-10
    assert abs(abs(ms.beta12) ** 2 - ms.kappa / ms.frozen.xi) <= 1e-10


def test_det_example_point():
    ms = solution(M.SignCase.from_key("++"), 0.3)
    assert abs(np.linalg.det(M.phi_eval(ms, 1 + 1j)) - 1) <= 1e-8


@pytest.mark.parametrize("key", ["+-", "-+"])
def test_beta12_modulus_example(rc_half, key):
    # |rho(1)| = 1/2, so kappa(1) = -log(3/4)/(2 pi)
    case = M.SignCase.from_key(key)
    kap = C.Kappa(rc_half)
    fd = M.freeze(rc_half, 1.0, 10.0 * case.t_sign, case, kap)
    assert abs(M.beta12_eval(fd)) == pytest.approx(ABS_BETA12_XI1, rel=1e-10)


def test_residual_symmetric_in_zeta():
    ms = solution(M.SignCase.from_key("++"), 0.3)
    z = np.array([0.5, 1, 5])
    assert np.max(np.abs(M.jump_residual(ms, z) - M.jump_residual(ms, -z))) <= 1e-8


def test_degenerate_kappa_zero(rc_zero):
    case = M.SignCase.from_key("++")
    fd = M.freeze(rc_zero, -0.5, 10.0, case)
    assert fd.r_xi == 0 and fd.degenerate
    ms = M.model_solution(fd)
    assert ms.beta12 == 0 and ms.beta21 == 0
    assert M.jump_residual(ms, 1.0) <= 1e-14
    assert np.allclose(M.p_matrix(fd, "O1"), np.eye(2))
    with pytest.raises(DegenerateInputError):
        M.beta12_eval(M.FrozenData(-0.5, 0.1, 0j, case))


def test_freeze_checks(rc03, kap03):
    with pytest.raises(DomainError):
        M.freeze(rc03, -0.5, 0.5)
    with pytest.raises(DomainError):
        M.freeze(rc03, 0.5, 10.0, M.SignCase.from_key("++"))


def test_freeze_spectral_condition():
    # 1 - 2 * 0.81 < 0 at xi = 2
    rc = synthetic_rc(lambda z: 0.9 * np.exp(-((z - 2) ** 2)) + 0j)
    with pytest.raises((SpectralConditionError, DomainError)):
        M.freeze(rc, 2.0, 10.0, M.SignCase.from_key("+-"))


@pytest.mark.parametrize("key", ["++", "+-", "-+", "--"])
def test_freeze_moduli(rc03, kap03, key):
    case = M.SignCase.from_key(key)
    xi = 0.4 * case.xi_sign
    fd = M.freeze(rc03, xi, 25.0 * case.t_sign, case, kap03)
    rho = abs(complex(kap03.rho(xi)))
    k = kap03(xi)
    expected = rho * {"++": 1, "--": 1, "+-": np.exp(2 * np.pi * k), "-+": np.exp(-2 * np.pi * k)}[key]
    assert abs(fd.r_xi) == pytest.approx(expected, rel=1e-9)


def test_beta12_phase_tracks_t(rc03, kap03):
    case = M.SignCase.from_key("++")
    xi, t1, t2 = -0.3, 20.0, 33.0
    b1 = M.beta12_eval(M.freeze(rc03, xi, t1, case, kap03))
    b2 = M.beta12_eval(M.freeze(rc03, xi, t2, case, kap03))
    k = kap03(xi)
    expected = 4 * xi * xi * (t2 - t1) - k * np.log(t2 / t1)
    diff = np.angle(b2 / b1) - expected
    assert abs(np.angle(np.exp(1j * diff))) <= 1e-10


def test_p_matrix_entries():
    fd = solution(M.SignCase.from_key("++"), 0.3).frozen
    assert np.array_equal(M.p_matrix(fd, "O2"), np.eye(2))
    assert np.array_equal(M.p_matrix(fd, "O5"), np.eye(2))
    r, xi = fd.r_xi, fd.xi
    assert M.p_matrix(fd, "O4")[1, 0] == pytest.approx(-xi * np.conj(r) / (1 - xi * abs(r) ** 2), rel=1e-14)
    assert M.p_matrix(fd, "O1")[1, 0] == pytest.approx(xi * np.conj(r), rel=1e-14)
    with pytest.raises(ValueError):
        M.p_matrix(fd, "O7")


def test_sector_lookup():
    assert [M.sector_of(np.exp(1j * a)) for a in (0.3, 1.5, 3.0, -3.0, -1.5, -0.3)] == list(M.SECTORS)


@pytest.mark.parametrize("case", M.ALL_CASES, ids=lambda c: c.key)
def test_npc_normalized_at_infinity(case):
    # N = I + m/zeta + O(zeta^-2); at |zeta| = 40 the 1/zeta term alone is ~|m|/40
    ms = solution(case, 0.3)
    s = case.t_sign
    m12, m21 = ms.m12, 1j * s * ms.beta21
    errs = []
    for r in (20.0, 40.0):
        z = 1j * r
        N = M.npc_eval(ms, z)
        lead = np.array([[1, m12 / z], [m21 / z, 1]])
        errs.append(np.max(np.abs(N - lead - np.diag(np.diag(N - lead)))))
        k = abs(ms.kappa)
        assert np.max(np.abs(np.diag(N) - 1)) <= 5 * k / r ** 2 * (1 + k)
    # off the diagonal the remainder is O(zeta^-2) or better
    assert errs[1] <= 1e-3
    assert errs[0] / errs[1] >= 3.5


@pytest.mark.parametrize("case", M.ALL_CASES, ids=lambda c: c.key)
def test_npc_continuous_across_real_axis(case):
    # the sector factors exactly undo the jump of Phi and the branch cut of E
    ms = solution(case, 0.3)
    for x in (3.0, -3.0, 0.7, -0.2):
        assert np.max(np.abs(M.npc_eval(ms, x + 1e-9j) - M.npc_eval(ms, x - 1e-9j))) <= 1e-7
