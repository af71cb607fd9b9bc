"""Complex gamma and parabolic cylinder functions D_a(z) in double precision.

D_a solves y'' = (z^2/4 - a - 1/2) y and is recessive as z -> +inf.  For
|z| >= R the two-term sector expansion is summed directly.  Inside that
radius the ODE is integrated along the ray through z with Taylor steps,
starting from the closed-form values at the origin, or from the asymptotic
values at radius R when D_a is recessive outward (|arg z| < pi/4).  Either
way D_a is the growing solution along the path, which keeps the stepping
stable.
"""

import warnings

import numpy as np
from scipy import special

from .errors import GammaPoleError, OrderRangeError

ORDER_RE_MAX = 2.0
ORDER_IM_MAX = 10.0
Z_MAX = 200.0

_TAYLOR_TERMS = 60
_STEP_REACH = 1.5
# rounding error of one Taylor step, used to turn condition estimates into error estimates
_UNIT_ERROR = 1e-15
ACCURACY_TARGET = 1e-8


def gamma_complex(z):
    """Gamma function for complex argument (scalar)."""
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == np.floor(z.real):
        raise GammaPoleError(f"gamma pole at z={z.real:g}")
    return complex(special.gamma(z))


def rgamma_complex(z):
    """1/Gamma(z); zero at the poles."""
    return complex(special.rgamma(complex(z)))


def check_order(a):
    a = complex(a)
    if abs(a.real) > ORDER_RE_MAX or abs(a.imag) > ORDER_IM_MAX:
        raise OrderRangeError(f"order a={a} outside |Re a|<={ORDER_RE_MAX}, |Im a|<={ORDER_IM_MAX}")
    return a


def _asymptotic_radius(a):
    return max(12.0, 8.0 + 3.0 * np.sqrt(abs(a)))


def _principal_arg(z):
    # negative reals with a signed zero imaginary part must land on +pi
    th = np.angle(z)
    return np.where((z.imag == 0) & (z.real < 0), np.pi, th)


def _asymptotic(a, z):
    """Sector expansion of D_a and D_a' for large |z|."""
    th = _principal_arg(z)
    logz = np.log(np.abs(z)) + 1j * th
    zm2 = 1.0 / (z * z)

    s_main = np.ones_like(z)
    ds_main = np.zeros_like(z)
    s_sub = np.ones_like(z)
    ds_sub = np.zeros_like(z)
    t_main = np.ones_like(z)
    t_sub = np.ones_like(z)
    live_main = np.ones(z.shape, dtype=bool)
    live_sub = np.ones(z.shape, dtype=bool)
    for s in range(1, 400):
        n_main = t_main * (-(-a + 2 * s - 2) * (-a + 2 * s - 1) / (2.0 * s)) * zm2
        n_sub = t_sub * ((a + 2 * s - 1) * (a + 2 * s) / (2.0 * s)) * zm2
        # a series is cut once it converges or its terms start to grow
        live_main &= (np.abs(n_main) <= np.abs(t_main)) & (np.abs(t_main) > 1e-17)
        live_sub &= (np.abs(n_sub) <= np.abs(t_sub)) & (np.abs(t_sub) > 1e-17)
        if not (np.any(live_main) or np.any(live_sub)):
            break
        t_main = np.where(live_main, n_main, 0)
        t_sub = np.where(live_sub, n_sub, 0)
        s_main = s_main + t_main
        ds_main = ds_main - 2 * s * t_main / z
        s_sub = s_sub + t_sub
        ds_sub = ds_sub - 2 * s * t_sub / z

    e_main = np.exp(a * logz - z * z / 4)
    d = e_main * s_main
    dp = e_main * ((a / z - z / 2) * s_main + ds_main)

    upper = th > np.pi / 2
    lower = th < -np.pi / 2
    if np.any(upper | lower):
        rg = rgamma_complex(-a)
        phase = np.where(upper, np.exp(1j * np.pi * a), np.exp(-1j * np.pi * a))
        e_sub = -np.sqrt(2 * np.pi) * rg * phase * np.exp((-a - 1) * logz + z * z / 4)
        sub = e_sub * s_sub
        dsub = e_sub * (((-a - 1) / z + z / 2) * s_sub + ds_sub)
        d = np.where(upper | lower, d + sub, d)
        dp = np.where(upper | lower, dp + dsub, dp)
    return d, dp


def _taylor_step(a, z0, y, yp, h):
    """Advance (y, y') from z0 to z0 + h by a truncated Taylor series."""
    big_a = z0 * z0 / 4 - a - 0.5
    h2 = h * h
    zero = np.zeros_like(y)
    e = [zero, y, yp * h, big_a * h2 * y / 2]
    total = e[1] + e[2] + e[3]
    dtotal = e[2] + 2 * e[3]
    for n in range(3, _TAYLOR_TERMS):
        # e[k] holds the Taylor term of degree k-1
        nxt = (big_a * h2 * e[n - 1] + (z0 / 2) * h2 * h * e[n - 2] + 0.25 * h2 * h2 * e[n - 3]) / (n * (n - 1))
        e.append(nxt)
        total = total + nxt
        dtotal = dtotal + n * nxt
        scale = np.abs(total) + 1e-300
        if np.all(np.abs(nxt) + np.abs(e[n]) < 1e-18 * scale):
            break
    return total, dtotal / h


def _step_length(a, r):
    # Taylor terms scale like (|h| sqrt|z^2/4 - a|)^n / n!
    return _STEP_REACH / np.sqrt(r * r / 4 + abs(a) + 1.5)


def _radial_nodes(a, r0, r1, angle):
    radii = [r0]
    r = r0
    sign = 1.0 if r1 >= r0 else -1.0
    while (r1 - r) * sign > 0:
        r = r + sign * _step_length(a, r if sign > 0 else r - _step_length(a, r))
        r = min(r, r1) if sign > 0 else max(r, r1)
        radii.append(r)
    return np.array(radii) * np.exp(1j * angle)


def _arc_nodes(a, r, th0, th1):
    if r == 0.0 or th0 == th1:
        return np.array([r * np.exp(1j * th0)])
    n = int(np.ceil(abs(th1 - th0) * r / _step_length(a, r))) + 1
    return r * np.exp(1j * np.linspace(th0, th1, n + 1))


def _march_nodes(a, paths, y, yp):
    """Integrate along padded node paths (rows of ``paths``).

    Each step's 2x2 propagator is kept, so the amplification of a rounding
    perturbation made at step k can be bounded by the norm of the product of
    the later propagators.  The returned condition estimate is the worst such
    amplification relative to the final value.
    """
    n, m = paths.shape
    eye = np.zeros((n, 2, 2), dtype=complex)
    eye[:, 0, 0] = 1
    eye[:, 1, 1] = 1
    steps = []
    sizes = [np.hypot(np.abs(y), np.abs(yp))]
    for j in range(m - 1):
        z0 = paths[:, j]
        h = paths[:, j + 1] - z0
        active = h != 0
        if not np.any(active):
            continue
        one = np.ones(active.sum(), dtype=complex)
        nil = np.zeros_like(one)
        ny, nyp = _taylor_step(a, z0[active], np.stack([y[active], one, nil]),
                               np.stack([yp[active], nil, one]), h[active])
        y[active] = ny[0]
        yp[active] = nyp[0]
        prop = eye.copy()
        prop[active, 0, 0] = ny[1]
        prop[active, 1, 0] = nyp[1]
        prop[active, 0, 1] = ny[2]
        prop[active, 1, 1] = nyp[2]
        steps.append(prop)
        sizes.append(np.hypot(np.abs(y), np.abs(yp)))
    tail = eye.copy()
    cond = sizes[-1].copy()
    for prop, size in zip(reversed(steps), reversed(sizes[:-1])):
        tail = tail @ prop
        cond = np.maximum(cond, np.abs(tail).sum(axis=(1, 2)) * size)
    cond = cond / np.maximum(np.abs(y), 1e-300)
    return y, yp, cond


def _pad(paths):
    m = max(len(p) for p in paths)
    out = np.empty((len(paths), m), dtype=complex)
    for i, p in enumerate(paths):
        out[i, : len(p)] = p
        out[i, len(p):] = p[-1]
    return out


def _origin_values(a):
    d0 = 2 ** (a / 2) * np.sqrt(np.pi) * rgamma_complex((1 - a) / 2)
    d0p = -(2 ** ((a + 1) / 2)) * np.sqrt(np.pi) * rgamma_complex(-a / 2)
    return d0, d0p


def _interior(a, r, th, radius, detour_angles=()):
    """D_a, D_a' and condition estimates for points inside the asymptotic radius.

    Candidate paths start at the origin or on the circle |z| = radius, run
    radially at angle th + phi and finish along the arc |z| = r.  The
    best-conditioned candidate wins.
    """
    offsets = (0.0,) + tuple(detour_angles)
    d0, d0p = _origin_values(a)
    paths, y, yp, owner = [], [], [], []
    for i in range(r.shape[0]):
        for phi in offsets:
            ang = th[i] + phi
            arc = _arc_nodes(a, r[i], ang, th[i])[1:]
            paths.append(np.concatenate([_radial_nodes(a, 0.0, r[i], ang), arc]))
            y.append(d0)
            yp.append(d0p)
            owner.append(i)
            paths.append(np.concatenate([_radial_nodes(a, radius, r[i], ang), arc]))
            owner.append(i)
            y.append(None)
            yp.append(None)
    starts = np.array([p[0] for p in paths])
    ya = np.array([v if v is not None else 0j for v in y], dtype=complex)
    ypa = np.array([v if v is not None else 0j for v in yp], dtype=complex)
    far = np.array([v is None for v in y])
    if np.any(far):
        ya[far], ypa[far] = _asymptotic(a, starts[far])
    ya, ypa, cond = _march_nodes(a, _pad(paths), ya, ypa)
    owner = np.array(owner)
    d = np.empty(r.shape, dtype=complex)
    dp = np.empty(r.shape, dtype=complex)
    best = np.full(r.shape, np.inf)
    for k in range(owner.shape[0]):
        i = owner[k]
        if cond[k] < best[i]:
            best[i] = cond[k]
            d[i] = ya[k]
            dp[i] = ypa[k]
    return d, dp, best


_DETOURS = tuple(s * k * np.pi / 8 for k in (1, 2, 3, 4, 6) for s in (1, -1))
_COND_LIMIT = 1e4


class PrecisionWarning(UserWarning):
    """Estimated relative error of a D_a evaluation exceeds ACCURACY_TARGET."""


def pcf_D_with_error(a, z):
    """Return (D_a(z), D_a'(z), estimated relative error)."""
    a = check_order(a)
    z_in = np.asarray(z, dtype=complex)
    z = np.atleast_1d(z_in).ravel().copy()
    if np.any(np.abs(z) > Z_MAX):
        raise OrderRangeError(f"|z| > {Z_MAX} is outside the supported range")
    d, dp, err = _evaluate(a, z)
    bad = err > ACCURACY_TARGET
    if np.any(bad):
        d[bad], dp[bad], err[bad] = _connected(a, z[bad], d[bad], dp[bad], err[bad])
    if z_in.ndim == 0:
        return complex(d[0]), complex(dp[0]), float(err[0])
    return d.reshape(z_in.shape), dp.reshape(z_in.shape), err.reshape(z_in.shape)


def _connected(a, z, d, dp, err):
    """Retry through D_a(z) = e^{s i pi a} D_a(-z) + c e^{s i pi (a+1)/2} D_{-a-1}(-s i z), s = +-1.

    With large |Im a| one of the two rotated points usually sits where the
    asymptotic expansion or a well-conditioned path applies.
    """
    c = np.sqrt(2 * np.pi) * rgamma_complex(-a)
    dm, dpm, em = _evaluate(a, -z)
    for s in (1, -1):
        w = -s * 1j
        e1 = np.exp(s * 1j * np.pi * a)
        e2 = c * np.exp(s * 1j * np.pi * (a + 1) / 2)
        dr, dpr, er = _evaluate(-a - 1, w * z)
        t1, t2 = e1 * dm, e2 * dr
        val = t1 + t2
        der = -e1 * dpm + w * e2 * dpr
        est = (np.abs(t1) * em + np.abs(t2) * er) / np.maximum(np.abs(val), 1e-300) + _UNIT_ERROR
        better = est < err
        d = np.where(better, val, d)
        dp = np.where(better, der, dp)
        err = np.where(better, est, err)
    return d, dp, err


def _evaluate(a, z):
    z = z.copy()

    # integer order: D_n is recessive on both real half-axes, use parity
    n_int = a.imag == 0 and a.real >= 0 and a.real == np.floor(a.real)
    flip = np.zeros(z.shape, dtype=bool)
    if n_int:
        flip = z.real < 0
        z[flip] = -z[flip]

    d = np.empty_like(z)
    dp = np.empty_like(z)
    err = np.full(z.shape, _UNIT_ERROR)
    radius = _asymptotic_radius(a)
    r = np.abs(z)
    th = _principal_arg(z)

    far = r >= radius
    if np.any(far):
        d[far], dp[far] = _asymptotic(a, z[far])

    idx = np.flatnonzero(~far)
    if idx.size:
        di, dpi, cond = _interior(a, r[idx], th[idx], radius)
        bad = cond > _COND_LIMIT
        if np.any(bad):
            # a zero of D_a sits near the ray; try bent paths around it
            db, dpb, cb = _interior(a, r[idx][bad], th[idx][bad], radius, _DETOURS)
            di[bad], dpi[bad], cond[bad] = db, dpb, cb
        d[idx] = di
        dp[idx] = dpi
        err[idx] = cond * _UNIT_ERROR

    if n_int:
        sign = (-1) ** int(a.real)
        d[flip] = sign * d[flip]
        dp[flip] = -sign * dp[flip]
    return d, dp, err


def pcf_D_and_derivative(a, z):
    """Return (D_a(z), D_a'(z)) for scalar order a and scalar or array z.

    Deep inside the turning-point region of orders with large |Im a| the
    function is exponentially small compared with every path that reaches
    it; there a PrecisionWarning reports the estimated error.
    """
    d, dp, err = pcf_D_with_error(a, z)
    worst = float(np.max(err))
    if worst > ACCURACY_TARGET:
        warnings.warn(f"D_{complex(a)}: estimated relative error {worst:.1e}", PrecisionWarning, stacklevel=2)
    return d, dp


def pcf_D(a, z):
    """Parabolic cylinder function D_a(z)."""
    return pcf_D_and_derivative(a, z)[0]


def pcf_recurrence_residual(a, z):
    """|D_a' + (z/2) D_a - a D_{a-1}| over |D_a'| + |z D_a / 2| + |a D_{a-1}|.

    D_a' comes from the evaluator itself.  The residual is scaled by the size
    of its terms because |D_a| ranges over many orders of magnitude in the box.
    """
    a = check_order(a)
    check_order(a - 1)
    z = np.asarray(z, dtype=complex)
    d, dp = pcf_D_and_derivative(a, z)
    dm1 = pcf_D(a - 1, z)
    terms = (dp, z / 2 * d, -a * dm1)
    scale = sum(np.abs(t) for t in terms)
    return np.abs(sum(terms)) / np.maximum(scale, 1e-300)


def pcf_wronskian(a, z):
    """W(D_a(z), D_a(-z)) = D_a(z) d/dz[D_a(-z)] - D_a'(z) D_a(-z)."""
    z = np.asarray(z, dtype=complex)
    d, dp = pcf_D_and_derivative(a, np.stack([z, -z]))
    return d[0] * (-dp[1]) - dp[0] * d[1]


def pcf_wronskian_scaled_residual(a, z):
    """|W - W_exact| over the size of the two products that W subtracts.

    Near arg z = +-pi/2 both D_a(z) and D_a(-z) grow like exp(|z|^2/4) and W
    is a small difference of large products; this measure stays meaningful there.
    """
    z = np.asarray(z, dtype=complex)
    d, dp = pcf_D_and_derivative(a, np.stack([z, -z]))
    p1, p2 = d[0] * (-dp[1]), dp[0] * d[1]
    return np.abs(p1 - p2 - pcf_wronskian_exact(a)) / (np.abs(p1) + np.abs(p2))


def pcf_wronskian_exact(a):
    return np.sqrt(2 * np.pi) * rgamma_complex(-complex(a))


def pcf_sector_leading(a, z):
    """The two-term large-|z| form of D_a(z) without the 1/z^2 corrections."""
    a = complex(a)
    z = np.asarray(z, dtype=complex)
    th = _principal_arg(z)
    logz = np.log(np.abs(z)) + 1j * th
    lead = np.exp(a * logz - z * z / 4)
    sub_pref = -np.sqrt(2 * np.pi) * rgamma_complex(-a) * np.exp((-a - 1) * logz + z * z / 4)
    upper = (th > np.pi / 4) & (th < 5 * np.pi / 4)
    lower = (th < -np.pi / 4) & (th > -5 * np.pi / 4)
    out = lead
    out = np.where(upper, lead + sub_pref * np.exp(1j * np.pi * a), out)
    out = np.where(lower, lead + sub_pref * np.exp(-1j * np.pi * a), out)
    return out
