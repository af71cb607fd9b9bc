"""Experiment configuration, the end-to-end comparison run and its report.

A run scatters the initial datum, evaluates the leading-order asymptotics on
each probe ray, evolves the datum with the pseudo-spectral solver and
compares the two at x = -4 xi t on a geometric time ladder.
"""

import copy
import csv
import json
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

import numpy as np
from scipy import stats

from . import asymptotics, cauchy, pde, scattering
from .errors import PipelineError
from .model_rhp import SignCase

SCHEMA_VERSION = 1

DEFAULT_TOLERANCES = {
    "amplitude_rel": 0.05,
    "slope_max": -0.6,
    "r2_min": 0.9,
    "phase_rad": 0.05,
    "gauge_rad": 0.05,
    "modulus_gauge": 1e-12,
    "plancherel": 1e-3,
    "mass_drift": 1e-8,
    "c_margin_min": 0.0,
}


def _default_datum():
    return {"family": "gaussian", "amplitude": 0.3, "width": 1.0, "path": None,
            "x_min": -20.0, "x_max": 20.0, "n": 4001}


@dataclass
class ExperimentConfig:
    datum: dict = field(default_factory=_default_datum)
    z_max: float = 8.0
    n_z: int = 257
    rays: list = field(default_factory=lambda: [-0.5, -0.25])
    t0: float = 20.0
    n_times: int = 4
    time_sign: int = 1
    t_min: float = asymptotics.T_MIN
    pde_controls: dict = field(default_factory=dict)
    # box = box_factor * max |x_probe|, grid spacing at most dx_max
    box_factor: float = 32.0
    dx_max: float = 0.16
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    output_dir: str = "out"
    seed: int = 0
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        self.datum = {**_default_datum(), **(self.datum or {})}
        self.tolerances = {**DEFAULT_TOLERANCES, **(self.tolerances or {})}
        self.validate()

    @property
    def times(self):
        return [self.time_sign * self.t0 * 2.0 ** k for k in range(self.n_times)]

    def validate(self):
        if self.schema_version != SCHEMA_VERSION:
            raise ValueError(f"unsupported config schema_version {self.schema_version}")
        if self.datum["family"] not in ("gaussian", "sech", "custom-file"):
            raise ValueError(f"unknown datum family {self.datum['family']!r}")
        if self.time_sign not in (1, -1):
            raise ValueError("time_sign must be +1 or -1")
        if self.n_times < 1 or self.t0 < self.t_min:
            raise ValueError(f"probe times must be >= t_min={self.t_min}")
        if not self.rays:
            raise ValueError("at least one probe ray is needed")
        for xi in self.rays:
            if not -self.z_max < xi < self.z_max:
                raise ValueError(f"ray xi={xi} outside the scattering grid")
        if self.n_z % 2 == 0:
            raise ValueError("n_z must be odd")

    def case_for(self, xi):
        # x = -4 xi t; xi = 0 is reported on the x > 0 side
        x_sign = -int(np.sign(xi)) * self.time_sign or 1
        return SignCase(self.time_sign, x_sign)

    def grid(self):
        c = {**pde.DEFAULTS, **self.pde_controls}
        if "box_length" in self.pde_controls or "n_fft" in self.pde_controls:
            return pde.Grid(c["box_length"], c["n_fft"])
        reach = max(abs(4 * xi * t) for xi in self.rays for t in self.times)
        length = max(self.box_factor * reach, 80.0)
        n = 2 ** int(np.ceil(np.log2(length / self.dx_max)))
        return pde.Grid(length, n)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d.setdefault("schema_version", SCHEMA_VERSION)
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def make_potential(datum):
    fam = datum["family"]
    if fam == "custom-file":
        with open(datum["path"]) as fh:
            d = json.load(fh)
        samples = np.asarray(d["re"]) + 1j * np.asarray(d.get("im", np.zeros(len(d["re"]))))
        return scattering.Potential(samples, d["x_min"], d["x_max"])
    A, w = datum["amplitude"], datum["width"]
    if fam == "gaussian":
        f = lambda x: A * np.exp(-(x / w) ** 2)
    else:
        f = lambda x: A / np.cosh(x / w)
    return scattering.Potential.from_function(f, datum["x_min"], datum["x_max"], datum["n"])


@dataclass
class DecayFit:
    slope: float
    intercept: float
    r2: float
    times: list
    errors: list

    def to_dict(self):
        return asdict(self)


def fit_decay(rows):
    """Least-squares line through (log |t|, log err)."""
    rows = [(float(t), float(e)) for t, e in rows]
    if len(rows) < 3:
        raise ValueError("a decay fit needs at least three points")
    bad = [(t, e) for t, e in rows if not (e > 0 and np.isfinite(e)) or t == 0]
    if bad:
        raise ValueError(f"degenerate points in decay fit: {bad}")
    t = np.array([abs(r[0]) for r in rows])
    e = np.array([r[1] for r in rows])
    if np.ptp(t) == 0:
        raise ValueError("decay fit needs distinct times")
    lr = stats.linregress(np.log(t), np.log(e))
    return DecayFit(float(lr.slope), float(lr.intercept), float(lr.rvalue ** 2),
                    [r[0] for r in rows], e.tolist())


def _wrap(phi):
    return float((phi + np.pi) % (2 * np.pi) - np.pi)


def _check(value, tol, ok):
    return {"value": value, "tol": tol, "pass": None if value is None else bool(ok)}


def compare_ray(rc, kap, states, xi, cfg):
    """Per-time comparison rows and checks for one ray."""
    tol = cfg.tolerances
    case = cfg.case_for(xi)
    alpha = asymptotics.alpha_eval(rc, xi, case, kap)
    k = kap(xi) if xi != 0 else 0.0
    g_lim = asymptotics.gauge_phase_asymptotic(rc, xi, cfg.time_sign, kap) if xi != 0 else None
    states = sorted(states, key=lambda s: abs(s.time))
    rows = []
    for st, (t, q) in zip(states, pde.ray_probe(states, xi)):
        x = -4 * xi * t
        q_as = asymptotics.q_asymptotic(rc, x, t, kap, cfg.t_min)
        u = pde.gauge_inverse(st)
        row = {
            "t": t, "x": x, "q_re": q.real, "q_im": q.imag,
            "abs_q_sqrt_t": abs(q) * np.sqrt(abs(t)),
            "err": abs(q - q_as),
            "modulus_gauge": float(np.max(np.abs(np.abs(u.field) - np.abs(st.field)))),
        }
        if alpha != 0 and q != 0:
            carrier = asymptotics.carrier(k, x, t)
            row["phase_residual"] = _wrap(np.angle(q / carrier) - np.angle(alpha))
        else:
            row["phase_residual"] = None
        if g_lim is not None:
            g = pde.gauge_phase_at(st, x)
            row["gauge_phase"] = float(np.angle(g))
            row["gauge_residual"] = _wrap(np.angle(g / g_lim))
        else:
            row["gauge_phase"] = row["gauge_residual"] = None
        rows.append(row)

    last = rows[-1]
    amod = abs(alpha)
    amp = abs(last["abs_q_sqrt_t"] / amod - 1) if amod else None
    try:
        fit = fit_decay([(r["t"], r["err"]) for r in rows])
        fit_note = None
    except ValueError as exc:
        fit, fit_note = None, str(exc)
    phase = abs(last["phase_residual"]) if last["phase_residual"] is not None else None
    gauge = abs(last["gauge_residual"]) if last["gauge_residual"] is not None else None
    checks = {
        "amplitude_rel": _check(amp, tol["amplitude_rel"], amp is not None and amp <= tol["amplitude_rel"]),
        "slope_max": _check(fit and fit.slope, tol["slope_max"], fit and fit.slope <= tol["slope_max"]),
        "r2_min": _check(fit and fit.r2, tol["r2_min"], fit and fit.r2 >= tol["r2_min"]),
        "phase_rad": _check(phase, tol["phase_rad"], phase is not None and phase <= tol["phase_rad"]),
        "gauge_rad": _check(gauge, tol["gauge_rad"], gauge is not None and gauge <= tol["gauge_rad"]),
        "modulus_gauge": _check(max(r["modulus_gauge"] for r in rows), tol["modulus_gauge"],
                                max(r["modulus_gauge"] for r in rows) <= tol["modulus_gauge"]),
    }
    return {
        "xi": xi,
        "case": case.key,
        "kappa": float(k),
        "alpha_mod": float(amod),
        "alpha_arg": float(np.angle(alpha)),
        "gauge_phase_limit": None if g_lim is None else float(np.angle(g_lim)),
        "rows": rows,
        "decay": fit.to_dict() if fit else None,
        "decay_note": fit_note,
        "checks": checks,
    }


def _status(report):
    checks = [report["plancherel"], report["c_margin"], report["pde"]["mass_drift"]]
    for ray in report["rays"]:
        checks.extend(ray["checks"].values())
    verdicts = [c["pass"] for c in checks]
    if any(v is False for v in verdicts):
        return "fail"
    if any(v is None for v in verdicts):
        return "inconclusive"
    return "pass"


def _empty_report(cfg):
    return {
        "schema_version": SCHEMA_VERSION,
        "created": None,
        "config": cfg.to_dict(),
        "tolerances": dict(cfg.tolerances),
        "status": "error",
        "failure": None,
        "c_margin": None,
        "plancherel": None,
        "pde": None,
        "rays": [],
    }


def run_pipeline(cfg, out_dir=None, rc=None, states=None):
    """Run every stage and write report.json (also on failure, with a failure marker).

    ``rc`` and ``states`` may be supplied to skip the scattering or PDE stage.
    """
    out_dir = out_dir or cfg.output_dir
    report = _empty_report(cfg)
    stage = "scattering"
    try:
        q0 = make_potential(cfg.datum)
        if rc is None:
            rc = scattering.reflection_map(q0, scattering.symmetric_grid(cfg.z_max, cfg.n_z))
        tol = cfg.tolerances
        report["c_margin"] = _check(rc.c_margin, tol["c_margin_min"], rc.c_margin > tol["c_margin_min"])
        stage = "cauchy"
        kap = cauchy.Kappa(rc)
        stage = "asymptotics"
        pl = asymptotics.plancherel_check(q0, rc, kap)
        report["plancherel"] = _check(pl, tol["plancherel"], pl <= tol["plancherel"])
        stage = "pde"
        if states is None:
            controls = {k: v for k, v in cfg.pde_controls.items() if k not in ("box_length", "n_fft")}
            states = pde.evolve_gi(q0, cfg.times[-1], cfg.times, controls, cfg.grid())
        m0 = states[0].mass_history[0][1]
        drift = max(abs(s.mass - m0) for s in states) / m0 if m0 else max(s.mass for s in states)
        g = states[0].grid
        report["pde"] = {
            "box_length": g.length,
            "n_fft": g.n,
            "mass0": m0,
            "mass_drift": _check(drift, tol["mass_drift"], drift <= tol["mass_drift"]),
            "edge_amplitude": max(g.edge_amplitude(s.field, pde.DEFAULTS["edge_fraction"]) for s in states),
        }
        stage = "harness"
        os.makedirs(out_dir, exist_ok=True)
        for xi in cfg.rays:
            ray = compare_ray(rc, kap, states, xi, cfg)
            report["rays"].append(ray)
            write_ray_csv(os.path.join(out_dir, f"ray_{xi:+.4f}.csv"), ray)
        report["status"] = _status(report)
    except (PipelineError, ValueError, ArithmeticError) as exc:
        report["status"] = "error"
        report["failure"] = {"stage": getattr(exc, "stage", stage), "type": type(exc).__name__,
                             "message": str(exc)}
    report["created"] = datetime.now(timezone.utc).isoformat()
    write_report(os.path.join(out_dir, "report.json"), report)
    return report


def write_ray_csv(path, ray):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x", "re_q", "im_q", "abs_q_sqrt_t", "alpha_mod", "err", "phase_residual",
                    "gauge_residual"])
        for r in ray["rows"]:
            w.writerow([r["t"], r["x"], r["q_re"], r["q_im"], r["abs_q_sqrt_t"], ray["alpha_mod"],
                        r["err"], r["phase_residual"], r["gauge_residual"]])


def jsonable(obj):
    if isinstance(obj, dict):
        return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_report(path, report):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as fh:
        json.dump(jsonable(report), fh, indent=2, sort_keys=True)


def load_report(path):
    with open(path) as fh:
        report = json.load(fh)
    if report.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported report schema_version {report.get('schema_version')}")
    return report


def strip_timestamp(report):
    r = copy.deepcopy(report)
    r.pop("created", None)
    return r
