"""Command line entry point.

Exit codes: 0 success, 2 a tolerance check failed (or could not be decided),
1 any error.
"""

import argparse
import csv
import json
import os
import sys
import warnings

import numpy as np

from . import asymptotics, cauchy, harness, pde, scattering, specfun
from .errors import PipelineError
from .scattering import ReflectionCoefficient

EXIT_OK, EXIT_ERROR, EXIT_TOLERANCE = 0, 1, 2

SELFTEST_TOLERANCES = {"wronskian_rel": 1e-10, "recurrence": 1e-8}
WRONSKIAN_KAPPAS = (0.01, 0.1, 0.5, 1.0)
# away from arg z = +-pi/2, where W is a difference of two exp(|z|^2/2)-sized products
WRONSKIAN_Z = np.array([0.3, 1.0 + 0.5j, -2.0 + 1.0j, 4.0 - 3.0j, 6.0, -8.0 + 1.0j, 10.0 + 2.0j, 1.5j])
WRONSKIAN_Z_CANCEL = np.array([3.0j, 7.0j, -5.0j, 9.0j])


def _parse_overrides(items):
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ValueError(f"--tol-override expects k=v, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = float(v)
    return out


def _apply_overrides(tolerances, overrides):
    unknown = set(overrides) - set(tolerances)
    if unknown:
        raise ValueError(f"unknown tolerance keys: {sorted(unknown)}")
    tolerances.update(overrides)
    return tolerances


def _config(args):
    cfg = harness.ExperimentConfig.load(args.config) if args.config else harness.ExperimentConfig()
    _apply_overrides(cfg.tolerances, _parse_overrides(args.tol_override))
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out:
        cfg.output_dir = args.out
    return cfg


def _out_dir(args, cfg=None):
    d = args.out or (cfg.output_dir if cfg else "out")
    os.makedirs(d, exist_ok=True)
    return d


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(harness.jsonable(obj), fh, indent=2, sort_keys=True)


def _scatter(cfg):
    q0 = harness.make_potential(cfg.datum)
    return q0, scattering.reflection_map(q0, scattering.symmetric_grid(cfg.z_max, cfg.n_z))


def _load_rc(path):
    with open(path) as fh:
        d = json.load(fh)
    return ReflectionCoefficient.from_dict(d.get("rc", d))


def cmd_scatter(args):
    cfg = _config(args)
    _, rc = _scatter(cfg)
    out = _out_dir(args, cfg)
    path = os.path.join(out, "rc.json")
    _write_json(path, {"schema_version": harness.SCHEMA_VERSION, "datum": cfg.datum, "rc": rc.to_dict()})
    print(f"c_margin={rc.c_margin:.6g} edge_decay={rc.edge_decay:.3g} -> {path}")
    return EXIT_OK


def cmd_asymptote(args):
    cfg = _config(args)
    rc = _load_rc(args.rc) if args.rc else _scatter(cfg)[1]
    kap = cauchy.Kappa(rc)
    if (args.x is None) == (args.xi is None):
        raise ValueError("give exactly one of --x or --xi")
    rows = []
    for t in args.t:
        x = args.x if args.x is not None else -4 * args.xi * t
        xi = -x / (4 * t)
        if args.field == "u":
            v = asymptotics.u_asymptotic(rc, x, t, kap, cfg.t_min)
        else:
            v = asymptotics.q_asymptotic(rc, x, t, kap, cfg.t_min)
        rows.append({"t": t, "x": x, "xi": xi, "re": v.real, "im": v.imag, "abs": abs(v)})
    first = rows[0]
    case = asymptotics.sign_case_for(first["x"], first["t"])
    prof = asymptotics.profile(rc, first["xi"], case, kap)
    out = _out_dir(args, cfg)
    _write_json(os.path.join(out, "asymptote.json"),
                {"schema_version": harness.SCHEMA_VERSION, "field": args.field,
                 "profile": prof.to_dict(), "rows": rows})
    with open(os.path.join(out, "asymptote.csv"), "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    for r in rows:
        print(f"t={r['t']:g} x={r['x']:g} {args.field}=({r['re']:.10g}, {r['im']:.10g})")
    return EXIT_OK


def cmd_evolve(args):
    cfg = _config(args)
    q0 = harness.make_potential(cfg.datum)
    controls = {k: v for k, v in cfg.pde_controls.items() if k not in ("box_length", "n_fft")}
    states = pde.evolve_gi(q0, cfg.times[-1], cfg.times, controls, cfg.grid())
    out = _out_dir(args, cfg)
    for st in states:
        _write_json(os.path.join(out, f"snapshot_t{st.time:+g}.json"), pde.snapshot_dict(st, args.stride))
    for xi in cfg.rays:
        pde.write_probe_csv(os.path.join(out, f"probe_{xi:+.4f}.csv"), pde.ray_probe(states, xi))
    m0 = states[0].mass_history[0][1]
    print(f"evolved to t={cfg.times[-1]:g}; mass drift {max(abs(s.mass - m0) for s in states) / (m0 or 1):.2e}")
    return EXIT_OK


def cmd_verify(args):
    cfg = _config(args)
    report = harness.run_pipeline(cfg)
    print(f"status: {report['status']}  report: {os.path.join(cfg.output_dir, 'report.json')}")
    if report["failure"]:
        f = report["failure"]
        print(f"error in stage {f['stage']}: {f['message']}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK if report["status"] == "pass" else EXIT_TOLERANCE


def selftest(seed=0, tolerances=None, n_points=100):
    """Wronskian and recurrence identities of the parabolic cylinder functions."""
    tol = dict(SELFTEST_TOLERANCES, **(tolerances or {}))
    rng = np.random.default_rng(seed)
    wr = []
    for kappa in WRONSKIAN_KAPPAS:
        a = 1j * kappa
        w = specfun.pcf_wronskian(a, WRONSKIAN_Z)
        exact = specfun.pcf_wronskian_exact(a)
        scaled = specfun.pcf_wronskian_scaled_residual(a, WRONSKIAN_Z_CANCEL)
        wr.append({"a_im": kappa, "max_rel": float(np.max(np.abs(w / exact - 1))),
                   "max_scaled_imag_axis": float(np.max(scaled))})
    rec = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", specfun.PrecisionWarning)
        for _ in range(n_points):
            a = complex(rng.uniform(-specfun.ORDER_RE_MAX + 1, specfun.ORDER_RE_MAX),
                        rng.uniform(-specfun.ORDER_IM_MAX, specfun.ORDER_IM_MAX))
            z = rng.uniform(0, 10) * np.exp(1j * rng.uniform(-np.pi, np.pi))
            rec.append(float(specfun.pcf_recurrence_residual(a, z)))
    w_max = max(max(r["max_rel"], r["max_scaled_imag_axis"]) for r in wr)
    r_max = max(rec)
    return {
        "schema_version": harness.SCHEMA_VERSION,
        "seed": seed,
        "tolerances": tol,
        "wronskian": wr,
        "wronskian_pass": w_max <= tol["wronskian_rel"],
        "recurrence_max": r_max,
        "recurrence_points": n_points,
        "recurrence_pass": r_max <= tol["recurrence"],
    }


def cmd_selftest(args):
    overrides = _parse_overrides(args.tol_override)
    _apply_overrides(dict(SELFTEST_TOLERANCES), overrides)
    res = selftest(args.seed or 0, overrides)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _write_json(os.path.join(args.out, "specfun_selftest.json"), res)
    print(f"wronskian max rel {max(r['max_rel'] for r in res['wronskian']):.2e}, scaled on the "
          f"imaginary axis {max(r['max_scaled_imag_axis'] for r in res['wronskian']):.2e}: "
          f"{'PASS' if res['wronskian_pass'] else 'FAIL'}")
    print(f"recurrence max residual {res['recurrence_max']:.2e} on {res['recurrence_points']} points: "
          f"{'PASS' if res['recurrence_pass'] else 'FAIL'}")
    return EXIT_OK if res["wronskian_pass"] and res["recurrence_pass"] else EXIT_TOLERANCE


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config (JSON)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--tol-override", action="append", metavar="K=V", help="override one tolerance")
    common.add_argument("--seed", type=int, help="seed for randomized sampling")

    p = argparse.ArgumentParser(prog="dnls-asymptotics", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("scatter", parents=[common], help="datum -> reflection coefficient JSON")
    s.set_defaults(func=cmd_scatter)

    s = sub.add_parser("asymptote", parents=[common], help="leading-order q or u at (x, t) or on a ray")
    s.add_argument("--rc", help="reflection coefficient JSON from `scatter`")
    s.add_argument("--x", type=float)
    s.add_argument("--xi", type=float)
    s.add_argument("--t", type=float, nargs="+", required=True)
    s.add_argument("--field", choices=("q", "u"), default="q",
                   help="q: gauge form; u: DNLS form (needs xi != 0)")
    s.set_defaults(func=cmd_asymptote)

    s = sub.add_parser("evolve", parents=[common], help="datum -> snapshots and ray probes")
    s.add_argument("--stride", type=int, default=16, help="keep every stride-th grid point in snapshots")
    s.set_defaults(func=cmd_evolve)

    s = sub.add_parser("verify", parents=[common], help="full comparison run -> report.json")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("specfun-selftest", parents=[common], help="parabolic cylinder identity checks")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PipelineError, ValueError, OSError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
