"""Command line harness: verify suites, inspect curvature, Dirac data, monopoles.

Exit codes: 0 all checks pass, 1 verification failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

import numpy as np

from . import bundles as bnd
from . import seiberg_witten as swm
from .charts import ChartDomainError, get_chart, metric_jet, registry
from .curvature import curvature_data
from .forms import random_poly_scalar
from .report import render_human, render_json
from .spin import SpinSignatureError
from .suites import SUITE_NAMES, SuiteUsageError, run_suite

USAGE_EXIT = 2
FAIL_EXIT = 1


def _parse_point(text: str, n: int) -> np.ndarray:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise SuiteUsageError(f"bad point {text!r}: {exc}") from exc
    if len(vals) != n:
        raise SuiteUsageError(f"point has {len(vals)} coordinates, chart needs {n}")
    return np.asarray(vals, dtype=float)


def _matrix_list(a: np.ndarray) -> list:
    arr = np.asarray(a)
    if np.iscomplexobj(arr):
        if np.max(np.abs(arr.imag)) < 1e-300:
            arr = arr.real
        else:
            return [[{"re": float(v.real), "im": float(v.imag)} for v in row]
                    for row in arr.reshape(arr.shape[0], -1)]
    return arr.tolist()


def cmd_verify(args) -> int:
    cfg = None
    if args.config:
        cfg = swm.load_sw_config(args.config)
    rep = run_suite(args.suite, chart=args.chart, seed=args.seed,
                    samples=args.samples, sw_config=cfg)
    out = (render_human(rep, args.timings) if args.human
           else render_json(rep, args.timings))
    sys.stdout.write(out)
    return 0 if rep.passed else FAIL_EXIT


def cmd_curvature(args) -> int:
    ch = get_chart(args.chart)
    if args.point is None:
        rng = np.random.default_rng(args.seed)
        x = ch.sample_point(rng)
    else:
        x = _parse_point(args.point, ch.n)
    ch.validate_point(x)
    cd = curvature_data(metric_jet(ch, x))
    payload = {
        "chart": args.chart,
        "point": [float(v) for v in x],
        "metric": _matrix_list(cd.mj.g),
        "christoffel": np.asarray(cd.christoffel).tolist(),
        "riemann": np.asarray(cd.riemann).tolist(),
        "ricci": np.asarray(cd.ricci).tolist(),
        "scalar_curvature": float(cd.scalar),
    }
    if args.human:
        lines = [f"chart {args.chart} at point "
                 + ", ".join(f"{v:.6g}" for v in x),
                 "metric:"]
        for row in payload["metric"]:
            lines.append("  " + "  ".join(f"{v:12.6f}" for v in row))
        lines.append(f"scalar curvature: {cd.scalar:.12g}")
        sys.stdout.write("\n".join(lines) + "\n")
    else:
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_dirac(args) -> int:
    ch = get_chart(args.chart)
    n = ch.n
    rng = np.random.default_rng(args.seed)
    if args.point is None:
        x = ch.sample_point(rng)
    else:
        x = _parse_point(args.point, n)
    ch.validate_point(x)
    mj = metric_jet(ch, x)
    ms = bnd.exterior_module(n)
    if args.config:
        raw = bnd.load_superconnection_config(args.config)
        S = bnd.superconnection_from_config(raw, n, ms)
    else:
        S = bnd.superconnection_from_degrees(n, ms.m, ms.eta, {1: "zero"})
    D = bnd.quantize_superconnection(S, mj, ms, x)
    worst = 0.0
    for _ in range(5):
        f = random_poly_scalar(rng, n, 2, complex_coeffs=True)
        fj = f.eval_jet(x, 2)
        j = bnd.random_poly_section(rng, n, ms.m).eval(x, 2)
        jf = j.scale_jet(fj)
        lhs = bnd.apply_dirac(D, jf) - fj.val * bnd.apply_dirac(D, j)
        rhs = np.zeros(ms.m, dtype=complex)
        for a in range(n):
            rhs += fj.d[a] * (D.gam[a].val @ j.v)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    payload = {
        "chart": args.chart,
        "point": [float(v) for v in x],
        "fiber_dimension": ms.m,
        "gammas": [_matrix_list(g.val) for g in D.gam],
        "zero_order": _matrix_list(D.Z.val),
        "commutator_residual": worst,
    }
    if args.human:
        lines = [f"chart {args.chart}, fiber rank {ms.m}, point "
                 + ", ".join(f"{v:.6g}" for v in x),
                 f"zero-order part max entry: "
                 f"{float(np.max(np.abs(D.Z.val))):.6g}",
                 f"[D, f] = c(df) residual: {worst:.3e}"]
        sys.stdout.write("\n".join(lines) + "\n")
    else:
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_sw(args) -> int:
    if args.config:
        cfg = swm.load_sw_config(args.config)
    else:
        cfg = swm.random_sw_config(np.random.default_rng(args.seed))
    rng = np.random.default_rng(args.seed)
    if args.point is None:
        x = rng.uniform(0.0, 2.0 * np.pi, 4)
    else:
        x = _parse_point(args.point, 4)
    res = swm.sw_residuals(cfg, x)
    out = swm.sw_functional(cfg)
    payload = {
        "grid": cfg.grid,
        "band": cfg.band,
        "chirality_block": cfg.block,
        "point": [float(v) for v in x],
        "dirac_residual": res["dirac"],
        "curvature_residual": res["curvature"],
        "quadratic_identity_residual": res["quadratic_identity"],
        "functional": out,
    }
    if args.human:
        lines = [f"monopole config: grid {cfg.grid}, band {cfg.band}, "
                 f"block {cfg.block}",
                 f"equation residuals at the sample point: "
                 f"dirac {res['dirac']:.3e}, curvature {res['curvature']:.3e}",
                 f"functional: equations form {out['w_equations']:.9g}, "
                 f"weitzenbock form {out['w_weitzenbock']:.9g}",
                 f"gap {out['gap']:.3e} (relative {out['relative_gap']:.3e})"]
        sys.stdout.write("\n".join(lines) + "\n")
    else:
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="diracgeo",
        description="verification harness for charts, Clifford modules, "
                    "generalized Dirac operators, and monopole configurations")
    sub = ap.add_subparsers(dest="command", required=True)

    common = {"--seed": dict(type=int, default=1, help="rng seed (default 1)"),
              "--human": dict(action="store_true",
                              help="table output instead of JSON")}

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", default="all", choices=SUITE_NAMES)
    v.add_argument("--chart", default="sphere2", choices=sorted(registry()))
    v.add_argument("--samples", type=int, default=20,
                   help="points per check (default 20)")
    v.add_argument("--config", default=None,
                   help="monopole config JSON (required for the sw suite)")
    v.add_argument("--timings", action="store_true",
                   help="include wall times (breaks byte stability)")
    for flag, kw in common.items():
        v.add_argument(flag, **kw)
    v.set_defaults(fn=cmd_verify)

    c = sub.add_parser("curvature", help="print curvature data at a point")
    c.add_argument("--chart", required=True, choices=sorted(registry()))
    c.add_argument("--point", default=None,
                   help="comma separated coordinates (default: sampled)")
    for flag, kw in common.items():
        c.add_argument(flag, **kw)
    c.set_defaults(fn=cmd_curvature)

    d = sub.add_parser("dirac", help="print quantized operator data at a point")
    d.add_argument("--chart", required=True, choices=sorted(registry()))
    d.add_argument("--point", default=None)
    d.add_argument("--config", default=None,
                   help="superconnection coefficient config JSON")
    for flag, kw in common.items():
        d.add_argument(flag, **kw)
    d.set_defaults(fn=cmd_dirac)

    s = sub.add_parser("sw", help="monopole residuals and both functional forms")
    s.add_argument("--config", default=None,
                   help="monopole config JSON (default: random from seed)")
    s.add_argument("--point", default=None)
    for flag, kw in common.items():
        s.add_argument(flag, **kw)
    s.set_defaults(fn=cmd_sw)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return USAGE_EXIT if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (SuiteUsageError, ChartDomainError, SpinSignatureError,
            swm.SWConfigError, FileNotFoundError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return USAGE_EXIT
    except (ValueError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
