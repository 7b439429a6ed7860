"""Command-line entry point.

Subcommands:
  run          one experiment (case, degree, resolution, limiter, ...)
  convergence  refinement study with error rates
  verify-ops   operator verification report for one (N, family)

Flags can also come from a plain-text config file of ``key = value`` lines
(--config); explicit command-line flags take precedence.
"""

import argparse
import os
import sys


def _set_threads(n):
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ[var] = str(n)


def parse_config_file(path):
    values = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {line!r}")
            key, val = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = val
    return values


def _add_common(p):
    p.add_argument("--case", required=False)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--K", type=int, default=None, help="1D element count")
    p.add_argument("--grid", default=None, help="2D grid as nx,ny")
    p.add_argument("--limiter", default=None,
                   choices=["nodewise", "elementwise", "low", "high"])
    p.add_argument("--cfl", type=float, default=None)
    p.add_argument("--family", default=None, choices=["gl", "glo"])
    p.add_argument("--alpha", default=None,
                   help="graph radius scale, or 'auto'")
    p.add_argument("--p", type=float, default=None, dest="p_exp")
    p.add_argument("--T", type=float, default=None)
    p.add_argument("--g", type=float, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--snapshots", default=None, help="comma-separated times")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--config", default=None, help="key = value config file")


def _merged(args):
    merged = {}
    if args.config:
        merged.update(parse_config_file(args.config))
    for key, val in vars(args).items():
        if val is not None and key not in ("config", "command", "levels"):
            merged[key] = val
    return merged


def _build_config(merged):
    from .runner import SimulationConfig

    case = merged.get("case")
    if not case:
        raise SystemExit("a --case is required")
    resolution = ()
    if merged.get("K") is not None:
        resolution = (int(merged["K"]),)
    if merged.get("grid"):
        parts = str(merged["grid"]).replace(",", " ").split()
        resolution = tuple(int(v) for v in parts)
    alpha = merged.get("alpha", 1.0)
    if alpha != "auto":
        alpha = float(alpha)
    family = {"gl": "gauss_legendre_edge", "glo": "gauss_lobatto_edge"}.get(
        merged.get("family", "gl"), merged.get("family"))
    snaps = ()
    if merged.get("snapshots"):
        snaps = tuple(float(v) for v in str(merged["snapshots"]).split(","))
    return SimulationConfig(
        case=case,
        N=int(merged.get("N", 3)),
        resolution=resolution,
        limiter=merged.get("limiter", "nodewise"),
        cfl=float(merged.get("cfl", 0.125)),
        family=family,
        alpha=alpha,
        p=float(merged.get("p_exp", merged.get("p", 0.25))),
        t_end=float(merged["T"]) if merged.get("T") is not None else None,
        g=float(merged["g"]) if merged.get("g") is not None else None,
        out_dir=merged.get("out"),
        snapshots=snaps,
        threads=int(merged.get("threads", 1)))


def cmd_run(args):
    from .limiter import PositivityError
    from .runner import run_simulation

    merged = _merged(args)
    config = _build_config(merged)
    _set_threads(config.threads)
    try:
        out = run_simulation(config)
    except PositivityError as exc:
        print(f"ABORT: {exc}", file=sys.stderr)
        return 2
    s = out.summary
    print(f"case {s['case']}: {s['steps']} steps to t={s['t_end']}, "
          f"wall {s['wall_seconds']:.2f}s")
    print(f"  min h over run: {min(s['min_h_history']):.3e}, "
          f"final mass {s['mass_history'][-1]:.12e}")
    if "l2_errors" in s:
        errs = ", ".join(f"{k}={v:.6e}" for k, v in s["l2_errors"].items())
        print(f"  L2 errors: {errs}")
    if config.out_dir:
        print(f"  outputs in {config.out_dir}")
    return 0


def cmd_convergence(args):
    from .runner import run_convergence_study

    merged = _merged(args)
    config = _build_config(merged)
    _set_threads(config.threads)
    levels = [int(v) for v in args.levels.split(",")]
    from .cases import get_case
    case = get_case(config.case)
    if case.dim == 1:
        resolutions = [(k,) for k in levels]
    else:
        ratio = case.default_resolution[1] / case.default_resolution[0]
        resolutions = [(k, max(1, round(k * ratio))) for k in levels]
    report = run_convergence_study(config, resolutions)
    comps = list(report.errors[0].keys())
    print("resolution  h_mesh      " + "  ".join(f"{c:>12s}" for c in comps))
    for res, hm, errs in zip(report.resolutions, report.mesh_sizes, report.errors):
        print(f"{str(res):>10s}  {hm:.4e}  "
              + "  ".join(f"{errs[c]:12.4e}" for c in comps))
    for c in comps:
        rates = ", ".join(f"{r:.2f}" for r in report.rates[c])
        print(f"rates[{c}]: {rates}")
    return 0


def cmd_verify_ops(args):
    from . import loworder, refelem

    merged = _merged(args)
    N = int(merged.get("N", 3))
    family = {"gl": "gauss_legendre_edge", "glo": "gauss_lobatto_edge"}.get(
        merged.get("family", "gl"), merged.get("family"))
    ok = True
    if N <= 7:
        ops1 = refelem.build_lobatto_sbp_1d(N)
        rep = refelem.verify_sbp(ops1)
        print(rep.summary())
        ok &= rep.passed
    if 1 <= N <= 4:
        rule = refelem.load_triangle_sbp_nodes(N, family)
        ops2 = refelem.build_triangle_sbp_operators(rule)
        rep = refelem.verify_sbp(ops2)
        print(rep.summary())
        ok &= rep.passed
        print(loworder.operator_report(rule))
    return 0 if ok else 1


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="swedg",
        description="Entropy-stable positivity-preserving shallow water DG solver")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment")
    _add_common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_conv = sub.add_parser("convergence", help="refinement study")
    _add_common(p_conv)
    p_conv.add_argument("--levels", required=True,
                        help="comma-separated resolutions (K or nx)")
    p_conv.set_defaults(func=cmd_convergence)

    p_ops = sub.add_parser("verify-ops", help="operator verification")
    _add_common(p_ops)
    p_ops.set_defaults(func=cmd_verify_ops)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
