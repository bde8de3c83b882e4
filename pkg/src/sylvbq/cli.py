"""Command-line front end: ``sylvbq {run,sweep,compare,probe,diagnose,residual}``."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, replace

from .diagnostics import discriminant_diagnostics, stability_probe
from .exceptions import BlowUpError, ConfigError, SolverError
from .harness import (TABLE_LADDER, build_setup, compare_baseline, load_config, observed_order,
                      parse_ladder, run_case, sweep)
from .io import write_field
from .problems import get_case, residual_check

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_BLOWUP, EXIT_GATE = 0, 2, 3, 4, 5
ENVELOPE = 3.0


def _common(p):
    p.add_argument("--config", help="key = value config file; explicit flags override it")
    p.add_argument("--case")
    p.add_argument("--J", type=str)
    p.add_argument("--l", type=str, help="time step, e.g. 0.01 or 1/400")
    p.add_argument("--alpha", type=str)
    p.add_argument("--q", type=str)
    p.add_argument("--t0", type=str)
    p.add_argument("--T", type=str)
    p.add_argument("--steps", type=str)
    p.add_argument("--init-mode", dest="init_mode", choices=("exact", "taylor"))
    p.add_argument("--solver", choices=("auto", "fixed_point", "schur", "kron_direct"))
    p.add_argument("--source", choices=("printed", "manufactured", "none"))
    p.add_argument("--tol", type=str)
    p.add_argument("--max-iters", dest="max_iters", type=str)
    p.add_argument("--dense-cap", dest="dense_cap", type=str)
    p.add_argument("--epsilon", type=str)
    p.add_argument("--eta", type=str)
    p.add_argument("--norm-phi", dest="norm_phi", type=str)
    p.add_argument("--check", action="store_true", help="exit 5 when the command's acceptance gate fails")


_KEYS = ("case", "J", "l", "alpha", "q", "t0", "T", "steps", "init_mode", "solver", "source",
         "tol", "max_iters", "dense_cap", "epsilon", "eta", "norm_phi")


def build_parser():
    parser = argparse.ArgumentParser(prog="sylvbq", description="Lyapunov-Sylvester Boussinesq solver harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="one run with error metrics")
    _common(p)
    p.add_argument("--dump", help="write the final field snapshot here")

    p = sub.add_parser("sweep", help="ladder of (J, l) runs as CSV")
    _common(p)
    p.add_argument("--ladder", help="'J:l,J:l,...'; defaults to the table ladder")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="CSV path (default stdout)")

    p = sub.add_parser("compare", help="time Lyapunov vs flattened paths")
    _common(p)
    p.add_argument("--no-dense", action="store_true")
    p.add_argument("--min-speedup", type=float, default=10.0)

    p = sub.add_parser("probe", help="small-data stability probe")
    _common(p)

    p = sub.add_parser("diagnose", help="first-step discriminants")
    _common(p)

    p = sub.add_parser("residual", help="PDE residual of the exact (u, g) pair")
    _common(p)
    p.add_argument("--t", type=float, default=0.5)
    p.add_argument("--levels", type=int, default=3)
    return parser


def _emit(obj):
    print(json.dumps(obj, indent=2, default=str))


def _reference(case, J, l):
    for rJ, rl, er, rel in case.reference:
        if rJ == J and abs(rl - l) <= 1e-12:
            return er, rel
    return None


def _within(value, ref):
    return value is not None and ref / ENVELOPE <= value <= ref * ENVELOPE


def cmd_run(cfg, args):
    res = run_case(cfg)
    rep = res.report
    ref = _reference(get_case(cfg.case), cfg.J, cfg.l)
    out = {"case": cfg.case, "J": cfg.J, "l": cfg.l, "steps": res.setup.grid.N_steps, "Er": rep.Er, "RelEr": rep.RelEr,
           "argmax": rep.argmax, "iters": res.iterations_total, "methods": dict(res.methods),
           "runtime_ms": res.runtime_ms, "reference_Er": ref[0] if ref else None}
    if args.dump and res.final is not None:
        write_field(args.dump, res.final.U_curr, res.setup.grid.time(res.final.n))
    _emit(out)
    if args.check and ref is not None and not _within(rep.Er, ref[0]):
        return EXIT_GATE
    return EXIT_OK


def cmd_sweep(cfg, args):
    ladder = parse_ladder(args.ladder) if args.ladder else list(TABLE_LADDER)
    result = sweep(cfg.case, ladder, cfg, workers=args.workers)
    text = result.to_csv()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.check:
        case = get_case(cfg.case)
        ers = [r.Er for r in result.rows]
        ok = all(r.ok for r in result.rows) and all(a > b for a, b in zip(ers, ers[1:]))
        for r in result.rows:
            ref = _reference(case, r.J, r.l)
            ok = ok and (ref is None or _within(r.Er, ref[0]))
        return EXIT_OK if ok else EXIT_GATE
    return EXIT_OK


def cmd_compare(cfg, args):
    steps = cfg.steps if cfg.steps is not None else build_setup(cfg).grid.N_steps
    rec = compare_baseline(cfg.case, cfg.J, cfg.l, steps, cfg, dense=not args.no_dense)
    _emit(asdict(rec))
    if args.check:
        fast = rec.speedups.get("dense/lyapunov", rec.speedups.get("banded/lyapunov"))
        if fast < args.min_speedup or max(rec.divergence.values()) > 1e-8:
            return EXIT_GATE
    return EXIT_OK


def cmd_probe(cfg, args):
    steps = cfg.steps if cfg.steps is not None else 200
    rec = stability_probe(cfg.eta, steps, cfg.J, cfg.l, cfg.epsilon, cfg.params,
                          replace(cfg.run_config, init_mode="taylor"))
    out = asdict(rec)
    out.pop("norms")
    _emit(out)
    return EXIT_GATE if args.check and not rec.bounded else EXIT_OK


def cmd_diagnose(cfg, args):
    L0, L1 = get_case(cfg.case).domain
    d = discriminant_diagnostics(cfg.l, (L1 - L0) / cfg.J, cfg.norm_phi, cfg.epsilon, alpha=cfg.alpha, q=cfg.q)
    _emit({**asdict(d), "eta0": d.eta0, "Delta1_limit": d.Delta1_limit})
    return EXIT_GATE if args.check and not (d.Delta1 > 0 and d.eta1 and d.eta1 > 0) else EXIT_OK


def cmd_residual(cfg, args):
    case = get_case(cfg.case)
    L0, L1 = case.domain
    h, l = (L1 - L0) / cfg.J, cfg.l
    rows = []
    for k in range(max(args.levels, 1)):
        f = 2.0 ** -k
        rows.append({"h": h * f, "l": l * f, "residual": residual_check(case, h * f, l * f, args.t, cfg.q, cfg.source)})
    for a, b in zip(rows, rows[1:]):
        b["order"] = observed_order(a["residual"], b["residual"], a["h"], b["h"])
    _emit({"case": cfg.case, "source": cfg.source, "q": cfg.q, "t": args.t, "levels": rows})
    if args.check:
        last = rows[-1].get("order")
        return EXIT_OK if last is not None and last >= 1.5 else EXIT_GATE
    return EXIT_OK


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "compare": cmd_compare, "probe": cmd_probe,
            "diagnose": cmd_diagnose, "residual": cmd_residual}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, **{k: getattr(args, k) for k in _KEYS})
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BlowUpError as exc:
        print(f"blow-up: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
