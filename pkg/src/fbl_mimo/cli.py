"""``fbl-mimo`` command line.

Exit codes: 0 ok, 1 identity validation failed, 2 usage or invalid
parameter, 3 numerical failure, 4 simulation failure.

Every file written with ``--out PATH`` is accompanied by
``PATH.manifest.json`` (command, parameters, seed, version, duration).
Data files themselves hold no timing information, so re-running with the
same flags reproduces them byte for byte.
"""

import argparse
import csv
import json
import math
import sys
import time

import numpy as np

from . import __version__, figures
from .errors import (
    ConsistencyError,
    ConvergenceError,
    DecompositionError,
    DomainError,
    SimulationError,
)
from .finite_blocklength import finite_upper
from .identities import run_identities
from .mc_lab import (
    INPUT_LAWS,
    TrialConfig,
    clt_diagnostics,
    empirical_feinstein,
    run_trials,
)
from .second_order import SystemGeometry, compute_stats, snr_db_to_sigma2

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_NUMERIC, EXIT_SIMULATION = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not serializable: {type(o).__name__}")


def _dump(obj, fh=None, sort_keys=False):
    text = json.dumps(obj, indent=2, default=_json_default, sort_keys=sort_keys) + "\n"
    if fh is None:
        return text
    fh.write(text)


def write_csv(path, columns, rows):
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row[k]) for k in columns])


def manifest(command, params, seed, started):
    return dict(
        command=command,
        parameters=params,
        seed=seed,
        version=__version__,
        duration_s=time.perf_counter() - started,
    )


def _write_manifest(path, man):
    with open(f"{path}.manifest.json", "w", encoding="ascii") as fh:
        _dump(man, fh)


def _params(args):
    return {k: v for k, v in vars(args).items() if k not in ("func", "command")}


def cmd_bounds(args):
    t0 = time.perf_counter()
    rec = figures.bounds_record(args.snr_db, args.c, args.beta, args.r)
    rec["manifest"] = manifest("bounds", _params(args), None, t0)
    _dump(rec, sys.stdout)
    return EXIT_OK


def _grid(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise DomainError(f"cannot parse grid {text!r}") from None


def cmd_sweep(args):
    t0 = time.perf_counter()
    if args.figure is not None:
        columns, rows = figures.figure_rows(args.figure)
    else:
        if args.kind is None or args.grid is None:
            raise DomainError("custom sweeps need --kind and --grid (or use --figure)")
        grid = _grid(args.grid)
        if args.kind == "outage":
            columns, rows = figures.outage_rows(args.snr_db, args.r, [args.c], grid)
        elif args.kind == "snr":
            columns, rows = figures.snr_rows(args.k, args.nn, args.rate, [args.n], grid)
        else:
            columns, rows = figures.blocklength_rows(args.k, args.nn, args.rate, args.snr_db, grid)
    write_csv(args.out, columns, rows)
    _write_manifest(args.out, manifest("sweep", _params(args), None, t0))
    failed = sum(r["error"] is not None for r in rows)
    print(f"wrote {len(rows)} rows to {args.out} ({failed} out of regime)")
    return EXIT_NUMERIC if rows and failed == len(rows) else EXIT_OK


def simulate_summary(samples, rate):
    cfg = samples.config
    g = cfg.geom
    stats = compute_stats(cfg.sigma2, g.c, g.beta)
    mode = "gaussian_input" if cfg.input_law == "gaussian" else "constrained_input"
    diag = clt_diagnostics(samples, stats, mode=mode)
    d_opt, value = empirical_feinstein(samples, rate)
    try:
        t2, t2_err = finite_upper(rate, g, cfg.sigma2).total, None
    except DomainError as exc:
        t2, t2_err = None, str(exc)
    return dict(
        mean=diag.mean,
        std=diag.std,
        ks=diag.standardized_ks,
        theoretical_C=stats.capacity,
        theoretical_theta=diag.reference_scale,
        empirical_feinstein=value,
        empirical_feinstein_delta=d_opt,
        theorem2_bound=t2,
        theorem2_error=t2_err,
        mean_I=float(np.mean(samples.values)),
        std_I=float(np.std(samples.values)),
    )


def cmd_simulate(args):
    t0 = time.perf_counter()
    cfg = TrialConfig(
        geom=SystemGeometry(N=args.nn, K=args.k, n=args.n),
        sigma2=snr_db_to_sigma2(args.snr_db),
        input_law=args.input,
        trials=args.trials,
        seed=args.seed,
    )
    samples = run_trials(cfg, workers=args.workers)
    samples.to_csv(args.out)
    summary = simulate_summary(samples, args.rate)
    with open(f"{args.out}.summary.json", "w", encoding="ascii") as fh:
        _dump(summary, fh)
    _write_manifest(args.out, manifest("simulate", _params(args), args.seed, t0))
    _dump(summary, sys.stdout)
    return EXIT_OK


def cmd_validate(args):
    delta0_fn = None
    if args.inject_delta0_fault:
        from .mp_core import delta0

        eps = args.inject_delta0_fault
        delta0_fn = lambda x, c: delta0(x, c) + eps  # noqa: E731
    results = run_identities(delta0_fn)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        note = f"  ({r.error})" if r.error else ""
        print(f"{status}  {r.name:<36s} worst={r.worst:.3e}  tol={r.tol:.0e}{note}")
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} identities passed")
    return EXIT_VALIDATION if failed else EXIT_OK


def build_parser():
    p = _Parser(prog="fbl-mimo", description="Second-order and finite-blocklength bounds for MIMO Rayleigh block fading.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bounds", help="capacity, dispersion terms and error bounds at one point")
    b.add_argument("--snr-db", type=float, required=True)
    b.add_argument("--c", type=float, required=True, help="antenna ratio N/K")
    b.add_argument("--beta", type=float, required=True, help="n/K")
    b.add_argument("--r", type=float, required=True, help="second-order rate (sqrt(nK) scaling)")
    b.set_defaults(func=cmd_bounds)

    s = sub.add_parser("sweep", help="figure presets or a custom grid, written as CSV")
    s.add_argument("--figure", type=int, choices=(3, 4, 5))
    s.add_argument("--kind", choices=("outage", "snr", "blocklength"))
    s.add_argument("--grid", help="comma separated, strictly increasing: beta, SNR in dB or n/K")
    s.add_argument("--snr-db", type=float, default=10.0)
    s.add_argument("--c", type=float, default=1.0)
    s.add_argument("--r", type=float, default=-1.0, help="outage rate (K scaling)")
    s.add_argument("--nn", type=int, default=16, help="receive antennas N")
    s.add_argument("--k", type=int, default=8, help="transmit antennas K")
    s.add_argument("--n", type=int, default=36, help="block length for --kind snr")
    s.add_argument("--rate", type=float, default=math.log(2.0), help="nats per channel use per antenna")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sweep)

    m = sub.add_parser("simulate", help="Monte Carlo information density campaign")
    m.add_argument("--nn", type=int, required=True, help="receive antennas N")
    m.add_argument("--k", type=int, required=True, help="transmit antennas K")
    m.add_argument("--n", type=int, required=True, help="block length")
    m.add_argument("--snr-db", type=float, required=True)
    m.add_argument("--trials", type=int, required=True)
    m.add_argument("--seed", type=int, required=True)
    m.add_argument("--input", choices=INPUT_LAWS, default="gaussian")
    m.add_argument("--rate", type=float, default=math.log(2.0))
    m.add_argument("--workers", type=int, default=None, help="default: FBL_MIMO_THREADS or all CPUs")
    m.add_argument("--out", required=True)
    m.set_defaults(func=cmd_simulate)

    v = sub.add_parser("validate", help="run the analytic identity suite")
    v.add_argument("--inject-delta0-fault", type=float, default=0.0, help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SimulationError, DecompositionError) as exc:
        print(f"simulation failed: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    except DomainError as exc:
        print(f"invalid parameter: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, ConsistencyError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
