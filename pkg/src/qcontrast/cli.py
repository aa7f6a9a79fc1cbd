"""Command-line front end: sweeps, synthetic experiments and certification.

Every command writes figure-ready CSV or JSON, to stdout or to ``--out``.
Options can also come from an INI file (``--config``) with one section per
command; explicit flags take precedence. Exit status is 0 on success, 2 on
validation failures (bad input files, Monte Carlo disagreement) and 1 on
internal errors.
"""

import argparse
import configparser
import csv
import hashlib
import io
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .certify import (
    certify_record,
    fidelity_bound_two_mub,
    k_max_all_mub,
    k_max_two_mub,
    optimal_operating_point,
    required_contrast_all_mub,
    required_contrast_two_mub,
    steering_functional,
    steering_test_from_data,
    steering_threshold,
)
from .coincidence import monte_carlo_coincidence, monte_carlo_z_scores, synthesize_record
from .exceptions import NoFiniteOptimumError, QContrastError, UndefinedContrastError
from .io import read_record, write_record_json
from .mubs import mub_set, two_mubs
from .noise_model import NoiseParams, optimal_pair_rate, quantum_contrast
from .states import flat_spectrum, gaussian_spectrum

logger = logging.getLogger("qcontrast")

EXIT_OK, EXIT_INTERNAL, EXIT_VALIDATION = 0, 1, 2

TABLE1_ROWS = ((3, 71.0), (5, 70.0), (7, 68.0), (11, 81.0))


# --- grid parsing -------------------------------------------------------------

def parse_grid(text):
    """Parse ``"a,b,c"``, ``"lin:start:stop:num"`` or ``"log:start:stop:num"``.

    Ranges must be non-empty and monotone.
    """
    text = str(text).strip()
    if text.startswith(("lin:", "log:")):
        kind, start, stop, num = text.split(":")
        start, stop, num = float(start), float(stop), int(num)
        if num < 1:
            raise argparse.ArgumentTypeError(f"grid {text!r} is empty")
        if kind == "log":
            if start <= 0 or stop <= 0:
                raise argparse.ArgumentTypeError(f"log grid {text!r} needs positive bounds")
            values = np.geomspace(start, stop, num)
        else:
            values = np.linspace(start, stop, num)
        values = [float(v) for v in values]
    else:
        try:
            values = [float(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"cannot parse grid {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError(f"grid {text!r} is empty")
    diffs = np.diff(values)
    if len(values) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise argparse.ArgumentTypeError(f"grid {text!r} is not monotone")
    return values


def parse_int_grid(text):
    values = parse_grid(text)
    if any(not float(v).is_integer() for v in values):
        raise argparse.ArgumentTypeError(f"grid {text!r} must contain integers")
    return [int(v) for v in values]


def _int_range(text):
    """Integer grids also accept ``"start..stop"``."""
    if ".." in str(text):
        lo, hi = str(text).split("..")
        return list(range(int(lo), int(hi) + 1))
    return parse_int_grid(text)


# --- command bodies (return rows; no I/O) ---------------------------------------

def contrast_surface_rows(mu_grid, ratio_grid):
    rows = []
    for r in ratio_grid:
        qs = []
        for mu in mu_grid:
            try:
                qs.append(quantum_contrast(mu, r, 1.0))
            except UndefinedContrastError:
                qs.append(math.nan)
        best = int(np.nanargmax(qs)) if not all(math.isnan(q) for q in qs) else -1
        try:
            mu_opt = optimal_pair_rate(r, 1.0)
        except (NoFiniteOptimumError, ValueError):
            mu_opt = math.inf if r > 0 else math.nan
        for i, (mu, q) in enumerate(zip(mu_grid, qs)):
            rows.append({"mu": mu, "n_over_eta": r, "Q": q, "row_optimum": int(i == best),
                         "mu_opt_analytic": mu_opt})
    return rows


def required_contrast_rows(k_values, d_values, include_diagonal=True):
    rows = []
    marks = {k: optimal_operating_point(k).d_opt for k in k_values if k >= 2}
    for k in k_values:
        for d in d_values:
            if d < k or d < 2:
                continue
            rows.append({"curve": f"k={k}", "k": k, "d": d,
                         "q_two_mub": required_contrast_two_mub(k, d) if k >= 2 else math.nan,
                         "q_all_mub": required_contrast_all_mub(k, d),
                         "d_opt": int(marks.get(k) == d)})
    if include_diagonal:
        for d in d_values:
            if d < 2:
                continue
            rows.append({"curve": "k=d", "k": d, "d": d,
                         "q_two_mub": required_contrast_two_mub(d, d),
                         "q_all_mub": required_contrast_all_mub(d, d), "d_opt": 0})
    return rows


def table1_rows(rows=TABLE1_ROWS):
    """Predictions from the measured contrast; the optimum is for k = d."""
    out = []
    for d, q in rows:
        f_pred = fidelity_bound_two_mub(q, d)
        opt = optimal_operating_point(d)
        out.append({"d": d, "Q_exp": q, "F_pred": f_pred, "F_pred_percent": f"{100 * f_pred:.1f}",
                    "k_pred": k_max_two_mub(q, d), "d_opt": opt.d_opt, "Q_opt": opt.q_opt,
                    "Q_opt_printed": f"{opt.q_opt:.1f}"})
    return out


def format_table1(rows):
    lines = [f"{'d':>3} {'Q_exp':>6} {'F_pred':>7} {'k_pred':>6} {'d_opt':>5} {'Q_opt':>6}"]
    for r in rows:
        lines.append(f"{r['d']:>3} {r['Q_exp']:>6.0f} {r['F_pred_percent']:>6}% "
                     f"{r['k_pred']:>6} {r['d_opt']:>5} {r['Q_opt_printed']:>6}")
    return "\n".join(lines) + "\n"


def _point_seed(seed, index, count):
    if seed is None:
        return None
    child = np.random.SeedSequence(seed).spawn(count)[index]
    return int(child.generate_state(1, dtype=np.uint64)[0])


def simulate_point(d, sigma, target_q, physical, total_events, seed):
    """One synthetic experiment: returns (record, report)."""
    spectrum = flat_spectrum(d) if sigma is None else gaussian_spectrum(d, sigma)
    params = NoiseParams(*physical) if physical is not None else None
    record = synthesize_record(spectrum, mub_set(d), params=params, target_q=target_q,
                               total_events=total_events, seed=seed)
    return record, certify_record(record)


def _simulate_job(args):
    return simulate_point(*args)


def _map(fn, jobs, workers):
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(job) for job in jobs]


def simulate_runs(d_values, target_qs, sigma=None, physical=None, total_events=None,
                  seed=None, workers=1):
    """Grid of synthetic experiments in deterministic (d, target_q) order."""
    points = [(d, q) for d in d_values for q in (target_qs or [None])]
    jobs = [(d, sigma, q, physical, total_events, _point_seed(seed, i, len(points)))
            for i, (d, q) in enumerate(points)]
    results = _map(_simulate_job, jobs, workers)
    rows = []
    for (d, q), (record, report) in zip(points, results):
        rows.append({"d": d, "sigma": sigma, "target_q": q, "average_q": report.average_q,
                     "fidelity_lower_bound": report.fidelity_lower_bound,
                     "fidelity_exact": report.fidelity_exact,
                     "certified_k_all_mub": report.certified_k_all_mub,
                     "certified_k_two_mub": report.certified_k_two_mub,
                     "k_all_mub_analytic": k_max_all_mub(report.average_q, d),
                     "seed": record.seed})
    return rows, results


def _mc_job(args):
    params, trials, seed, detector = args
    return monte_carlo_coincidence(params, trials, seed=seed, detector=detector)


def validate_mc_rows(grid, trials, seed=None, detector="threshold", sigma_limit=5.0,
                     formula=None, workers=1):
    """Compare Monte Carlo coincidence rates with the analytic ones on ``grid``.

    ``grid`` is a sequence of ``(mu, n, eta)``; ``formula`` overrides the
    analytic rates (used to check that disagreement is detected).
    """
    params = [NoiseParams(*p) for p in grid]
    jobs = [(p, trials, _point_seed(seed, i, len(params)), detector)
            for i, p in enumerate(params)]
    results = _map(_mc_job, jobs, workers)
    rows = []
    for p, res in zip(params, results):
        z_same, z_cross, z_ratio = monte_carlo_z_scores(res, p, formula)
        zs = [z for z in (z_same, z_cross, z_ratio) if not math.isnan(z)]
        rows.append({"mu": p.mu, "n": p.n, "eta": p.eta, "trials": res.trials,
                     "p_same": res.p_same, "p_cross": res.p_cross,
                     "se_same": res.se_same, "se_cross": res.se_cross,
                     "ratio": res.ratio, "Q_analytic": quantum_contrast(p) if p.mu or p.n else math.nan,
                     "z_same": z_same, "z_cross": z_cross, "z_ratio": z_ratio,
                     "flag": int(any(abs(z) > sigma_limit for z in zs))})
    return rows


def steering_scan_rows(d_values, q_values, total_events=None, seed=None):
    rows = []
    n_points = len(d_values) * len(q_values)
    i = 0
    for d in d_values:
        q_star = steering_threshold(d)
        for q in q_values:
            value = steering_functional(q, d)
            row = {"d": d, "q": q, "functional": value, "violated": int(value < 0),
                   "q_star": q_star}
            if total_events is not None:
                record = synthesize_record(flat_spectrum(d), two_mubs(d), target_q=q,
                                           total_events=total_events,
                                           seed=_point_seed(seed, i, n_points))
                verdict = steering_test_from_data(record.matrix_for(0), record.matrix_for(1), d)
                row.update(data_margin=verdict.margin, data_violated=int(verdict.violated))
            rows.append(row)
            i += 1
    return rows


# --- output ---------------------------------------------------------------------

def config_hash(config):
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def render_rows(rows, fmt, command, config):
    digest = config_hash(config)
    if fmt == "json":
        payload = {"command": command, "version": __version__, "config": config,
                   "config_hash": digest, "rows": rows}
        return json.dumps(_jsonable(payload), indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# command={command} config_hash={digest}\n")
    if rows:
        fields = list(rows[0])
        for r in rows[1:]:
            fields += [k for k in r if k not in fields]
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


def _emit(text, out, filename):
    if out is None:
        sys.stdout.write(text)
        return
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    (out / filename).write_text(text)


# --- argument handling ---------------------------------------------------------------

def _config_dict(args):
    skip = {"func", "config", "out", "workers", "verbose"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _run_contrast_surface(args):
    rows = contrast_surface_rows(args.mu, args.noise_ratio)
    _emit(render_rows(rows, args.format, "contrast-surface", _config_dict(args)), args.out,
          f"contrast_surface.{args.format}")
    return EXIT_OK


def _run_required_contrast(args):
    rows = required_contrast_rows(args.k, args.d, include_diagonal=not args.no_diagonal)
    _emit(render_rows(rows, args.format, "required-contrast", _config_dict(args)), args.out,
          f"required_contrast.{args.format}")
    return EXIT_OK


def _run_table1(args):
    rows = table1_rows()
    if args.out is not None:
        _emit(format_table1(rows), args.out, "table1.txt")
        _emit(render_rows(rows, "json", "table1", _config_dict(args)), args.out, "table1.json")
    elif args.format == "json":
        sys.stdout.write(render_rows(rows, "json", "table1", _config_dict(args)))
    else:
        sys.stdout.write(format_table1(rows))
    return EXIT_OK


def _run_simulate(args):
    physical = None
    if any(v is not None for v in (args.mu, args.n, args.eta)):
        if None in (args.mu, args.n, args.eta) or args.target_q:
            raise QContrastError("give --target-q or all of --mu, --n, --eta")
        physical = (args.mu, args.n, args.eta)
    rows, results = simulate_runs(args.d, args.target_q, sigma=args.sigma, physical=physical,
                                  total_events=args.total_events, seed=args.seed,
                                  workers=args.workers)
    config = _config_dict(args)
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for i, (record, report) in enumerate(results):
            write_record_json(record, out / f"record_{i:03d}.json")
            (out / f"report_{i:03d}.json").write_text(
                json.dumps(_jsonable(report.to_dict()), indent=2) + "\n")
    _emit(render_rows(rows, args.format, "simulate", config), args.out,
          f"simulate.{args.format}")
    return EXIT_OK


def _run_certify(args):
    record = read_record(args.files)
    report = certify_record(record)
    payload = _jsonable(report.to_dict())
    if args.format == "json":
        text = json.dumps(payload, indent=2) + "\n"
    else:
        text = render_rows([{k: v for k, v in payload.items()
                             if not isinstance(v, (dict, list))}],
                           "csv", "certify", _config_dict(args))
    _emit(text, args.out, f"report.{args.format}")
    return EXIT_OK


def _run_validate_mc(args):
    if args.pairing == "zip":
        if len(args.mu) != len(args.n):
            raise QContrastError("--pairing zip needs --mu and --n grids of equal length")
        pairs = list(zip(args.mu, args.n))
    else:
        pairs = [(m, n) for m in args.mu for n in args.n]
    grid = [(m, n, e) for m, n in pairs for e in args.eta]
    rows = validate_mc_rows(grid, args.trials, seed=args.seed, detector=args.detector,
                            sigma_limit=args.sigma_limit, workers=args.workers)
    _emit(render_rows(rows, args.format, "validate-mc", _config_dict(args)), args.out,
          f"validate_mc.{args.format}")
    flagged = sum(r["flag"] for r in rows)
    if flagged:
        logger.error("%d of %d grid points disagree beyond %.1f standard errors",
                     flagged, len(rows), args.sigma_limit)
        return EXIT_VALIDATION
    return EXIT_OK


def _run_steering_scan(args):
    rows = steering_scan_rows(args.d, args.q, total_events=args.total_events, seed=args.seed)
    _emit(render_rows(rows, args.format, "steering-scan", _config_dict(args)), args.out,
          f"steering_scan.{args.format}")
    return EXIT_OK


def _optional_float(text):
    return None if str(text).lower() in ("", "none") else float(text)


def _optional_int(text):
    return None if str(text).lower() in ("", "none") else int(float(text))


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with one section per command")
    common.add_argument("--seed", type=_optional_int, default=None,
                        help="seed for stochastic commands (unsigned 64-bit)")
    common.add_argument("--out", help="output directory (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--workers", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="qcontrast", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("contrast-surface", parents=[common],
                       help="contrast over pair rate and noise/efficiency ratio")
    p.add_argument("--mu", type=parse_grid, default=parse_grid("log:1e-6:1:61"))
    p.add_argument("--noise-ratio", type=parse_grid, default=parse_grid("log:1e-6:1e-1:11"),
                   help="grid of n/eta")
    p.set_defaults(func=_run_contrast_surface)

    p = sub.add_parser("required-contrast", parents=[common],
                       help="contrast needed for k-dimensional entanglement vs d")
    p.add_argument("--k", type=parse_int_grid, default=parse_int_grid("2,3,5,10"))
    p.add_argument("--d", type=_int_range, default=_int_range("2..100"))
    p.add_argument("--no-diagonal", action="store_true", help="omit the k = d curve")
    p.set_defaults(func=_run_required_contrast)

    p = sub.add_parser("table1", parents=[common],
                       help="predictions for the published two-MUB measurements")
    p.set_defaults(func=_run_table1)

    p = sub.add_parser("simulate", parents=[common], help="synthetic experiments + certification")
    p.add_argument("--d", type=parse_int_grid, default=[7])
    p.add_argument("--sigma", type=_optional_float, default=None,
                   help="Gaussian width in modes (default: flat)")
    p.add_argument("--target-q", type=parse_grid, default=None)
    p.add_argument("--mu", type=_optional_float, default=None)
    p.add_argument("--n", type=_optional_float, default=None)
    p.add_argument("--eta", type=_optional_float, default=None)
    p.add_argument("--total-events", type=_optional_int, default=None)
    p.set_defaults(func=_run_simulate)

    p = sub.add_parser("certify", parents=[common],
                       help="certify a JSON bundle or per-MUB CSV matrices")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=_run_certify)

    p = sub.add_parser("validate-mc", parents=[common],
                       help="Monte Carlo check of the coincidence formula")
    p.add_argument("--mu", type=parse_grid, default=parse_grid("1e-3,3e-3,1e-2"))
    p.add_argument("--n", type=parse_grid, default=parse_grid("1e-3,3e-3,1e-2"))
    p.add_argument("--eta", type=parse_grid, default=parse_grid("0.3,0.5,0.8"))
    p.add_argument("--pairing", choices=("zip", "product"), default="zip",
                   help="pair mu and n element-wise or take their product")
    p.add_argument("--trials", type=lambda s: int(float(s)), default=10 ** 7)
    p.add_argument("--detector", choices=("threshold", "counting"), default="threshold")
    p.add_argument("--sigma-limit", type=float, default=5.0)
    p.set_defaults(func=_run_validate_mc)

    p = sub.add_parser("steering-scan", parents=[common],
                       help="entropic steering criterion over (d, Q)")
    p.add_argument("--d", type=parse_int_grid, default=parse_int_grid("2,3,5,7,11,13"))
    p.add_argument("--q", type=parse_grid, default=parse_grid("log:1.5:100:40"))
    p.add_argument("--total-events", type=_optional_int, default=None,
                   help="also classify finite-count synthetic records")
    p.set_defaults(func=_run_steering_scan)
    return parser


def _apply_config(parser, argv):
    """Load ``--config`` and install its section as subcommand defaults."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    command = next((a for a in argv if not a.startswith("-")), None)
    if not known.config or command is None:
        return
    cfg = configparser.ConfigParser()
    if not cfg.read(known.config):
        raise QContrastError(f"cannot read config file {known.config}")
    if not cfg.has_section(command):
        return
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    subparser = subparsers.choices[command]
    by_dest = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, raw in cfg.items(command):
        dest = key.replace("-", "_")
        action = by_dest.get(dest)
        if action is None:
            raise QContrastError(f"unknown key {key!r} in section [{command}]")
        if isinstance(action, argparse._StoreTrueAction):
            defaults[dest] = cfg.getboolean(command, key)
        else:
            defaults[dest] = action.type(raw) if action.type else raw
    subparser.set_defaults(**defaults)


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
    except QContrastError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (QContrastError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception:
        logger.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
