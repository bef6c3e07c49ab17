"""Command-line interface.

Four subcommands:

* ``xihd test DATA.csv``      -- run the independence tests on a CSV sample
* ``xihd xi DATA.csv``        -- export the full pairwise coefficient matrix
* ``xihd simulate``           -- Monte-Carlo size/power study over the model catalog
* ``xihd moments``            -- print the exact null calibration constants

Exit codes: 0 on success, 2 for I/O or parse problems (missing file, malformed
CSV, unknown flags), 3 for data-contract violations (ties without a
tie-breaking seed, non-finite values, sample below the n >= 5 / p >= 2 floor,
invalid parameter domains).  Diagnostics name the offending line and column
where applicable.

Output goes to stdout unless ``--output PATH`` is given, in which case the
file is written atomically (temp file + rename).  ``--figures DIR`` renders
PNG diagnostics alongside the delimited output.  Simulation timing is printed
to stderr so that reports from identical seeds stay byte-identical no matter
the worker count (``--threads`` / ``XIHD_THREADS``).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass

from .coeff import xi_matrix
from .data import break_ties, read_csv
from .errors import CsvFormatError, DomainError, DomainTooSmall, XihdError
from .inference import KINDS, MIN_N, cp, delta_np, report_from_xi
from .moments import cov_xi2, stat_moments, u_n, v_n2
from .simulate import MODEL_IDS, SimSpec, run_simulation

EXIT_OK = 0
EXIT_IO = 2
EXIT_CONTRACT = 3


@dataclass
class RunConfig:
    """A validated CLI invocation, normalized from argparse output."""

    command: str
    input_path: str | None = None
    output_path: str | None = None
    fmt: str = "json"
    kinds: tuple = KINDS
    alpha: float = 0.05
    break_ties_seed: int | None = None
    seed: int = 0
    models: tuple = ()
    ns: tuple = ()
    ps: tuple = ()
    reps: int = 1000
    threads: int | None = None
    figures_dir: str | None = None
    n: int | None = None
    p: int | None = None


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".xihd-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, output_path: str | None) -> None:
    if output_path is None:
        sys.stdout.write(text)
    else:
        _write_atomic(output_path, text)


def _table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _load_sample(cfg: RunConfig):
    dm = read_csv(cfg.input_path)
    if cfg.break_ties_seed is not None:
        dm = break_ties(dm, cfg.break_ties_seed)
    return dm


def _figures_path(cfg: RunConfig, name: str) -> str:
    os.makedirs(cfg.figures_dir, exist_ok=True)
    return os.path.join(cfg.figures_dir, name)


def _cmd_test(cfg: RunConfig) -> int:
    dm = _load_sample(cfg)
    if dm.n < MIN_N:
        raise DomainTooSmall(f"tests require n >= {MIN_N} observations, got n={dm.n}")
    if dm.p < 2:
        raise DomainTooSmall(f"tests require p >= 2 columns, got p={dm.p}")
    if not 0.0 < cfg.alpha < 1.0:
        raise DomainError(f"alpha must lie strictly between 0 and 1, got {cfg.alpha!r}")
    xi = xi_matrix(dm)
    reports = [report_from_xi(xi, kind, cfg.alpha, cfg.break_ties_seed) for kind in cfg.kinds]

    if cfg.fmt == "json":
        text = json.dumps([r.to_dict() for r in reports], indent=2) + "\n"
    else:
        rows = [[r.kind, f"{r.statistic:.10g}", f"{r.p_value:.6g}",
                 "yes" if r.reject else "no", f"{r.threshold:.10g}"] for r in reports]
        text = (f"n={dm.n}  p={dm.p}  alpha={cfg.alpha}  "
                f"tie_break_seed={cfg.break_ties_seed}\n")
        text += _table(["kind", "statistic", "p_value", "reject", "threshold"], rows)
        for r in reports:
            if r.kind == "enhanced":
                text += f"screening statistic j0 = {r.j0:.10g}\n"
                for k, l, val in r.screened_pairs:
                    text += (f"  screened pair {dm.column_labels[k - 1]} -> "
                             f"{dm.column_labels[l - 1]}: xi = {val:.6g}\n")
    _emit(text, cfg.output_path)

    if cfg.figures_dir:
        from . import figures
        figures.save_xi_heatmap(xi, _figures_path(cfg, "xi-heatmap.png"), dm.column_labels)
        enhanced = [r for r in reports if r.kind == "enhanced"]
        if enhanced:
            figures.save_screened_pairs(dm, enhanced[0],
                                        _figures_path(cfg, "screened-pairs.png"))
    return EXIT_OK


def _cmd_xi(cfg: RunConfig) -> int:
    dm = _load_sample(cfg)
    xi = xi_matrix(dm)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([""] + dm.column_labels)
    for k in range(dm.p):
        row: list = [dm.column_labels[k]]
        for l in range(dm.p):
            row.append("" if k == l else repr(float(xi.values[k, l])))
        writer.writerow(row)
    _emit(buf.getvalue(), cfg.output_path)

    if cfg.figures_dir:
        from . import figures
        figures.save_xi_heatmap(xi, _figures_path(cfg, "xi-heatmap.png"), dm.column_labels)
    return EXIT_OK


def _cmd_simulate(cfg: RunConfig) -> int:
    results = []
    for model in cfg.models:
        for n in cfg.ns:
            for p in cfg.ps:
                spec = SimSpec(model=model, n=n, p=p, reps=cfg.reps,
                               alpha=cfg.alpha, seed=cfg.seed, tests=cfg.kinds)
                res = run_simulation(spec, threads=cfg.threads)
                print(f"# {model} n={n} p={p}: {res.wall_time:.2f}s", file=sys.stderr)
                results.append(res)

    if cfg.fmt == "json":
        text = json.dumps([r.to_dict() for r in results], indent=2) + "\n"
    else:
        headers = ["model", "n", "p"] + [k for k in KINDS if k in cfg.kinds] + ["screen"]
        rows = []
        for r in results:
            row = [r.model, str(r.n), str(r.p)]
            row += [f"{r.rejection_rate[k]:.3f}" for k in KINDS if k in cfg.kinds]
            row.append(f"{r.screen_rate:.3f}")
            rows.append(row)
        text = f"reps={cfg.reps}  alpha={cfg.alpha}  seed={cfg.seed}\n"
        text += _table(headers, rows)
    _emit(text, cfg.output_path)

    if cfg.figures_dir and results:
        from . import figures
        figures.save_rejection_bars(results, _figures_path(cfg, "rejection-rates.png"))
    return EXIT_OK


def _cmd_moments(cfg: RunConfig) -> int:
    if cfg.n < MIN_N:
        raise DomainTooSmall(f"calibration constants require n >= {MIN_N}, got n={cfg.n}")
    mom = stat_moments(cfg.n, cfg.p)
    values = {
        "n": cfg.n,
        "p": cfg.p,
        "u_n": u_n(cfg.n),
        "v_n2": v_n2(cfg.n),
        "cov_xi2": cov_xi2(cfg.n),
        "mu_np": mom.mu_np,
        "sigma_np2": mom.sigma_np2,
        "c_p": cp(cfg.p),
        "delta_np": delta_np(cfg.n, cfg.p),
    }
    if cfg.fmt == "json":
        text = json.dumps(values, indent=2) + "\n"
    else:
        rows = [[k, f"{v:.15g}" if isinstance(v, float) else str(v)]
                for k, v in values.items()]
        text = _table(["constant", "value"], rows)
    _emit(text, cfg.output_path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xihd",
        description="Complete-independence tests for high-dimensional data "
                    "built on the pairwise rank correlation coefficient.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, with_figures=True):
        sp.add_argument("--format", choices=("json", "table"), default="json",
                        help="output format (default: json)")
        sp.add_argument("--output", metavar="PATH",
                        help="write the report to PATH atomically instead of stdout")
        if with_figures:
            sp.add_argument("--figures", metavar="DIR",
                            help="render PNG diagnostics into DIR alongside the output")

    sp = sub.add_parser("test", help="run independence tests on a CSV sample")
    sp.add_argument("data", help="CSV file: one header row, numeric cells, no ties")
    sp.add_argument("--kind", choices=KINDS + ("all",), default="all",
                    help="which test to run (default: all)")
    sp.add_argument("--alpha", type=float, default=0.05, help="test level (default: 0.05)")
    sp.add_argument("--break-ties", metavar="SEED", type=int, default=None,
                    help="break tied values uniformly at random with this seed")
    add_common(sp)

    sp = sub.add_parser("xi", help="export the p x p coefficient matrix as CSV")
    sp.add_argument("data", help="CSV file: one header row, numeric cells, no ties")
    sp.add_argument("--break-ties", metavar="SEED", type=int, default=None,
                    help="break tied values uniformly at random with this seed")
    sp.add_argument("--output", metavar="PATH",
                    help="write the CSV to PATH atomically instead of stdout")
    sp.add_argument("--figures", metavar="DIR",
                    help="render a PNG heat map into DIR alongside the output")

    sp = sub.add_parser("simulate", help="Monte-Carlo size/power study")
    sp.add_argument("--model", action="append", required=True, choices=MODEL_IDS,
                    dest="models", help="model id; repeat for several models")
    sp.add_argument("--n", action="append", type=int, required=True, dest="ns",
                    help="sample size; repeat for several sizes")
    sp.add_argument("--p", action="append", type=int, required=True, dest="ps",
                    help="dimension; repeat for several dimensions")
    sp.add_argument("--reps", type=int, default=1000,
                    help="replicates per cell (default: 1000)")
    sp.add_argument("--alpha", type=float, default=0.05, help="test level (default: 0.05)")
    sp.add_argument("--seed", type=int, default=0,
                    help="master seed; replicate r uses the substream keyed (seed, r)")
    sp.add_argument("--tests", nargs="+", choices=KINDS, default=list(KINDS),
                    help="which tests to tally (default: all three)")
    sp.add_argument("--threads", type=int, default=None,
                    help="worker threads (default: XIHD_THREADS or CPU count)")
    add_common(sp)

    sp = sub.add_parser("moments", help="print exact null calibration constants")
    sp.add_argument("--n", type=int, required=True, help="sample size (>= 5)")
    sp.add_argument("--p", type=int, required=True, help="dimension (>= 2)")
    add_common(sp, with_figures=False)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command)
    cfg.fmt = getattr(args, "format", "json")
    cfg.output_path = getattr(args, "output", None)
    cfg.figures_dir = getattr(args, "figures", None)
    if args.command in ("test", "xi"):
        cfg.input_path = args.data
        cfg.break_ties_seed = args.break_ties
    if args.command == "test":
        cfg.kinds = KINDS if args.kind == "all" else (args.kind,)
        cfg.alpha = args.alpha
    elif args.command == "simulate":
        cfg.models = tuple(args.models)
        cfg.ns = tuple(args.ns)
        cfg.ps = tuple(args.ps)
        cfg.reps = args.reps
        cfg.alpha = args.alpha
        cfg.seed = args.seed
        cfg.kinds = tuple(k for k in KINDS if k in args.tests)
        cfg.threads = args.threads
    elif args.command == "moments":
        cfg.n = args.n
        cfg.p = args.p
    return cfg


_HANDLERS = {
    "test": _cmd_test,
    "xi": _cmd_xi,
    "simulate": _cmd_simulate,
    "moments": _cmd_moments,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = _config_from_args(args)
    try:
        return _HANDLERS[cfg.command](cfg)
    except CsvFormatError as exc:
        print(f"xihd: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (OSError, UnicodeDecodeError) as exc:
        print(f"xihd: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except XihdError as exc:
        print(f"xihd: error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
