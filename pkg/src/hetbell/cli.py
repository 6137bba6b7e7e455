"""Command-line entry point: run / tables / plotdata / analytic / dump.

Output files are fully deterministic: a metadata block of ``# key=value``
comment lines (everything needed to reproduce the run bit-exactly,
including the seed and its provenance), a stable header row, then data.
Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict

from . import __version__
from .analytic import (
    distilled_fidelity_two_rounds,
    purification_success_probability,
    werner_components,
)
from .codes import CODE_NAMES, DEFAULT_BUDGETS, SURFACE3, get_code
from .montecarlo import (
    RunConfig,
    TABLE_P_VALUES,
    TABLE_SPECS,
    TableRow,
    run_plotdata,
    run_row,
    run_table,
)
from .protocols import SCHEMES

SEED_ENV_VAR = "HETBELL_SEED"
DEFAULT_SEED = 20150817
DEFAULT_TRIALS = 1_000_000

ROW_HEADER = (
    "rounds,x_rate,z_rate,merged_rate,ineff,kq,n_1q,n_2q,"
    "x_ci_lo,x_ci_hi,z_ci_lo,z_ci_hi,merged_ci_lo,merged_ci_hi"
)


def _row_fields(row: TableRow) -> list:
    x_lo, x_hi = row.ci("x")
    z_lo, z_hi = row.ci("z")
    m_lo, m_hi = row.ci("merged")
    return [
        row.rounds,
        row.x_rate,
        row.z_rate,
        row.merged_rate,
        row.inefficiency,
        row.kq_mean,
        row.n_1q_mean,
        row.n_2q_mean,
        x_lo,
        x_hi,
        z_lo,
        z_hi,
        m_lo,
        m_hi,
    ]


def _row_csv(row: TableRow) -> str:
    return ",".join(repr(v) if isinstance(v, float) else str(v) for v in _row_fields(row))


def _row_json(row: TableRow) -> dict:
    keys = ROW_HEADER.split(",")
    return dict(zip(keys, _row_fields(row)))


def _metadata(cfg: RunConfig, seed_source: str) -> dict:
    meta = {"tool": "hetbell", "version": __version__, "seed_source": seed_source}
    meta.update(asdict(cfg))
    del meta["rounds"]  # per-row column, not file metadata
    del meta["jobs"]  # worker count never affects results
    return meta


def _emit_csv(out, meta: dict, rows: list[TableRow]) -> None:
    for k, v in meta.items():
        out.write(f"# {k}={v}\n")
    out.write(ROW_HEADER + "\n")
    for row in rows:
        out.write(_row_csv(row) + "\n")


def _emit_json(out, meta: dict, rows: list[TableRow]) -> None:
    out.write(json.dumps({"metadata": meta, "rows": [_row_json(r) for r in rows]}, indent=2))
    out.write("\n")


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w"), True


def _load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, val = line.split("=", 1)
            values[key.strip()] = val.strip()
    return values


_CONFIG_KEYS = {
    "scheme": str,
    "code_a": str,
    "code_b": str,
    "rounds": int,
    "p": float,
    "trials": int,
    "seed": int,
    "jobs": int,
    "source": str,
    "source_fidelity": float,
    "meas_mode": str,
    "postselect": str,
    "first_round_basis": str,
    "unrotate_final": lambda s: s.lower() in ("1", "true", "yes"),
    "surface_budget": int,
}


def _build_config(args: argparse.Namespace, require_scheme: bool) -> tuple[RunConfig, str]:
    """Merge precedence: flags > config file > env seed > defaults."""
    file_vals: dict = {}
    if args.config:
        raw = _load_config_file(args.config)
        for key, val in raw.items():
            if key not in _CONFIG_KEYS:
                raise ValueError(f"unknown config key {key!r}")
            file_vals[key] = _CONFIG_KEYS[key](val)

    def pick(name: str, default):
        flag = getattr(args, name, None)
        if flag is not None:
            return flag
        if name in file_vals:
            return file_vals[name]
        return default

    seed_source = "default"
    seed = DEFAULT_SEED
    env_seed = os.environ.get(SEED_ENV_VAR)
    if env_seed is not None:
        seed = int(env_seed)
        seed_source = "env"
    if "seed" in file_vals:
        seed = file_vals["seed"]
        seed_source = "config"
    if getattr(args, "seed", None) is not None:
        seed = args.seed
        seed_source = "flag"

    scheme = pick("scheme", None)
    if scheme is None:
        if require_scheme:
            raise ValueError("--scheme is required")
        scheme = "strict"
    cfg = RunConfig(
        scheme=scheme,
        code_a=pick("code_a", "steane7"),
        code_b=pick("code_b", "surface3"),
        rounds=pick("rounds", 0),
        p=pick("p", 1e-3),
        trials=pick("trials", DEFAULT_TRIALS),
        seed=seed,
        jobs=pick("jobs", 1),
        source=pick("source", "eq4"),
        source_fidelity=pick("source_fidelity", 0.85),
        meas_mode=pick("meas_mode", "pauli"),
        postselect=pick("postselect", "measured"),
        first_round_basis=pick("first_round_basis", "z"),
        unrotate_final=pick("unrotate_final", False),
        surface_budget=pick("surface_budget", DEFAULT_BUDGETS[SURFACE3]),
    )
    cfg.validate()
    return cfg, seed_source


def _add_common_flags(sub: argparse.ArgumentParser, with_scheme: bool = True) -> None:
    if with_scheme:
        sub.add_argument("--scheme", choices=SCHEMES)
        sub.add_argument("--code-a", dest="code_a", choices=CODE_NAMES)
        sub.add_argument("--code-b", dest="code_b", choices=CODE_NAMES)
        sub.add_argument("--rounds", type=int)
        sub.add_argument("--p", type=float)
    sub.add_argument("--trials", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--jobs", type=int)
    sub.add_argument("--source", choices=("eq4", "werner", "perfect"))
    sub.add_argument("--source-fidelity", dest="source_fidelity", type=float)
    sub.add_argument("--meas-mode", dest="meas_mode", choices=("pauli", "flip"))
    sub.add_argument("--postselect", choices=("measured", "oracle_all"))
    sub.add_argument(
        "--first-round-basis", dest="first_round_basis", choices=("z", "x")
    )
    sub.add_argument(
        "--unrotate-final",
        dest="unrotate_final",
        action=argparse.BooleanOptionalAction,
        default=None,
    )
    sub.add_argument("--surface-budget", dest="surface_budget", type=int)
    sub.add_argument("--config", help="flat key=value config file; flags win")


def cmd_run(args: argparse.Namespace) -> int:
    cfg, seed_source = _build_config(args, require_scheme=True)
    row = run_row(cfg)
    out, close = _open_out(args.out)
    try:
        meta = _metadata(cfg, seed_source)
        meta["rounds"] = cfg.rounds
        if args.format == "json":
            _emit_json(out, meta, [row])
        else:
            _emit_csv(out, meta, [row])
    finally:
        if close:
            out.close()
    return 0


_SUBTABLE_SUFFIX = {TABLE_P_VALUES[0]: "a", TABLE_P_VALUES[1]: "b", TABLE_P_VALUES[2]: "c"}


def cmd_tables(args: argparse.Namespace) -> int:
    which = sorted(TABLE_SPECS) if args.which == "all" else [int(args.which)]
    for t in which:
        if t not in TABLE_SPECS:
            raise ValueError(f"table selector must be 1..6 or 'all', got {args.which!r}")
    cfg, seed_source = _build_config(args, require_scheme=False)
    os.makedirs(args.out_dir, exist_ok=True)
    for t in which:
        results = run_table(t, cfg)
        scheme, code_a, code_b = TABLE_SPECS[t]
        for p, rows in results.items():
            path = os.path.join(args.out_dir, f"table{t}{_SUBTABLE_SUFFIX[p]}.csv")
            meta = _metadata(cfg, seed_source)
            meta.update(table=t, scheme=scheme, code_a=code_a, code_b=code_b, p=p)
            with open(path, "w") as fh:
                _emit_csv(fh, meta, rows)
            print(path)
    return 0


def cmd_plotdata(args: argparse.Namespace) -> int:
    cfg, seed_source = _build_config(args, require_scheme=False)
    series = run_plotdata(cfg)
    out, close = _open_out(args.out)
    try:
        for k, v in _metadata(cfg, seed_source).items():
            out.write(f"# {k}={v}\n")
        out.write("p,scheme,rounds,ineff,merged_rate,merged_ci_lo,merged_ci_hi\n")
        for p, scheme, row in series:
            lo, hi = row.ci("merged")
            out.write(
                f"{p!r},{scheme},{row.rounds},{row.inefficiency!r},"
                f"{row.merged_rate!r},{lo!r},{hi!r}\n"
            )
    finally:
        if close:
            out.close()
    return 0


def cmd_analytic(args: argparse.Namespace) -> int:
    if args.f_max < args.f_min:
        raise ValueError("--f-max must be >= --f-min")
    if args.steps < 1:
        raise ValueError("--steps must be >= 1")
    out, close = _open_out(args.out)
    try:
        out.write("f,distilled_fidelity,success_probability,werner_target,werner_error_each\n")
        for i in range(args.steps + 1):
            f = args.f_min + (args.f_max - args.f_min) * i / args.steps if args.steps else args.f_min
            w = werner_components(f)
            out.write(
                f"{f!r},{distilled_fidelity_two_rounds(f)!r},"
                f"{purification_success_probability(f)!r},{w[0]!r},{w[1]!r}\n"
            )
    finally:
        if close:
            out.close()
    return 0


def cmd_dump(args: argparse.Namespace) -> int:
    code = get_code(args.code)
    if args.what in ("circuit", "all"):
        if code.encoder is None:
            print(f"code {code.name} has no encoder circuit")
        else:
            print(code.encoder.dump_text())
    if args.what in ("code", "all"):
        print(code.dump_text())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetbell",
        description="Monte Carlo simulator for heterogeneously encoded Bell-pair "
        "preparation via entanglement purification.",
    )
    parser.add_argument("--version", action="version", version=f"hetbell {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    run_p = subs.add_parser("run", help="simulate one configuration and emit one record")
    _add_common_flags(run_p)
    run_p.add_argument("--format", choices=("csv", "json"), default="csv")
    run_p.add_argument("--out", help="output path ('-' or omitted: stdout)")
    run_p.set_defaults(func=cmd_run)

    tab_p = subs.add_parser("tables", help="regenerate the published tables as CSV files")
    tab_p.add_argument("--which", required=True, help="table number 1..6 or 'all'")
    tab_p.add_argument("--out-dir", default=".", help="directory for tableN{a,b,c}.csv files")
    _add_common_flags(tab_p, with_scheme=False)
    tab_p.set_defaults(func=cmd_tables)

    plot_p = subs.add_parser(
        "plotdata", help="emit (inefficiency, merged rate) series per scheme per p"
    )
    _add_common_flags(plot_p, with_scheme=False)
    plot_p.add_argument("--code-a", dest="code_a", choices=CODE_NAMES)
    plot_p.add_argument("--code-b", dest="code_b", choices=CODE_NAMES)
    plot_p.add_argument("--out", help="output path ('-' or omitted: stdout)")
    plot_p.set_defaults(func=cmd_plotdata)

    ana_p = subs.add_parser("analytic", help="CSV sweep of the closed-form formulas")
    ana_p.add_argument("--f-min", dest="f_min", type=float, default=0.5)
    ana_p.add_argument("--f-max", dest="f_max", type=float, default=1.0)
    ana_p.add_argument("--steps", type=int, default=50)
    ana_p.add_argument("--out", help="output path ('-' or omitted: stdout)")
    ana_p.set_defaults(func=cmd_analytic)

    dump_p = subs.add_parser("dump", help="dump a code's encoder circuit and generators")
    dump_p.add_argument("--code", required=True, choices=CODE_NAMES)
    dump_p.add_argument("--what", choices=("circuit", "code", "all"), default="all")
    dump_p.set_defaults(func=cmd_dump)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"hetbell: error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, ValueError) else 1
    except KeyboardInterrupt:
        return 1


if __name__ == "__main__":
    sys.exit(main())
