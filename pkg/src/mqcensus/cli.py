"""Command line entry point: ``mqcensus <command> [options]``.

Commands: census, biquad, segment, run, verify, bound.  Options may also
come from a ``key=value`` config file (``--config``); flags win.
Exit status: 0 ok, 2 verification mismatch, 3 oracle unavailable, 4 I/O.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import fixtures
from .biquadratic import census_biquad
from .degree_bound import min_exponent
from .multiquad import (SegmentReport, promote_partials, resolve_class_numbers, vet_segment,
                        vetting_chain)
from .oracle import OracleUnavailable, ResponderError, oracle_from_config
from .quadratic import ClassNumberCache, QuadraticCensus, build_census, default_bound
from .records import read_fields, read_report, write_fields, write_partials, write_report
from .verify import UnknownTable, run_table

EXIT_OK, EXIT_MISMATCH, EXIT_ORACLE, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("mqcensus")


@dataclass
class RunConfig:
    m: int = 5
    bound: int | None = None
    max_level: int | None = None
    data_dir: Path = Path("mqcensus-data")
    jobs: int = 1
    oracle_cmd: str | None = None
    oracle_timeout_secs: float = 600.0
    fixture_oracle: bool = False
    omit: tuple = ()
    extra: dict = field(default_factory=dict)

    def census_bound(self) -> int:
        return self.bound if self.bound is not None else default_bound(self.m + 1)

    def meta(self, **more) -> dict:
        out = {"m": self.m, "B": self.census_bound(),
               "omit": ",".join(str(r) for r in self.omit) or "-"}
        out.update(more)
        return out

    @property
    def run_dir(self) -> Path:
        tag = f"m{self.m}" + ("" if not self.omit else "_omit" + "_".join(str(-r) for r in self.omit))
        return self.data_dir / tag


_KEYS = {"m": int, "bound": int, "max_level": int, "data_dir": Path, "jobs": int,
         "oracle_cmd": str, "oracle_timeout_secs": float, "fixture_oracle": None, "omit": None}


def _parse_bool(v: str) -> bool:
    return str(v).strip().lower() in {"1", "true", "yes", "on"}


def _parse_omit(v) -> tuple:
    if isinstance(v, (tuple, list)):
        return tuple(int(x) for x in v)
    v = str(v).strip()
    if v in {"", "-", "none"}:
        return ()
    if v == "published":
        return tuple(fixtures.LEVEL_OMISSIONS)
    return tuple(int(x) for x in v.split(","))


def load_config_file(path) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{n}: expected key=value")
            k, v = (s.strip() for s in line.split("=", 1))
            k = k.replace("-", "_")
            if k not in _KEYS:
                raise ValueError(f"{path}:{n}: unknown key {k!r}")
            out[k] = v
    return out


def make_config(args) -> RunConfig:
    values = load_config_file(args.config) if getattr(args, "config", None) else {}
    for k in _KEYS:
        v = getattr(args, k, None)
        if v is not None and v is not False:
            values[k] = v
    cfg = RunConfig()
    for k, v in values.items():
        if k == "fixture_oracle":
            cfg.fixture_oracle = v if isinstance(v, bool) else _parse_bool(v)
        elif k == "omit":
            cfg.omit = _parse_omit(v)
        else:
            setattr(cfg, k, _KEYS[k](v))
    if cfg.m < 0:
        raise ValueError("m must be >= 0")
    if cfg.bound is not None and cfg.bound < 4:
        raise ValueError("bound must be >= 4")
    cfg.data_dir = Path(cfg.data_dir).resolve()
    return cfg


# ---------------------------------------------------------------------------
# shared steps
# ---------------------------------------------------------------------------

def census_path(cfg: RunConfig, bound: int) -> Path:
    return cfg.data_dir / f"census_B{bound}.tsv"


def get_census(cfg: RunConfig, max_level: int) -> QuadraticCensus:
    """Load the census for the configured bound, building it if needed."""
    bound = cfg.census_bound()
    path = census_path(cfg, bound)
    census = None
    if path.exists():
        census = QuadraticCensus.load(path)
        if census.max_level < max_level:
            census = QuadraticCensus(census.bound, max_level, census.h_abs)
    if census is None:
        census = build_census(bound, max(max_level, 0), cfg.jobs)
        census.save(path)
        census.save_levels(cfg.data_dir / f"levels_B{bound}.txt")
    return census.without(cfg.omit) if cfg.omit else census


def quad_cache(cfg: RunConfig) -> ClassNumberCache:
    return ClassNumberCache(cfg.data_dir / "quadratic_class_numbers.tsv")


def make_oracle(cfg: RunConfig, census):
    return oracle_from_config(census, cfg.data_dir / "oracle_cache.tsv", cfg.oracle_cmd,
                              cfg.oracle_timeout_secs, cfg.jobs, cfg.fixture_oracle)


def _fields_path(cfg, n):
    return cfg.run_dir / f"fields_n{n}.tsv"


def _report_path(cfg, n):
    return cfg.run_dir / f"report_n{n}.txt"


def _load_if_current(path: Path, cfg: RunConfig, n: int):
    if not path.exists():
        return None
    meta, recs = read_fields(path)
    want = {k: str(v) for k, v in cfg.meta(n=n).items()}
    if any(meta.get(k) != v for k, v in want.items()):
        return None
    return recs


def step_biquad(cfg: RunConfig, census) -> list:
    cached = _load_if_current(_fields_path(cfg, 2), cfg, 2)
    if cached is not None:
        return cached
    fields, rep = census_biquad(census, cfg.m, cfg.jobs, quad_cache(cfg))
    write_fields(_fields_path(cfg, 2), fields, cfg.meta(n=2))
    write_report(_report_path(cfg, 2), rep.lines(), cfg.meta(n=2))
    return sorted(fields, key=lambda f: f.key)


def step_segment(cfg: RunConfig, census, prev, n: int, oracle) -> list:
    cached = _load_if_current(_fields_path(cfg, n), cfg, n)
    if cached is not None:
        return cached
    meta = cfg.meta(n=n)
    vetted_path = cfg.run_dir / f"vetted_n{n}.tsv"
    report_path = _report_path(cfg, n)
    vetted = _load_if_current(vetted_path, cfg, n)
    if vetted is not None and report_path.exists():
        report = SegmentReport.from_lines(read_report(report_path)[1])
    else:
        vet = vet_segment(prev, census, n, cfg.m, cfg.jobs)
        write_partials(cfg.run_dir / f"partials_n{n}.tsv", vet.partials, meta)
        vetted = promote_partials(vet, census, n, cfg.m, quad_cache(cfg))
        report = vet.report
        write_fields(vetted_path, vetted, meta)
        write_report(report_path, report.lines(), meta)
    try:
        fields = resolve_class_numbers(vetted, oracle, n, cfg.m, report)
    finally:
        if oracle is not None:
            oracle.cache.flush()
    write_fields(_fields_path(cfg, n), fields, meta)
    write_report(report_path, report.lines(), meta)
    return sorted(fields, key=lambda f: f.key)


def _counts_line(fields) -> str:
    by = {}
    for f in fields:
        by[f.h] = by.get(f.h, 0) + 1
    return " ".join(f"h={h}:{c}" for h, c in sorted(by.items())) or "none"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_census(cfg: RunConfig, args) -> int:
    max_level = args.max_level if args.max_level is not None else cfg.m + 1
    bound = cfg.bound if cfg.bound is not None else default_bound(max_level)
    census = build_census(bound, max_level, cfg.jobs)
    census.save(census_path(cfg, bound))
    census.save_levels(cfg.data_dir / f"levels_B{bound}.txt")
    for i, q in enumerate(census.levels):
        print(f"Q_{i}: {len(q)}")
    return EXIT_OK


def cmd_biquad(cfg: RunConfig, args) -> int:
    census = get_census(cfg, cfg.m + 1)
    fields = step_biquad(cfg, census)
    _, lines = read_report(_report_path(cfg, 2))
    for line in lines:
        print(line)
    print(f"n=2: {len(fields)} fields ({_counts_line(fields)})")
    return EXIT_OK


def cmd_segment(cfg: RunConfig, args) -> int:
    n = args.n
    if n < 3:
        raise ValueError("segment needs --n >= 3")
    census = get_census(cfg, cfg.m + 1)
    prev_path = _fields_path(cfg, n - 1)
    prev = _load_if_current(prev_path, cfg, n - 1)
    if prev is None:
        raise FileNotFoundError(f"{prev_path} missing or from another run; run n={n - 1} first")
    oracle = make_oracle(cfg, census) if (cfg.oracle_cmd or cfg.fixture_oracle) else None
    try:
        fields = step_segment(cfg, census, prev, n, oracle)
    finally:
        if oracle is not None:
            oracle.close()
    for line in read_report(_report_path(cfg, n))[1]:
        print(line)
    print(f"n={n}: {len(fields)} fields ({_counts_line(fields)})")
    return EXIT_OK


def cmd_vet_only(cfg: RunConfig, census) -> int:
    """Vet every segment with all vetted candidates as parents, no oracle."""
    prev = step_biquad(cfg, census)
    print(f"n=2: {len(prev)} fields ({_counts_line(prev)})")
    reports = vetting_chain(prev, census, cfg.m, max(6, cfg.m + 2), cfg.jobs, quad_cache(cfg))
    for n, rep in reports.items():
        write_report(cfg.run_dir / f"vetchain_n{n}.txt", rep.lines(), cfg.meta(n=n))
        print(f"n={n}: {rep.vetted_total} vetted (pool {rep.pool}, parents {rep.parents})")
    last = max(reports)
    if reports[last].vetted_total == 0:
        print(f"no imaginary {last}-quadratic field has class number dividing 2^{cfg.m}")
    return EXIT_OK


def cmd_run(cfg: RunConfig, args) -> int:
    census = get_census(cfg, cfg.m + 1)
    if getattr(args, "vet_only", False):
        return cmd_vet_only(cfg, census)
    oracle = make_oracle(cfg, census) if (cfg.oracle_cmd or cfg.fixture_oracle) else None
    counts = {}
    try:
        prev = step_biquad(cfg, census)
        counts[2] = len(prev)
        print(f"n=2: {len(prev)} fields ({_counts_line(prev)})")
        n = 2
        while prev:
            n += 1
            prev = step_segment(cfg, census, prev, n, oracle)
            counts[n] = len(prev)
            print(f"n={n}: {len(prev)} fields ({_counts_line(prev)})")
            if prev and min_exponent(n) > cfg.m:
                raise AssertionError(f"degree bound violated at n={n}")
    except OracleUnavailable as exc:
        print(f"oracle unavailable at n={n}: {len(exc.pending)} pending candidates written to "
              f"{cfg.run_dir / f'vetted_n{n}.tsv'}", file=sys.stderr)
        summary = " ".join(f"n={k}:{v}" for k, v in counts.items())
        print(f"partial summary {summary}")
        return EXIT_ORACLE
    finally:
        if oracle is not None:
            oracle.close()
    summary = " ".join(f"n={k}:{v}" for k, v in counts.items())
    (cfg.run_dir / "summary.txt").write_text(summary + "\n", encoding="utf-8")
    print(summary)
    return EXIT_OK


def cmd_bound(cfg: RunConfig, args) -> int:
    print(min_exponent(args.n))
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> int:
    ok = run_table(cfg, args.table)
    return EXIT_OK if ok else EXIT_MISMATCH


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value config file")
    common.add_argument("--m", type=int, help="target exponent: class numbers dividing 2^m (default 5)")
    common.add_argument("--bound", type=int, help="census bound on |discriminant|")
    common.add_argument("--data-dir", dest="data_dir", help="checkpoint directory")
    common.add_argument("--jobs", type=int, help="worker processes")
    common.add_argument("--oracle-cmd", dest="oracle_cmd", help="external class-number responder command")
    common.add_argument("--oracle-timeout-secs", dest="oracle_timeout_secs", type=float)
    common.add_argument("--fixture-oracle", dest="fixture_oracle", action="store_true",
                        help="answer degree >= 8 from the embedded tables and shipped cache")
    common.add_argument("--omit", help="radicands left out of the level sets "
                        "(comma list, or 'published' for the published-run input)")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="mqcensus", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("census", parents=[common], help="build the quadratic census")
    p.add_argument("--max-level", dest="max_level", type=int)
    p.set_defaults(func=cmd_census)
    p = sub.add_parser("biquad", parents=[common], help="biquadratic fields")
    p.set_defaults(func=cmd_biquad)
    p = sub.add_parser("segment", parents=[common], help="one n >= 3 segment")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_segment)
    p = sub.add_parser("run", parents=[common], help="the whole recursion")
    p.add_argument("--vet-only", dest="vet_only", action="store_true",
                   help="no oracle: vet each segment from all vetted candidates of the previous one")
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("verify", parents=[common], help="compare outputs with the embedded tables")
    p.add_argument("--table", required=True)
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("bound", parents=[common], help="degree bound floor for n")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_bound)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(message)s")
    try:
        cfg = make_config(args)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        return args.func(cfg, args)
    except UnknownTable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except OracleUnavailable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except ResponderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
