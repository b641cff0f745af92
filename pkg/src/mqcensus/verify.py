"""Entry-level comparison of run outputs with the embedded tables.

Each check prints ``MATCH``, ``MISSING``, ``EXTRA``, ``DIFF`` or ``WARN``
lines and a closing ``<table>: k/N match`` line.  WARN lines describe
anomalies in the printed tables themselves and never fail a check.
"""

from __future__ import annotations

from pathlib import Path

from . import fixtures
from .multiquad import SegmentReport
from .radicand import format_list
from .records import read_fields, read_report


class UnknownTable(ValueError):
    pass


# descriptive name -> aliases accepted on the command line
TABLES = {
    "brown-parry": (),
    "bww": (),
    "arno4": (),
    "feaver": (),
    "quad4-lists": (),
    "biquad-counts": ("counts-1.5",),
    "triquad-counts": ("counts-1.6",),
    "quadriquad-counts": ("counts-1.7",),
    "pipeline-stats": ("stats-6.3",),
}
_ALIAS = {a: name for name, aliases in TABLES.items() for a in (name,) + aliases}


class Checker:
    def __init__(self, name: str, out=print):
        self.name = name
        self.out = out
        self.total = 0
        self.matched = 0
        self.failed = 0

    def match(self, what):
        self.total += 1
        self.matched += 1
        self.out(f"MATCH   {what}")

    def fail(self, tag: str, what):
        self.total += 1
        self.failed += 1
        self.out(f"{tag:<7} {what}")

    def warn(self, what):
        self.out(f"WARN    {what}")

    def compare(self, label, got, want):
        if got == want:
            self.match(f"{label} = {want}")
        else:
            self.fail("DIFF", f"{label}: got {got}, table {want}")

    def compare_sets(self, got: set, want: set, show=lambda k: format_list(k)):
        for k in sorted(want, key=lambda k: (len(k), [abs(v) for v in k])):
            if k in got:
                self.match(show(k))
            else:
                self.fail("MISSING", show(k))
        for k in sorted(got - want, key=lambda k: (len(k), [abs(v) for v in k])):
            self.fail("EXTRA", show(k))

    def finish(self) -> bool:
        self.out(f"{self.name}: {self.matched}/{self.total} match")
        return self.failed == 0


def _fields(cfg, n: int) -> list:
    path = cfg.run_dir / f"fields_n{n}.tsv"
    if not path.exists():
        raise FileNotFoundError(f"{path} not found; run the pipeline first")
    return read_fields(path)[1]


def _keys_with_h(cfg, n: int, h: int) -> set:
    return {f.key for f in _fields(cfg, n) if f.h == h}


def _count_by_h(cfg, n: int) -> dict:
    out: dict = {}
    for f in _fields(cfg, n):
        out[f.h] = out.get(f.h, 0) + 1
    return out


def _report(path: Path) -> list:
    if not path.exists():
        raise FileNotFoundError(f"{path} not found; run the pipeline first")
    return read_report(path)[1]


def _biquad_report(cfg) -> dict:
    out = {"by_h": {}}
    for line in _report(cfg.run_dir / "report_n2.txt"):
        if line.startswith("h="):
            h, c = line[2:].split("\t")
            out["by_h"][int(h)] = int(c)
        else:
            k, _, v = line.partition("=")
            out[k] = int(v)
    return out


def check_brown_parry(cfg, ck: Checker):
    ck.compare_sets(_keys_with_h(cfg, 2, 1), fixtures.brown_parry_fields())


def check_bww(cfg, ck: Checker):
    want, anomalies = fixtures.bww_fields()
    for a in anomalies:
        ck.warn(f"{a.where}: {a.text!r} ({a.note})")
    ck.compare_sets(_keys_with_h(cfg, 2, 2), want)


def check_arno4(cfg, ck: Checker):
    from .quadratic import QuadraticCensus, default_bound

    paths = sorted(cfg.data_dir.glob("census_B*.tsv"), key=lambda p: int(p.stem[8:]))
    if not paths:
        raise FileNotFoundError(f"no census in {cfg.data_dir}; run the census command first")
    census = QuadraticCensus.load(paths[-1])
    census = QuadraticCensus(census.bound, 2, census.h_abs)
    listed = fixtures.quadratic_levels_listed()
    for i, h in enumerate((1, 2, 4)):
        if census.bound < default_bound(i):
            ck.fail("MISSING", f"Q_{i} not complete below B={census.bound}")
            continue
        got = {(int(r),) for r in census.levels[i]}
        ck.compare_sets(got, {(r,) for r in listed[h]}, show=lambda k: f"h={h} {k[0]}")


def check_feaver(cfg, ck: Checker):
    ck.compare_sets(_keys_with_h(cfg, 3, 1), fixtures.feaver_fields())


def check_quad4_lists(cfg, ck: Checker):
    want = fixtures.quadriquad_fields()
    got = {f.key: f.h for f in _fields(cfg, 4)}
    for k, h in sorted(want.items(), key=lambda kv: (kv[1], kv[0])):
        if k not in got:
            ck.fail("MISSING", f"h={h} {format_list(k)}")
        elif got[k] != h:
            ck.fail("DIFF", f"{format_list(k)}: h={got[k]}, table h={h}")
        else:
            ck.match(f"h={h} {format_list(k)}")
    for k in sorted(set(got) - set(want)):
        ck.fail("EXTRA", f"h={got[k]} {format_list(k)}")


def _check_counts(got: dict, want: dict, m: int, ck: Checker):
    for h, c in sorted(want.items()):
        if h > 1 << m:
            continue
        ck.compare(f"h={h}", got.get(h, 0), c)


def check_biquad_counts(cfg, ck: Checker):
    _check_counts(_count_by_h(cfg, 2), fixtures.BIQUAD_COUNTS, cfg.m, ck)


def check_triquad_counts(cfg, ck: Checker):
    got = _count_by_h(cfg, 3)
    _check_counts(got, fixtures.TRIQUAD_COUNTS, cfg.m, ck)
    if cfg.m == 5:
        ck.compare("total", sum(got.values()), fixtures.SEGMENT_STATS[3]["fields"])


def check_quadriquad_counts(cfg, ck: Checker):
    _check_counts(_count_by_h(cfg, 4), fixtures.QUADRIQUAD_COUNTS, cfg.m, ck)


def check_pipeline_stats(cfg, ck: Checker):
    if cfg.m != 5:
        raise ValueError("the pipeline statistics belong to the m = 5 run")
    bq = _biquad_report(cfg)
    want = fixtures.BIQUAD_PIPELINE
    ck.compare("n=2 stage1", bq["stage1"], want["stage1"])
    ck.compare("n=2 stage2", bq["stage2"], want["stage2"])
    ck.compare("n=2 fields", bq["kept"], want["fields"])
    ck.compare("n=2 h=64", bq["by_h"].get(64, 0), want["h64"])
    for n, stats in sorted(fixtures.SEGMENT_STATS.items()):
        path = cfg.run_dir / f"report_n{n}.txt"
        if not path.exists():
            ck.fail("MISSING", f"n={n} report")
            continue
        rep = SegmentReport.from_lines(_report(path))
        for k, v in stats.items():
            ck.compare(f"n={n} {k}", getattr(rep, k), v)


_CHECKS = {
    "brown-parry": check_brown_parry,
    "bww": check_bww,
    "arno4": check_arno4,
    "feaver": check_feaver,
    "quad4-lists": check_quad4_lists,
    "biquad-counts": check_biquad_counts,
    "triquad-counts": check_triquad_counts,
    "quadriquad-counts": check_quadriquad_counts,
    "pipeline-stats": check_pipeline_stats,
}


def resolve_table(name: str) -> str:
    try:
        return _ALIAS[name]
    except KeyError:
        raise UnknownTable(f"unknown table {name!r}; choose from {', '.join(_ALIAS)}") from None


def run_table(cfg, name: str, out=print) -> bool:
    table = resolve_table(name)
    ck = Checker(table, out)
    _CHECKS[table](cfg, ck)
    return ck.finish()
