"""Text formats for field sets, partial candidates and segment reports.

Field set:  ``h=<int>\\tP=<int>\\tneg=<r,...>\\tpos=<s,...>`` per line, sorted
by canonical key; ``h=?`` marks a field still waiting for its class number.
Partials:   ``neg=...\\tpos=...\\tSprime=...\\tPest=<int>``.
Every file starts with a ``# <kind> k=v ...`` header naming the run it
belongs to, so a resumed run can tell whether a checkpoint is its own.
"""

from __future__ import annotations

from .fileio import atomic_write_text, parse_header
from .radicand import FieldRec, format_list, parse_list


def _header(kind: str, meta: dict) -> str:
    return " ".join(["#", kind] + [f"{k}={v}" for k, v in meta.items()])


def _fields_of(line: str) -> dict:
    out = {}
    for part in line.rstrip("\n").split("\t"):
        k, _, v = part.partition("=")
        out[k] = v
    return out


def _exp(p: int) -> int:
    if p <= 0 or p & (p - 1):
        raise ValueError(f"P={p} is not a power of two")
    return p.bit_length() - 1


def format_field(f: FieldRec) -> str:
    h = "?" if f.h is None else str(f.h)
    return f"h={h}\tP={f.p_product}\tneg={format_list(f.neg)}\tpos={format_list(f.pos)}"


def parse_field(line: str) -> FieldRec:
    d = _fields_of(line)
    h = None if d["h"] == "?" else int(d["h"])
    return FieldRec(frozenset(parse_list(d["neg"])), frozenset(parse_list(d["pos"])),
                    _exp(int(d["P"])), h)


def write_fields(path, fields, meta: dict) -> None:
    lines = [_header("field-set", meta)]
    lines += [format_field(f) for f in sorted(fields, key=lambda f: f.key)]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_fields(path) -> tuple:
    """(meta, list of FieldRec)."""
    with open(path, encoding="utf-8") as fh:
        meta = parse_header(fh.readline(), "field-set")
        return meta, [parse_field(line) for line in fh if line.strip()]


def write_partials(path, partials, meta: dict) -> None:
    lines = [_header("partials", meta)]
    for c in sorted(partials, key=lambda c: c.key):
        lines.append(f"neg={format_list(c.neg)}\tpos={format_list(c.pos)}"
                     f"\tSprime={format_list(c.s_prime)}\tPest={c.p_estimate}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_partials(path) -> tuple:
    from .multiquad import CandidatePartial

    with open(path, encoding="utf-8") as fh:
        meta = parse_header(fh.readline(), "partials")
        out = []
        for line in fh:
            if not line.strip():
                continue
            d = _fields_of(line)
            out.append(CandidatePartial(frozenset(parse_list(d["neg"])), frozenset(parse_list(d["pos"])),
                                        frozenset(parse_list(d["Sprime"])), _exp(int(d["Pest"]))))
    return meta, out


def write_report(path, lines, meta: dict) -> None:
    atomic_write_text(path, "\n".join([_header("report", meta)] + list(lines)) + "\n")


def read_report(path) -> tuple:
    with open(path, encoding="utf-8") as fh:
        meta = parse_header(fh.readline(), "report")
        return meta, [line.rstrip("\n") for line in fh if line.strip()]
