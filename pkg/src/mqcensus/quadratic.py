"""Imaginary quadratic class numbers and the level sets Q_i.

The census counts reduced definite forms for every discriminant up to a
bound in one sweep (``kernels.reduced_form_tally``).  Single radicands
outside the census go through the per-discriminant counter instead.
"""

from __future__ import annotations

import logging
import threading
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .fileio import atomic_write_text, parse_header
from .radicand import Radicand
from .realquad import discriminant

log = logging.getLogger(__name__)

# Largest |d| of an imaginary quadratic field with class number <= 100
# (Watkins' table); covers every level up to 2^6.
WATKINS_BOUND = 2_383_747

_LEVEL_BOUNDS = {0: 700, 1: 2_000, 2: 6_500}


def default_bound(max_level: int) -> int:
    """Discriminant bound that is known to complete Q_0..Q_max_level."""
    if max_level < 0:
        raise ValueError("max_level must be >= 0")
    return _LEVEL_BOUNDS.get(max_level, WATKINS_BOUND)


def _squarefree_mask(limit: int) -> np.ndarray:
    mask = np.ones(limit + 1, dtype=bool)
    mask[0] = False
    for p in kernels.small_primes(int(limit ** 0.5) + 1):
        mask[p * p::p * p] = False
    return mask


def _radicand_table(bound: int, tally: np.ndarray) -> np.ndarray:
    """h indexed by |r| for squarefree r < 0 with |disc(r)| <= bound, else 0."""
    n_max = bound
    sq = _squarefree_mask(n_max)
    out = np.zeros(n_max + 1, dtype=np.int32)
    idx = np.arange(n_max + 1)
    # r = -n with -n = 1 mod 4, i.e. n = 3 mod 4: disc = -n
    odd = sq & (idx % 4 == 3)
    out[odd] = tally[idx[odd]]
    # otherwise disc = -4n, covered while 4n <= bound
    even = sq & (idx % 4 != 3) & (4 * idx <= bound)
    out[even] = tally[4 * idx[even]]
    top = int(np.flatnonzero(out).max()) if out.any() else 0
    return out[: top + 1].copy()


@dataclass
class QuadraticCensus:
    """Class numbers of all imaginary quadratic fields with |disc| <= bound.

    ``h_abs[k]`` is h(Q(sqrt(-k))) when -k is a covered radicand and 0
    otherwise.  ``levels[i]`` is Q_i, the radicands with h = 2^i.
    """

    bound: int
    max_level: int
    h_abs: np.ndarray
    levels: tuple = ()
    _level_of: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.levels:
            self.levels = tuple(
                frozenset(Radicand.of(-int(k)) for k in np.flatnonzero(self.h_abs == (1 << i)))
                for i in range(self.max_level + 1)
            )
        self._level_of = {int(r): i for i, q in enumerate(self.levels) for r in q}

    def covers(self, r: int) -> bool:
        return r < 0 and -discriminant(r) <= self.bound

    def class_number(self, r: int):
        """h_r from the census, or None if r is not covered."""
        k = -int(r)
        if k <= 0 or k >= len(self.h_abs):
            return None
        h = int(self.h_abs[k])
        return h or None

    def level_of(self, r: int):
        """i with r in Q_i, or None."""
        return self._level_of.get(int(r))

    def radicands(self):
        """All covered radicands, ordered by |r|."""
        return [-int(k) for k in np.flatnonzero(self.h_abs)]

    def union_levels(self, upto: int | None = None) -> frozenset:
        upto = self.max_level if upto is None else upto
        out = frozenset()
        for q in self.levels[: upto + 1]:
            out |= q
        return out

    def without(self, radicands) -> "QuadraticCensus":
        """Copy whose level sets omit ``radicands``; class numbers stay known."""
        drop = {int(r) for r in radicands}
        levels = tuple(frozenset(r for r in q if int(r) not in drop) for q in self.levels)
        return QuadraticCensus(self.bound, self.max_level, self.h_abs, levels)

    def level_sizes(self) -> list:
        return [len(q) for q in self.levels]

    # -- persistence -------------------------------------------------------

    def save(self, path) -> None:
        ks = np.flatnonzero(self.h_abs)
        lines = [f"# quadratic-census B={self.bound} max_level={self.max_level}"]
        lines += [f"{-int(k)}\t{int(self.h_abs[k])}" for k in ks]
        atomic_write_text(path, "\n".join(lines) + "\n")

    @classmethod
    def load(cls, path) -> "QuadraticCensus":
        with open(path, encoding="utf-8") as fh:
            head = parse_header(fh.readline(), "quadratic-census")
            data = np.loadtxt(fh, dtype=np.int64, delimiter="\t", ndmin=2)
        bound, max_level = int(head["B"]), int(head["max_level"])
        size = int(-data[:, 0].min()) + 1 if len(data) else 1
        h_abs = np.zeros(size, dtype=np.int32)
        h_abs[-data[:, 0]] = data[:, 1]
        return cls(bound, max_level, h_abs)

    def save_levels(self, path) -> None:
        save_levels(self.levels, path)


def save_levels(levels, path) -> None:
    lines = []
    for i, q in enumerate(levels):
        lines.append(f"# level {i}")
        lines += [str(int(r)) for r in sorted(q, key=lambda x: (abs(x), x))]
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_levels(path) -> tuple:
    levels: list = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("# level"):
                if int(line.split()[2]) != len(levels):
                    raise ValueError(f"level sections out of order at {line!r}")
                levels.append(set())
            else:
                levels[-1].add(Radicand.of(int(line)))
    return tuple(frozenset(q) for q in levels)


def _tally_chunk(args):
    bound, lo, hi = args
    return kernels.reduced_form_tally(bound, lo, hi)


def build_census(bound: int, max_level: int, jobs: int = 1) -> QuadraticCensus:
    """Sieve every fundamental discriminant -bound <= d < 0."""
    if bound < 4:
        raise ValueError("census bound must be at least 4")
    a_max = kernels.tally_a_max(bound)
    if jobs <= 1 or a_max < 64:
        tally = kernels.reduced_form_tally(bound)
    else:
        # work per leading coefficient is roughly constant, so equal slices
        cuts = np.linspace(1, a_max + 1, jobs + 1).astype(int)
        chunks = [(bound, int(lo), int(hi) - 1) for lo, hi in zip(cuts[:-1], cuts[1:]) if hi > lo]
        tally = np.zeros(bound + 1, dtype=np.int32)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(_tally_chunk, chunks):
                tally += part
    census = QuadraticCensus(bound, max_level, _radicand_table(bound, tally))
    log.info("census B=%d: %s", bound, census.level_sizes())
    return census


def class_number_imag(r, census: QuadraticCensus | None = None, cache=None) -> int:
    """Exact class number of Q(sqrt(r)) for a negative squarefree r."""
    r = int(r)
    if r >= 0:
        raise ValueError("class_number_imag needs a negative radicand")
    if census is not None:
        h = census.class_number(r)
        if h is not None:
            return h
    if cache is not None:
        h = cache.get(r)
        if h is not None:
            return h
    h = kernels.count_reduced_definite(-discriminant(r))
    if cache is not None:
        cache.put(r, h)
    return h


class ClassNumberCache:
    """Persistent radicand -> class number table for quadratic fields.

    Lines are ``<radicand>\\t<h>``; new entries are appended, and a value
    once written never changes.
    """

    def __init__(self, path=None):
        self.path = Path(path) if path is not None else None
        self._data: dict = {}
        self._lock = threading.Lock()
        if self.path is not None and self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip() and not line.startswith("#"):
                        r, h = line.split("\t")
                        self._data[int(r)] = int(h)

    def __len__(self):
        return len(self._data)

    def __contains__(self, r):
        return int(r) in self._data

    def get(self, r):
        return self._data.get(int(r))

    def put(self, r, h: int) -> None:
        r, h = int(r), int(h)
        with self._lock:
            old = self._data.get(r)
            if old is not None:
                if old != h:
                    raise ValueError(f"class number of {r} already cached as {old}, got {h}")
                return
            self._data[r] = h
            if self.path is not None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(f"{r}\t{h}\n")

    def items(self):
        return sorted(self._data.items(), key=lambda kv: (abs(kv[0]), kv[0]))
