"""Class numbers of imaginary multiquadratic fields.

Quadratic and biquadratic fields are handled in-process.  Degree 8 and up
goes to the cache first and then to a responder: either an in-process
object with an ``ask`` method or an external program speaking the line
protocol (one request of space-separated radicands per line, one reply
line holding the class number or ``ERR <message>``).
"""

from __future__ import annotations

import logging
import selectors
import shlex
import subprocess
import threading
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .biquadratic import class_number_biquad
from .fileio import atomic_write_text
from .quadratic import QuadraticCensus, class_number_imag
from .radicand import FieldRec, Radicand, complete_radicand_list, format_list, split_signs
from .realquad import class_number_real

log = logging.getLogger(__name__)

BUILTIN_QUADRATIC = "builtin-quadratic"
BUILTIN_BIQUADRATIC = "builtin-biquadratic"
FIXTURE = "fixture"


class OracleUnavailable(RuntimeError):
    """A class number is needed and nothing configured can supply it."""

    def __init__(self, msg, pending=(), report=None):
        super().__init__(msg)
        self.pending = list(pending)
        self.report = report


class ResponderError(RuntimeError):
    """A responder failed or sent something that is not a class number."""

    def __init__(self, msg, raw=None):
        super().__init__(msg if raw is None else f"{msg}: {raw!r}")
        self.raw = raw


def field_key(neg) -> str:
    """Cache key: the sorted negative radicands, comma separated."""
    return format_list(neg)


def normalize(primitive) -> tuple:
    """(neg, pos) of the field generated by ``primitive``."""
    return split_signs(complete_radicand_list(primitive))


def parse_reply(line: str) -> int:
    text = line.strip()
    if text.startswith("ERR"):
        raise ResponderError("responder reported an error", text)
    try:
        h = int(text)
    except ValueError:
        raise ResponderError("malformed reply", text) from None
    if h <= 0:
        raise ResponderError("class number must be positive", text)
    return h


class OracleCache:
    """canonical key -> (class number, provenance); entries never change.

    File lines are ``<key>\\t<h>\\t<provenance>``, sorted by key length and
    value so a save after a load reproduces the file byte for byte.
    """

    def __init__(self, path=None, sources=()):
        self.path = Path(path) if path is not None else None
        self._data: dict = {}
        self._lock = threading.Lock()
        self._dirty = False
        for src in sources:
            self.merge_file(src)
        if self.path is not None and self.path.exists():
            self.merge_file(self.path)
        self._dirty = False

    def merge_file(self, path) -> None:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip() or line.startswith("#"):
                    continue
                key, h, prov = line.rstrip("\n").split("\t")
                self.put(key, int(h), prov)

    def __len__(self):
        return len(self._data)

    def __contains__(self, key):
        return key in self._data

    def get(self, key):
        return self._data.get(key)

    def items(self):
        """(key, (h, provenance)) pairs in file order."""
        return [(k, self._data[k]) for k in sorted(self._data, key=self._order)]

    def put(self, key: str, h: int, provenance: str) -> None:
        with self._lock:
            old = self._data.get(key)
            if old is not None:
                if old[0] != h:
                    raise ResponderError(
                        f"conflicting class numbers for {key}: {old[0]} ({old[1]}) vs {h} ({provenance})")
                return
            self._data[key] = (int(h), provenance)
            self._dirty = True

    @staticmethod
    def _order(key: str):
        vals = [int(t) for t in key.split(",")]
        return (len(vals), [abs(v) for v in vals], vals)

    def dumps(self) -> str:
        keys = sorted(self._data, key=self._order)
        return "".join(f"{k}\t{self._data[k][0]}\t{self._data[k][1]}\n" for k in keys)

    def save(self, path=None) -> None:
        target = Path(path) if path is not None else self.path
        if target is None:
            return
        with self._lock:
            atomic_write_text(target, self.dumps())
            self._dirty = False

    def flush(self) -> None:
        if self._dirty and self.path is not None:
            self.save()


class ExternalResponder:
    """One long-lived responder process, one request in flight."""

    def __init__(self, cmd, timeout: float = 600.0, name: str | None = None):
        self.argv = shlex.split(cmd) if isinstance(cmd, str) else list(cmd)
        if not self.argv:
            raise ValueError("empty responder command")
        self.timeout = timeout
        self.name = name or self.argv[-1].rsplit("/", 1)[-1].rsplit(".", 1)[-1]
        self.provenance = f"external:{self.name}"
        self._proc = None

    def _start(self):
        self._proc = subprocess.Popen(
            self.argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL, text=True, bufsize=1)

    def close(self) -> None:
        if self._proc is not None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=2)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()
            self._proc = None

    def _kill(self):
        if self._proc is not None:
            self._proc.kill()
            self._proc.wait()
            self._proc = None

    def _roundtrip(self, request: str) -> str:
        if self._proc is None or self._proc.poll() is not None:
            self._start()
        try:
            self._proc.stdin.write(request + "\n")
            self._proc.stdin.flush()
        except BrokenPipeError:
            self._kill()
            raise ResponderError("responder exited", request) from None
        sel = selectors.DefaultSelector()
        sel.register(self._proc.stdout, selectors.EVENT_READ)
        try:
            if not sel.select(self.timeout):
                self._kill()
                raise TimeoutError(f"no reply within {self.timeout}s for {request!r}")
        finally:
            sel.close()
        line = self._proc.stdout.readline()
        if not line:
            self._kill()
            raise ResponderError("responder closed its output", request)
        return line

    def ask(self, primitive) -> tuple:
        request = " ".join(str(int(a)) for a in primitive)
        try:
            line = self._roundtrip(request)
        except TimeoutError:
            log.warning("responder %s timed out, retrying once", self.name)
            line = self._roundtrip(request)
        return parse_reply(line), self.provenance

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class ClassNumberOracle:
    """Exact class numbers keyed by radicand list.

    ``responders`` are tried in order for degree >= 8; each must have
    ``ask(primitive) -> (h, provenance)``.  With ``cross_check`` set,
    responders are also consulted for degree <= 4 and any disagreement
    with the built-in value is an error.
    """

    def __init__(self, census: QuadraticCensus | None = None, cache: OracleCache | None = None,
                 responders=(), jobs: int = 1, cross_check: bool = False):
        self.census = census
        self.cache = cache if cache is not None else OracleCache()
        self.responders = list(responders)
        self.jobs = max(1, jobs)
        self.cross_check = cross_check
        self.calls = 0

    @property
    def available(self) -> bool:
        return bool(self.responders)

    def _builtin(self, neg, pos):
        if len(neg) + len(pos) == 1:
            (r,) = tuple(neg | pos)
            if r < 0:
                return class_number_imag(r, self.census), BUILTIN_QUADRATIC
            return class_number_real(int(r)), BUILTIN_QUADRATIC
        if len(neg) == 2:
            a, b = sorted(neg)
            return class_number_biquad(a, b, self.census), BUILTIN_BIQUADRATIC
        return None

    def _external(self, primitive, responder=None):
        pool = self.responders
        if responder is not None:
            pool = [responder] + [r for r in pool if r is not responder]
        errors = []
        for resp in pool:
            try:
                self.calls += 1
                return resp.ask(primitive)
            except (ResponderError, TimeoutError) as exc:
                errors.append(exc)
        if errors:
            raise errors[-1]
        raise OracleUnavailable(f"no responder for {format_list(primitive)}")

    def class_number(self, primitive, responder=None) -> int:
        prim = tuple(Radicand.of(a) for a in primitive)
        neg, pos = normalize(prim)
        if not neg and len(pos) > 1:
            raise ValueError("only imaginary fields and quadratic fields are supported")
        built = self._builtin(neg, pos)
        if built is not None:
            h, prov = built
            if self.cross_check and self.responders:
                other, _ = self._external(prim, responder)
                if other != h:
                    raise ResponderError(f"responder disagrees on {format_list(prim)}: {other} != {h}")
            return h
        key = field_key(neg)
        hit = self.cache.get(key)
        if hit is not None:
            return hit[0]
        h, prov = self._external(prim, responder)
        self.cache.put(key, h, prov)
        return h

    def field_class_number(self, rec: FieldRec, responder=None) -> int:
        return self.class_number(rec.primitive(), responder)

    def field_class_numbers(self, recs) -> list:
        """Class numbers for many fields, spread over the responders."""
        recs = list(recs)
        todo = [i for i, f in enumerate(recs)
                if len(f.neg) > 2 and self.cache.get(field_key(f.neg)) is None]
        if todo and not self.responders:
            raise OracleUnavailable(f"{len(todo)} class numbers needed and no responder configured",
                                    [recs[i] for i in todo])
        width = min(self.jobs, len(self.responders)) if self.responders else 1
        if width > 1 and len(todo) > 1:
            slots = self.responders[:width]

            def work(idx):
                resp = slots[idx % width]
                return self.field_class_number(recs[todo[idx]], resp)

            # one in-flight request per responder
            with ThreadPoolExecutor(max_workers=width) as ex:
                for start in range(0, len(todo), width):
                    list(ex.map(work, range(start, min(start + width, len(todo)))))
        out = [self.field_class_number(f) for f in recs]
        self.cache.flush()
        return out

    def close(self) -> None:
        for r in self.responders:
            close = getattr(r, "close", None)
            if close is not None:
                close()
        self.cache.flush()


def default_data_path() -> Path:
    return Path(__file__).with_name("data") / "class_numbers.tsv"


def oracle_from_config(census=None, cache_path=None, oracle_cmd=None, timeout: float = 600.0,
                       jobs: int = 1, use_fixture: bool = False) -> ClassNumberOracle:
    """Oracle wired from CLI-style settings."""
    cache = OracleCache(cache_path)
    responders = []
    if use_fixture:
        from .responders.fixture import FixtureResponder

        responders.append(FixtureResponder())
    if oracle_cmd:
        width = max(1, jobs)
        responders += [ExternalResponder(oracle_cmd, timeout) for _ in range(width)]
    return ClassNumberOracle(census, cache, responders, jobs=max(1, jobs))


__all__ = [
    "BUILTIN_BIQUADRATIC", "BUILTIN_QUADRATIC", "ClassNumberOracle", "ExternalResponder", "FIXTURE",
    "OracleCache", "OracleUnavailable", "ResponderError", "default_data_path", "field_key",
    "normalize", "oracle_from_config", "parse_reply",
]
