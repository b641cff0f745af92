import io
import sys

import pytest

from mqcensus import fixtures
from mqcensus.oracle import (BUILTIN_BIQUADRATIC, FIXTURE, ClassNumberOracle, ExternalResponder,
                             OracleCache, OracleUnavailable, ResponderError, default_data_path,
                             field_key, normalize, oracle_from_config, parse_reply)
from mqcensus.radicand import FieldRec
from mqcensus.responders._loop import serve
from mqcensus.responders.fixture import FixtureResponder

PY = sys.executable
FIXTURE_CMD = [PY, "-m", "mqcensus.responders.fixture"]


def _script(tmp_path, name, body):
    p = tmp_path / name
    p.write_text("import sys, time\n" + body)
    return [PY, str(p)]


class Fixed:
    """In-process responder with a fixed answer."""

    def __init__(self, h, name="fixed"):
        self.h = h
        self.provenance = f"external:{name}"
        self.asked = []

    def ask(self, primitive):
        self.asked.append(tuple(primitive))
        return self.h, self.provenance


def test_parse_reply():
    assert parse_reply("12\n") == 12
    for bad in ("abc", "0", "-4", "ERR boom"):
        with pytest.raises(ResponderError):
            parse_reply(bad)


def test_builtin_quadratic_and_biquadratic():
    oracle = ClassNumberOracle()
    assert oracle.class_number([-110]) == 12
    assert oracle.class_number([79]) == 3
    # a mixed-sign pair is the same field as its all-negative form
    assert oracle.class_number([-1, 2]) == oracle.class_number([-1, -2]) == 1
    assert oracle.class_number([-3, 5]) == 1


def test_builtin_wins_and_cross_check_catches_disagreement():
    liar = Fixed(7)
    oracle = ClassNumberOracle(responders=[liar])
    assert oracle.class_number([-1, -2]) == 1
    assert liar.asked == []
    checked = ClassNumberOracle(responders=[liar], cross_check=True)
    with pytest.raises(ResponderError):
        checked.class_number([-1, -2])


def test_degree_eight_needs_a_responder():
    oracle = ClassNumberOracle()
    with pytest.raises(OracleUnavailable) as exc:
        oracle.field_class_numbers([FieldRec.from_primitive([-1, 2, 3])])
    assert len(exc.value.pending) == 1


def test_cache_is_consulted_and_written():
    resp = Fixed(4)
    oracle = ClassNumberOracle(responders=[resp])
    assert oracle.class_number([-1, 3, 5, 7]) == 4
    assert oracle.class_number([-3, -1, 5, 7]) == 4
    assert len(resp.asked) == 1
    neg, _ = normalize([-1, 3, 5, 7])
    assert oracle.cache.get(field_key(neg)) == (4, "external:fixed")


def test_cache_never_changes_a_value():
    cache = OracleCache()
    cache.put("-2,-1", 1, BUILTIN_BIQUADRATIC)
    cache.put("-2,-1", 1, FIXTURE)
    with pytest.raises(ResponderError):
        cache.put("-2,-1", 2, FIXTURE)


def test_cache_round_trip_is_byte_identical(tmp_path):
    cache = OracleCache(tmp_path / "a.tsv")
    for prim, h in [((-1, 2, 3), 1), ((2, -3, 5, -7), 8), ((-1, 3, 5, 7), 4), ((-1, 2, 5), 1)]:
        neg, _ = normalize(prim)
        cache.put(field_key(neg), h, "external:test")
    cache.save()
    first = (tmp_path / "a.tsv").read_bytes()
    again = OracleCache(tmp_path / "a.tsv")
    again.save(tmp_path / "b.tsv")
    assert (tmp_path / "b.tsv").read_bytes() == first
    assert dict(again.items()) == dict(cache.items())


def test_shipped_data_agrees_with_tables():
    path = default_data_path()
    assert path.exists()
    cache = OracleCache(sources=[path])
    for key, h in fixtures.fixture_class_numbers().items():
        hit = cache.get(",".join(str(v) for v in key))
        if hit is not None:
            assert hit[0] == h


@pytest.mark.parametrize("primitive,h", [
    ((-1, 2, 3), 1),
    ((2, -3, 5, -7), 8),
    ((-1, 3, 5, 7), 4),
    ((-2, -3, -11, -19), 32),
])
def test_fixture_responder(primitive, h):
    assert FixtureResponder().ask(primitive)[0] == h


def test_fixture_responder_unknown_field():
    with pytest.raises(ResponderError):
        FixtureResponder().ask((-1, 2, 3, 5, 7, 11))


def test_serve_loop():
    out = io.StringIO()
    serve(lambda rs: len(rs), io.StringIO("-1 2 3\n\nx y\n"), out)
    lines = out.getvalue().splitlines()
    assert lines[0] == "3"
    assert lines[1].startswith("ERR ")


def test_external_responder_wire_format():
    with ExternalResponder(FIXTURE_CMD, timeout=60) as resp:
        assert resp.ask((-1, 2, 3)) == (1, "external:fixture")
        assert resp.ask((-1, 2, 3, 5))[0] == 2
        with pytest.raises(ResponderError):
            resp.ask((-1, 2, 3, 5, 7, 11))


def test_external_responder_malformed_reply(tmp_path):
    cmd = _script(tmp_path, "bad.py", "for line in sys.stdin:\n    print('abc', flush=True)\n")
    with ExternalResponder(cmd, timeout=30) as resp:
        with pytest.raises(ResponderError) as exc:
            resp.ask((-1, 2, 3))
    assert exc.value.raw == "abc"


def test_external_responder_timeout_retries_once(tmp_path):
    counter = tmp_path / "count"
    body = (f"open({str(counter)!r}, 'a').write('x')\n"
            "for line in sys.stdin:\n    time.sleep(30)\n")
    cmd = _script(tmp_path, "slow.py", body)
    resp = ExternalResponder(cmd, timeout=0.5)
    with pytest.raises(TimeoutError):
        resp.ask((-1, 2, 3))
    resp.close()
    assert counter.read_text() == "xx"


def test_external_responder_dies(tmp_path):
    cmd = _script(tmp_path, "die.py", "sys.stdin.readline()\n")
    with ExternalResponder(cmd, timeout=30) as resp:
        with pytest.raises(ResponderError):
            resp.ask((-1, 2, 3))


def test_oracle_from_config_with_fixture_and_command(tmp_path):
    cmd = " ".join(FIXTURE_CMD)
    oracle = oracle_from_config(cache_path=tmp_path / "cache.tsv", oracle_cmd=cmd, timeout=60,
                                jobs=2, use_fixture=False)
    try:
        recs = [FieldRec.from_primitive(p) for p in fixtures.FEAVER[:4]]
        assert oracle.field_class_numbers(recs) == [1, 1, 1, 1]
    finally:
        oracle.close()
    lines = (tmp_path / "cache.tsv").read_text().splitlines()
    assert len(lines) == 4
    assert all(line.endswith("\texternal:fixture") for line in lines)

    offline = oracle_from_config(cache_path=tmp_path / "other.tsv", use_fixture=True)
    assert offline.class_number([-1, 2, 3, 5]) == 2
    offline.close()
    assert (tmp_path / "other.tsv").read_text() == "-30,-15,-10,-6,-5,-3,-2,-1\t2\tfixture\n"
