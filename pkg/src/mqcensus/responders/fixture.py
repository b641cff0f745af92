"""Offline responder backed by the embedded tables and the shipped cache.

Answers every field listed with its class number in the tables, and every
candidate of the m <= 5 pipeline recorded in ``data/class_numbers.tsv``.
Anything else gets ``ERR unknown field``.  Run as
``python -m mqcensus.responders.fixture``.
"""

from __future__ import annotations

import sys
from functools import lru_cache

from ..fixtures import fixture_class_numbers
from ..oracle import FIXTURE, OracleCache, ResponderError, default_data_path, field_key, normalize


@lru_cache(maxsize=1)
def _table() -> dict:
    path = default_data_path()
    cache = OracleCache(sources=[path]) if path.exists() else OracleCache()
    out = dict(cache.items())
    for key, h in fixture_class_numbers().items():
        skey = ",".join(str(v) for v in key)
        old = out.get(skey)
        if old is not None and old[0] != h:
            raise ResponderError(f"shipped class number for {skey} contradicts the tables")
        out[skey] = (h, FIXTURE)
    return out


class FixtureResponder:
    name = "fixture"

    def ask(self, primitive) -> tuple:
        neg, _ = normalize(primitive)
        hit = _table().get(field_key(neg))
        if hit is None:
            raise ResponderError("unknown field", " ".join(str(int(a)) for a in primitive))
        return hit

    def __len__(self):
        return len(_table())


def main() -> None:
    from ._loop import serve

    resp = FixtureResponder()

    def answer(radicands):
        try:
            return resp.ask(radicands)[0]
        except ResponderError:
            raise ValueError("unknown field") from None

    serve(answer)


if __name__ == "__main__":
    sys.exit(main())
