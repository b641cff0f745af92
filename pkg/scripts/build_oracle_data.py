"""Regenerate src/mqcensus/data/class_numbers.tsv.

Runs the m = 5 pipeline on both the exact census and the level sets with
the published omissions, asks PARI (via cypari2, GRH-conditional) for the
class number of every vetted degree-8 and degree-16 candidate, and writes
the union as an oracle cache file.  Fields in the embedded tables are
tagged ``fixture`` and checked against PARI.

    python scripts/build_oracle_data.py [--jobs N] [--census PATH]
"""

import argparse
import logging
from concurrent.futures import ProcessPoolExecutor

from mqcensus.biquadratic import census_biquad
from mqcensus.fixtures import LEVEL_OMISSIONS, fixture_class_numbers
from mqcensus.multiquad import promote_partials, resolve_class_numbers, vet_segment
from mqcensus.oracle import FIXTURE, ClassNumberOracle, OracleCache, default_data_path, field_key
from mqcensus.quadratic import WATKINS_BOUND, QuadraticCensus, build_census
from mqcensus.responders import pari


def _pari_h(primitive):
    return pari.class_number(primitive)


class PoolResponder:
    def __init__(self, jobs):
        self.jobs = jobs

    def ask(self, primitive):
        return _pari_h(list(primitive)), "external:pari"

    def batch(self, prims):
        if self.jobs <= 1:
            return [_pari_h(p) for p in prims]
        with ProcessPoolExecutor(self.jobs) as ex:
            return list(ex.map(_pari_h, prims, chunksize=8))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--jobs", type=int, default=4)
    ap.add_argument("--census")
    ap.add_argument("--out", default=str(default_data_path()))
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    census = QuadraticCensus.load(args.census) if args.census else build_census(WATKINS_BOUND, 6, args.jobs)
    fixtures = fixture_class_numbers()
    cache = OracleCache()
    resp = PoolResponder(args.jobs)
    oracle = ClassNumberOracle(census, cache, [resp])
    for cen in (census, census.without(LEVEL_OMISSIONS)):
        prev, _ = census_biquad(cen, 5, args.jobs)
        n = 2
        while prev:
            n += 1
            vet = vet_segment(prev, cen, n, 5, args.jobs)
            vetted = promote_partials(vet, cen, n, 5)
            todo = [f for f in vetted if cache.get(field_key(f.neg)) is None]
            logging.info("n=%d: %d vetted, %d new PARI calls", n, len(vetted), len(todo))
            hs = resp.batch([f.primitive() for f in todo])
            for f, h in zip(todo, hs):
                key = field_key(f.neg)
                want = fixtures.get(f.key)
                if want is not None and want != h:
                    raise SystemExit(f"PARI disagrees with the tables on {key}: {h} vs {want}")
                cache.put(key, h, FIXTURE if want is not None else "external:pari")
            prev = resolve_class_numbers(vetted, oracle, n, 5, vet.report)
            logging.info("n=%d %s", n, " ".join(vet.report.lines()))
    cache.save(args.out)
    print(f"wrote {len(cache)} entries to {args.out}")


if __name__ == "__main__":
    main()
