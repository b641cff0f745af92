"""Class numbers from PARI/GP through cypari2.

``bnfinit`` assumes GRH unless the result is certified, so every answer
from here is GRH-conditional; the oracle cache records it as
``external:pari``.  Run as ``python -m mqcensus.responders.pari``.
"""

from __future__ import annotations

import sys

try:
    import cypari2
except ImportError:  # pragma: no cover - optional dependency
    cypari2 = None

_pari = None


def _gp():
    global _pari
    if cypari2 is None:
        raise RuntimeError("cypari2 is not installed")
    if _pari is None:
        _pari = cypari2.Pari()
        _pari.allocatemem(1 << 30, silent=True)
    return _pari


def defining_polynomial(radicands):
    gp = _gp()
    x = gp("x")
    pol = x ** 2 - radicands[0]
    for a in radicands[1:]:
        pol = gp.polcompositum(pol, x ** 2 - a)[0]
    return gp.polredbest(pol)


def class_number(radicands) -> int:
    if not radicands:
        raise ValueError("empty radicand list")
    return int(_gp().bnfinit(defining_polynomial(list(radicands))).bnf_get_no())


def main() -> None:
    from ._loop import serve

    serve(class_number)


if __name__ == "__main__":
    sys.exit(main())
