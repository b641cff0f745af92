"""Small file helpers shared by the census, pipeline and oracle cache."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path


def atomic_write_text(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file and rename.

    Readers never see a half-written file, and a crash leaves the old
    contents in place.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def parse_header(line: str, tag: str) -> dict:
    """``# <tag> k=v k=v`` -> {k: v}; raises ValueError on a foreign header."""
    parts = line.strip().split()
    if len(parts) < 2 or parts[0] != "#" or parts[1] != tag:
        raise ValueError(f"expected '# {tag} ...' header, got {line.strip()!r}")
    out = {}
    for tok in parts[2:]:
        k, _, v = tok.partition("=")
        out[k] = v
    return out
