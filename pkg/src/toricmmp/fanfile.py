"""Plain-text fan documents.

::

    # comments start with '#'
    rank 3
    ray e1 -1 -1 1        # label, then integer coordinates
    ray e2 1 -1 1
    cone 0 1 2            # 0-based ray indices
    boundary e5 1/2       # optional; ray label or index, rational p/q

Rationals must be written as integers or ``p/q``; decimals are rejected so
that every value stays exact.
"""

from __future__ import annotations

import re
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .errors import ParseError
from .fan import Fan, check_fan
from .linalg import fmt_q

_INT = re.compile(r"[+-]?\d+")
_RAT = re.compile(r"[+-]?\d+(/\d+)?")


def _int(tok, line, what):
    if not _INT.fullmatch(tok):
        raise ParseError(f"malformed integer {tok!r} in {what}", line)
    return int(tok)


def parse_rational(tok, line=None) -> Fraction:
    if not _RAT.fullmatch(tok):
        raise ParseError(f"rationals must be p/q, got {tok!r}", line)
    q = Fraction(tok)
    return q


def _tokens(text):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def parse_document(text: str):
    """Parse a document into ``(fan, boundary)``; boundary may be None.

    Raises ParseError for syntax problems and FanError when the fan axioms
    fail.
    """
    rank = None
    rays, labels, cones = [], [], []
    boundary_entries = []
    for no, toks in _tokens(text):
        key, args = toks[0], toks[1:]
        if key == "rank":
            if len(args) != 1:
                raise ParseError("rank takes one integer", no)
            rank = _int(args[0], no, "rank")
            if rank < 1:
                raise ParseError("rank must be positive", no)
        elif key == "ray":
            if rank is None:
                raise ParseError("ray before rank", no)
            if len(args) == rank + 1 and not _INT.fullmatch(args[0]):
                label, coords = args[0], args[1:]
            else:
                label, coords = f"e{len(rays) + 1}", args
            if len(coords) != rank:
                raise ParseError(f"ray needs {rank} coordinates, got {len(coords)}", no)
            if label in labels:
                raise ParseError(f"duplicate ray label {label!r}", no)
            rays.append(tuple(_int(t, no, "ray") for t in coords))
            labels.append(label)
        elif key == "cone":
            if not args:
                raise ParseError("empty cone", no)
            idx = [_int(t, no, "cone") for t in args]
            for i in idx:
                if not 0 <= i < len(rays):
                    raise ParseError(f"ray index {i} out of range", no)
            cones.append(tuple(idx))
        elif key == "boundary":
            if len(args) != 2:
                raise ParseError("boundary takes a ray and a coefficient", no)
            boundary_entries.append((no, args[0], parse_rational(args[1], no)))
        else:
            raise ParseError(f"unknown keyword {key!r}", no)
    if rank is None:
        raise ParseError("missing rank")
    if not rays:
        raise ParseError("no rays")
    if not cones:
        raise ParseError("empty max_cones: no cone lines")
    fan = check_fan(Fan(rank, tuple(rays), tuple(cones), tuple(labels)))
    boundary = None
    if boundary_entries:
        boundary = _boundary_from_entries(fan, boundary_entries)
    return fan, boundary


def _boundary_from_entries(fan: Fan, entries):
    coeffs = [Fraction(0)] * len(fan.rays)
    for no, ref, q in entries:
        if _INT.fullmatch(ref):
            i = int(ref)
            if not 0 <= i < len(fan.rays):
                raise ParseError(f"ray index {i} out of range", no)
        elif ref in fan.labels:
            i = fan.labels.index(ref)
        else:
            raise ParseError(f"unknown ray {ref!r}", no)
        coeffs[i] = q
    return tuple(coeffs)


def parse_fan(text: str) -> Fan:
    return parse_document(text)[0]


def parse_boundary(text: str, fan: Fan):
    """A boundary file holds only ``boundary`` lines."""
    entries = []
    for no, toks in _tokens(text):
        if toks[0] != "boundary" or len(toks) != 3:
            raise ParseError("expected 'boundary <ray> <p/q>'", no)
        entries.append((no, toks[1], parse_rational(toks[2], no)))
    return _boundary_from_entries(fan, entries)


def emit_fan(fan: Fan, boundary=None, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f"rank {fan.rank}")
    for label, r in zip(fan.labels, fan.rays):
        lines.append("ray " + " ".join([label] + [str(x) for x in r]))
    for c in fan.cones:
        lines.append("cone " + " ".join(str(i) for i in c))
    if boundary is not None:
        for label, b in zip(fan.labels, boundary):
            if b != 0:
                lines.append(f"boundary {label} {fmt_q(b)}")
    return "\n".join(lines) + "\n"


def bundled_path(name: str):
    return resources.files("toricmmp").joinpath("fans", name)


def read_document(path: str):
    """Read a fan document, falling back to the bundled copy by file name."""
    p = Path(path)
    if p.exists():
        return parse_document(p.read_text(encoding="utf-8"))
    bundled = bundled_path(p.name)
    if bundled.is_file():
        return parse_document(bundled.read_text(encoding="utf-8"))
    raise FileNotFoundError(path)
