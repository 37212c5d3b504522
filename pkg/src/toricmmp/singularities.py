"""Q-Gorenstein, terminal and klt tests for toric varieties and pairs.

Terminality uses the toric criterion: in every maximal cone the only
lattice points with canonical pairing at most one are the origin and the
ray generators.  Discrepancies of toric valuations come straight from the
support function of K + B, so no resolution is ever built.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .divisors import CartierData, add, canonical_divisor, divisor, q_cartier_data
from .errors import FanError, NotQCartierError
from .fan import Fan
from .linalg import dot, is_zero, primitive, solve_unique, vec_gcd


def log_canonical_divisor(f: Fan, boundary=None):
    K = canonical_divisor(f)
    if boundary is not None:
        K = add(K, divisor(boundary))
    return K


def is_q_gorenstein(f: Fan, boundary=None) -> CartierData | None:
    """Cartier data for K + B, or None."""
    return q_cartier_data(f, log_canonical_divisor(f, boundary))


def _minus_k_data(f: Fan, boundary=None) -> CartierData:
    """Functionals taking the value 1 - b_rho on each ray."""
    K = log_canonical_divisor(f, boundary)
    data = q_cartier_data(f, tuple(-c for c in K))
    if data is None:
        raise NotQCartierError("K_X is not Q-Cartier" if boundary is None else "K_X+B is not Q-Cartier")
    return data


def discrepancy(w, f: Fan, boundary=None, data: CartierData | None = None) -> Fraction:
    """Discrepancy of the valuation of the primitive vector ``w``."""
    w = tuple(w)
    if data is None:
        data = _minus_k_data(f, boundary)
    for k in range(len(f.cones)):
        if f.polycone(k).contains(w):
            return Fraction(dot(data.functionals[k], w)) - 1
    raise FanError(f"vector {w} lies outside the support of the fan")


def _box(vertices):
    lo = [min(v[i] for v in vertices) for i in range(len(vertices[0]))]
    hi = [max(v[i] for v in vertices) for i in range(len(vertices[0]))]
    return lo, hi


def low_pairing_points(f: Fan, k: int, m, bound) -> list[tuple[tuple[int, ...], Fraction]]:
    """Lattice points of cone ``k`` with 0 < <m, v> <= bound, sorted by
    (pairing, vector).  Assumes <m, ray> > 0 on every ray of the cone."""
    rays = f.rays_of(k)
    verts = [tuple(0 for _ in rays[0])]
    for r in rays:
        t = Fraction(bound) / dot(m, r)
        verts.append(tuple(t * x for x in r))
    lo, hi = _box(verts)
    pc = f.polycone(k)
    out = []
    ranges = [range(int(_floor(a)), int(_ceil(b)) + 1) for a, b in zip(lo, hi)]
    for v in itertools.product(*ranges):
        if is_zero(v):
            continue
        p = dot(m, v)
        if p > bound or p <= 0:
            continue
        if pc.contains(v):
            out.append((v, Fraction(p)))
    out.sort(key=lambda t: (t[1], t[0]))
    return out


def _floor(x):
    x = Fraction(x)
    return x.numerator // x.denominator


def _ceil(x):
    x = Fraction(x)
    return -((-x.numerator) // x.denominator)


@dataclass(frozen=True)
class TerminalReport:
    terminal: bool
    cone: int | None = None
    witness: tuple[int, ...] | None = None
    pairing: Fraction | None = None


def is_terminal(f: Fan) -> TerminalReport:
    """Terminality with a witness lattice point when it fails.

    The witness is the violating point of least pairing (ties broken
    lexicographically) in the first failing maximal cone.
    """
    data = _minus_k_data(f)
    for k, cone in enumerate(f.cones):
        m = data.functionals[k]
        ray_set = set(f.rays_of(k))
        for v, p in low_pairing_points(f, k, m, 1):
            if v not in ray_set:
                return TerminalReport(False, k, v, p)
    return TerminalReport(True)


def simplex_lattice_points(vertices) -> list[tuple[int, ...]]:
    """Lattice points of conv(0, v_1..v_n) by barycentric coordinates.

    Independent of any support function: a brute-force oracle.
    """
    vertices = [tuple(v) for v in vertices]
    n = len(vertices[0])
    lo, hi = _box([tuple(0 for _ in range(n))] + vertices)
    cols = list(zip(*vertices))
    out = []
    for v in itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)]):
        lam = solve_unique(cols, v)
        if all(x >= 0 for x in lam) and sum(lam) <= 1:
            out.append(v)
    return out


@dataclass(frozen=True)
class KltReport:
    klt: bool
    reason: str
    spot_checks: tuple[tuple[tuple[int, ...], Fraction], ...] = ()


def is_klt(f: Fan, boundary=None) -> KltReport:
    """Klt test for (X, B).  With K+B Q-Cartier and 0 <= b < 1 every toric
    valuation has discrepancy > -1; a handful are evaluated as evidence."""
    B = divisor(boundary) if boundary is not None else tuple(Fraction(0) for _ in f.rays)
    if any(b < 0 for b in B):
        return KltReport(False, "boundary is not effective")
    if any(b >= 1 for b in B):
        return KltReport(False, "boundary has a coefficient >= 1 (round-down is nonzero)")
    data = q_cartier_data(f, tuple(-c for c in log_canonical_divisor(f, B)))
    if data is None:
        return KltReport(False, "K_X+B is not Q-Cartier")
    checks = []
    seen = set()
    for k, cone in enumerate(f.cones):
        vecs = [f.rays[i] for i in cone]
        cands = list(vecs) + [
            tuple(a + b for a, b in zip(u, v)) for u, v in itertools.combinations(vecs, 2)
        ]
        cands.append(tuple(sum(xs) for xs in zip(*vecs)))
        for w in cands:
            if is_zero(w):
                continue
            w = primitive(w)
            if w in seen:
                continue
            seen.add(w)
            a = discrepancy(w, f, B, data)
            checks.append((w, a))
            if a <= -1:
                return KltReport(False, f"discrepancy {a} <= -1 at {w}", tuple(checks))
    return KltReport(True, "K_X+B is Q-Cartier and the boundary has coefficients in [0,1)", tuple(checks))


def multiplicity_of(vectors) -> int:
    from .linalg import bareiss_det

    return abs(bareiss_det(vectors))


def is_primitive_vector(v) -> bool:
    return vec_gcd(v) == 1
