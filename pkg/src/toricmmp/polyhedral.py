"""Polyhedral cones over Q by the double description method.

Everything works with integer vectors; rays and facet normals are always
returned primitive.  The target scale is small (ambient dimension up to
about eight, a few dozen generators), so clarity beats cleverness here.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from itertools import combinations

from .linalg import (
    dot,
    echelon,
    integer_kernel,
    integer_kernel_rational,
    is_zero,
    primitive,
    rank,
    solve_affine,
)


def dd_extreme_rays(A: list[tuple[int, ...]], d: int) -> list[tuple[int, ...]]:
    """Extreme rays of the pointed cone ``{x in Q^d : A x >= 0}``.

    ``A`` must have rank ``d``.  Uses the incremental double description
    with the combinatorial adjacency test.
    """
    A = [tuple(int(x) for x in row) for row in A if not is_zero(row)]
    if d == 0:
        return []
    # Greedy choice of d independent rows for the initial simplicial cone.
    basis_rows: list[int] = []
    for i, row in enumerate(A):
        if rank([A[j] for j in basis_rows] + [row], d) > len(basis_rows):
            basis_rows.append(i)
            if len(basis_rows) == d:
                break
    if len(basis_rows) < d:
        raise ValueError("inequality system has a lineality space")
    B = [A[i] for i in basis_rows]
    rays: list[tuple[int, ...]] = []
    zeros: list[frozenset[int]] = []
    for k in range(d):
        others = [B[j] for j in range(d) if j != k]
        (x,) = integer_kernel_rational(others, d) if others else [(1,)]
        if dot(B[k], x) < 0:
            x = tuple(-y for y in x)
        rays.append(x)
        zeros.append(frozenset(basis_rows[j] for j in range(d) if j != k))

    processed = set(basis_rows)
    for i, row in enumerate(A):
        if i in processed:
            continue
        vals = [dot(row, r) for r in rays]
        pos = [j for j, v in enumerate(vals) if v > 0]
        neg = [j for j, v in enumerate(vals) if v < 0]
        zer = [j for j, v in enumerate(vals) if v == 0]
        new_rays = [rays[j] for j in pos] + [rays[j] for j in zer]
        new_zeros = [zeros[j] for j in pos] + [zeros[j] | {i} for j in zer]
        for p in pos:
            for q in neg:
                common = zeros[p] & zeros[q]
                if len(common) < d - 2:
                    continue
                if any(
                    t != p and t != q and common <= zeros[t] for t in range(len(rays))
                ):
                    continue
                a, b = vals[p], vals[q]
                r = tuple(a * y - b * x for x, y in zip(rays[p], rays[q]))
                new_rays.append(primitive(r))
                new_zeros.append(common | {i})
        rays, zeros = new_rays, new_zeros
        processed.add(i)
    return rays


class PolyCone:
    """The cone generated by integer vectors in Q^n.

    Facets and extreme rays are computed lazily.  ``equations`` spans the
    orthogonal complement of the linear span.
    """

    def __init__(self, generators, ambient_dim: int):
        self.ambient_dim = ambient_dim
        self.generators = [tuple(int(x) for x in g) for g in generators]
        nonzero = [g for g in self.generators if not is_zero(g)]
        if nonzero:
            _, pivots = echelon(nonzero, ambient_dim)
        else:
            pivots = []
        self._pivots = pivots
        self.dim = len(pivots)

    def __repr__(self):
        return f"PolyCone({self.generators!r}, dim={self.dim})"

    @cached_property
    def equations(self) -> list[tuple[int, ...]]:
        nonzero = [g for g in self.generators if not is_zero(g)]
        if not nonzero:
            return [
                tuple(int(i == j) for j in range(self.ambient_dim))
                for i in range(self.ambient_dim)
            ]
        return integer_kernel_rational(nonzero, self.ambient_dim)

    @cached_property
    def facet_normals(self) -> list[tuple[int, ...]]:
        """Primitive inward normals, one per facet, supported on the pivot
        coordinates of the span (so they vanish on nothing in the span)."""
        if self.dim == 0:
            return []
        projected = [tuple(g[c] for c in self._pivots) for g in self.generators]
        dual = dd_extreme_rays(projected, self.dim)
        normals = []
        for u in dual:
            full = [0] * self.ambient_dim
            for c, x in zip(self._pivots, u):
                full[c] = x
            normals.append(tuple(full))
        return sorted(normals)

    @cached_property
    def lineality_dim(self) -> int:
        if self.dim == 0:
            return 0
        normals = self.facet_normals
        if not normals:
            return self.dim
        proj = [tuple(u[c] for c in self._pivots) for u in normals]
        return self.dim - rank(proj, self.dim)

    @property
    def is_pointed(self) -> bool:
        return self.lineality_dim == 0

    @cached_property
    def lineality_basis(self) -> list[tuple[int, ...]]:
        """Integer basis of the largest linear subspace inside the cone."""
        if self.lineality_dim == 0:
            return []
        rows = list(self.equations) + list(self.facet_normals)
        return integer_kernel(rows, self.ambient_dim)

    def facets(self) -> list[tuple[tuple[int, ...], frozenset[int]]]:
        """``(normal, tight generator indices)`` per facet."""
        return [
            (u, frozenset(i for i, g in enumerate(self.generators) if dot(u, g) == 0))
            for u in self.facet_normals
        ]

    @cached_property
    def extreme_generators(self) -> list[int]:
        """Indices of generators spanning extreme rays (first of duplicates).

        Only meaningful for pointed cones.
        """
        if not self.is_pointed:
            raise ValueError("cone contains a line")
        out = []
        seen = set()
        for i, g in enumerate(self.generators):
            if is_zero(g):
                continue
            p = primitive(g)
            if p in seen:
                continue
            tight = [u for u in self.facet_normals if dot(u, g) == 0]
            proj = [tuple(u[c] for c in self._pivots) for u in tight]
            tight_rank = rank(proj, self.dim) if proj else 0
            if tight_rank == self.dim - 1:
                out.append(i)
                seen.add(p)
        return out

    @cached_property
    def extreme_rays(self) -> list[tuple[int, ...]]:
        return [primitive(self.generators[i]) for i in self.extreme_generators]

    def contains(self, v) -> bool:
        if any(dot(e, v) != 0 for e in self.equations):
            return False
        return all(dot(u, v) >= 0 for u in self.facet_normals)

    def in_relative_interior(self, v) -> bool:
        if any(dot(e, v) != 0 for e in self.equations):
            return False
        return all(dot(u, v) > 0 for u in self.facet_normals)

    def face_of(self, indices) -> frozenset[int]:
        """Generator indices of the smallest face containing the given ones."""
        idx = frozenset(indices)
        face = frozenset(range(len(self.generators)))
        for u, tight in self.facets():
            if idx <= tight:
                face &= tight
        return face


def intersection_rays(c1: PolyCone, c2: PolyCone) -> list[tuple[int, ...]]:
    """Extreme rays of the intersection of two pointed cones."""
    n = c1.ambient_dim
    eqs = list(c1.equations) + list(c2.equations)
    K = integer_kernel(eqs, n) if eqs else [
        tuple(int(i == j) for j in range(n)) for i in range(n)
    ]
    k = len(K)
    if k == 0:
        return []
    ineqs = list(c1.facet_normals) + list(c2.facet_normals)
    # x = sum_j y_j K_j
    A = [tuple(dot(u, Kj) for Kj in K) for u in ineqs]
    A = [row for row in A if not is_zero(row)]
    if rank(A, k) < k:
        raise ValueError("intersection contains a line")
    out = []
    for y in dd_extreme_rays(A, k):
        x = tuple(sum(yj * Kj[i] for yj, Kj in zip(y, K)) for i in range(n))
        out.append(primitive(x))
    return sorted(out)


def nonnegative_combination(generators, v):
    """Nonnegative rational coefficients expressing ``v`` in the cone, or None.

    Carathéodory search over linearly independent subsets spanning the
    cone's linear span.
    """
    gens = [tuple(g) for g in generators]
    if is_zero(v):
        return tuple(Fraction(0) for _ in gens)
    n = len(v)
    d = rank(gens, n) if gens else 0
    for sub in combinations(range(len(gens)), d):
        cols = [gens[i] for i in sub]
        if rank(cols, n) < d:
            continue
        A = list(zip(*cols))
        sol = solve_affine(A, v)
        if sol is None:
            return None  # v is outside the span
        x, _ = sol
        if all(c >= 0 for c in x):
            coeffs = [Fraction(0)] * len(gens)
            for i, c in zip(sub, x):
                coeffs[i] = c
            return tuple(coeffs)
    return None
