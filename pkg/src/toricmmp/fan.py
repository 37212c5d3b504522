"""Cones and fans in a lattice Z^n, with walls and fan-axiom validation."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

from .errors import FanError
from .linalg import (
    bareiss_det,
    dot,
    integer_kernel_rational,
    is_zero,
    primitive,
    rank,
    saturation_index,
    vec_gcd,
)
from .polyhedral import PolyCone, intersection_rays, nonnegative_combination


@dataclass(frozen=True)
class Wall:
    """A codimension-one cone shared by exactly two maximal cones.

    ``normal`` is the primitive functional vanishing on the wall and
    nonnegative on the first coface; ``lattice_basis`` spans the saturated
    lattice of the wall.
    """

    cofaces: tuple[int, int]
    rays: tuple[int, ...]
    lattice_basis: tuple[tuple[int, ...], ...]
    normal: tuple[int, ...]

    def name(self, labels) -> str:
        return curve_name(labels, self.rays)


def curve_name(labels, rays) -> str:
    """``C34`` when every label is e<digit>, otherwise ``C(a,b)``."""
    names = [labels[i] for i in rays]
    if all(re.fullmatch(r"e\d", s) for s in names):
        return "C" + "".join(s[1:] for s in names)
    return "C(" + ",".join(names) + ")"


@dataclass(frozen=True)
class ConeProperties:
    simplicial: bool
    smooth: bool
    multiplicity: int | None


@dataclass(frozen=True, eq=False)
class Fan:
    """A fan given by primitive rays and maximal cones (ray-index tuples)."""

    rank: int
    rays: tuple[tuple[int, ...], ...]
    cones: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple(tuple(int(x) for x in r) for r in self.rays))
        object.__setattr__(
            self, "cones", tuple(tuple(sorted(int(i) for i in c)) for c in self.cones)
        )
        if not self.labels:
            object.__setattr__(
                self, "labels", tuple(f"e{i + 1}" for i in range(len(self.rays)))
            )
        else:
            object.__setattr__(self, "labels", tuple(self.labels))

    def __eq__(self, other):
        if not isinstance(other, Fan):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def key(self):
        """Order-independent identity: the set of cones as sets of ray vectors."""
        return (
            self.rank,
            frozenset(self.rays),
            frozenset(frozenset(self.rays[i] for i in c) for c in self.cones),
        )

    def __repr__(self):
        return f"Fan(rank={self.rank}, rays={len(self.rays)}, cones={self.cone_names()})"

    def cone_name(self, cone) -> str:
        return "C(" + ",".join(self.labels[i] for i in cone) + ")"

    def cone_names(self) -> list[str]:
        return [self.cone_name(c) for c in self.cones]

    def ray_index(self, v) -> int:
        return self.rays.index(tuple(v))

    def polycone(self, k: int) -> PolyCone:
        return self._polycones[k]

    @cached_property
    def _polycones(self):
        return [PolyCone([self.rays[i] for i in c], self.rank) for c in self.cones]

    def facets(self, k: int) -> list[tuple[int, ...]]:
        """Facets of maximal cone ``k`` as sorted global ray-index tuples."""
        pc = self.polycone(k)
        cone = self.cones[k]
        return sorted(tuple(sorted(cone[i] for i in tight)) for _, tight in pc.facets())

    @cached_property
    def _face_cofaces(self) -> dict[tuple[int, ...], list[int]]:
        table: dict[tuple[int, ...], list[int]] = {}
        for k, cone in enumerate(self.cones):
            if len(cone) == 0 or self.polycone(k).dim != self.rank:
                continue
            for f in self.facets(k):
                table.setdefault(f, []).append(k)
        return table

    @cached_property
    def walls(self) -> tuple[Wall, ...]:
        """Interior codimension-one faces, sorted by ray indices."""
        out = []
        for face, cofaces in sorted(self._face_cofaces.items()):
            if len(cofaces) != 2:
                continue
            vecs = [self.rays[i] for i in face]
            independent = _independent_subset(vecs, self.rank)
            _, basis = saturation_index(independent)
            (normal,) = integer_kernel_rational(vecs, self.rank)
            i, j = sorted(cofaces)
            other = next(r for r in self.cones[i] if r not in face)
            if dot(normal, self.rays[other]) < 0:
                normal = tuple(-x for x in normal)
            out.append(Wall((i, j), face, tuple(basis), normal))
        return tuple(out)

    def wall_by_rays(self, *indices) -> Wall:
        key = tuple(sorted(indices))
        for w in self.walls:
            if w.rays == key:
                return w
        raise KeyError(f"no wall with rays {key}")

    def is_complete(self) -> bool:
        """Every maximal cone full-dimensional and every facet shared twice."""
        if not self.cones:
            return False
        if any(self.polycone(k).dim != self.rank for k in range(len(self.cones))):
            return False
        return all(len(c) == 2 for c in self._face_cofaces.values())

    def cone_properties(self) -> list[ConeProperties]:
        return [self.properties_of(k) for k in range(len(self.cones))]

    def properties_of(self, k: int) -> ConeProperties:
        vecs = [self.rays[i] for i in self.cones[k]]
        d = rank(vecs, self.rank)
        if len(vecs) != d:
            return ConeProperties(False, False, None)
        index, _ = saturation_index(vecs)
        return ConeProperties(True, index == 1, index)

    def is_simplicial(self) -> bool:
        return all(p.simplicial for p in self.cone_properties())

    def contains(self, k: int, v):
        """Membership of ``v`` in maximal cone ``k`` with a certificate.

        Returns ``(True, coefficients)`` with nonnegative rationals over the
        cone's rays, or ``(False, None)``.
        """
        pc = self.polycone(k)
        if not pc.contains(v):
            return False, None
        coeffs = nonnegative_combination([self.rays[i] for i in self.cones[k]], v)
        return True, coeffs

    def find_cone(self, v) -> int:
        """Index of the first maximal cone containing ``v``."""
        for k in range(len(self.cones)):
            if self.polycone(k).contains(v):
                return k
        raise FanError(f"vector {tuple(v)} lies outside the support of the fan")

    def rays_of(self, k: int) -> list[tuple[int, ...]]:
        return [self.rays[i] for i in self.cones[k]]


def _independent_subset(vecs, n):
    chosen = []
    for v in vecs:
        if rank(chosen + [v], n) > len(chosen):
            chosen.append(v)
    return chosen


def validate_fan(f: Fan) -> str | None:
    """Check the fan axioms; return None when valid, else a diagnostic."""
    if f.rank < 1:
        return "rank must be positive"
    if not f.cones:
        return "fan has no maximal cones"
    for i, r in enumerate(f.rays):
        if len(r) != f.rank:
            return f"ray {f.labels[i]} has length {len(r)}, expected {f.rank}"
        if is_zero(r):
            return f"ray {f.labels[i]} is zero"
        if vec_gcd(r) != 1:
            return f"ray {f.labels[i]} = {r} is not primitive"
    if len(set(f.rays)) != len(f.rays):
        return "rays are not distinct"
    used = set()
    for k, cone in enumerate(f.cones):
        if not cone:
            return f"maximal cone #{k} is empty"
        if len(set(cone)) != len(cone):
            return f"cone #{k} repeats a ray"
        for i in cone:
            if not 0 <= i < len(f.rays):
                return f"cone #{k} references ray index {i} out of range"
        used.update(cone)
    for k, cone in enumerate(f.cones):
        pc = f.polycone(k)
        if not pc.is_pointed:
            return f"{f.cone_name(cone)} is not strongly convex"
        if len(pc.extreme_generators) != len(cone):
            return f"{f.cone_name(cone)} lists a ray that is not extreme"
    unused = [f.labels[i] for i in range(len(f.rays)) if i not in used]
    if unused:
        return f"rays {unused} appear in no maximal cone"
    for a, b in combinations(range(len(f.cones)), 2):
        msg = _check_pair(f, a, b)
        if msg:
            return msg
    return None


def _check_pair(f: Fan, a: int, b: int) -> str | None:
    ca, cb = f.cones[a], f.cones[b]
    pa, pb = f.polycone(a), f.polycone(b)
    names = f"{f.cone_name(ca)} and {f.cone_name(cb)}"
    if all(pb.contains(f.rays[i]) for i in ca):
        return f"maximal cone contained in another: {names}"
    if all(pa.contains(f.rays[i]) for i in cb):
        return f"maximal cone contained in another: {names}"
    common = set(ca) & set(cb)
    if _separated(f, ca, cb, pa, pb, common):
        return None
    common_vecs = {f.rays[i] for i in common}
    for r in intersection_rays(pa, pb):
        if r not in common_vecs:
            return f"intersection not a face: {names}"
    for cone, pc in ((ca, pa), (cb, pb)):
        local = [cone.index(i) for i in common]
        if set(pc.face_of(local)) != set(local):
            return f"intersection not a face: {names}"
    return None


def _separated(f: Fan, ca, cb, pa, pb, common) -> bool:
    """Cheap certificate: a facet normal u >= 0 on one cone and <= 0 on the
    other whose zero sets in both are exactly the common rays.  Then both
    cones meet u-perp in cone(common), so they intersect in a common face."""
    for u, sign in [(u, 1) for u in pa.facet_normals] + [(u, -1) for u in pb.facet_normals]:
        va = [sign * dot(u, f.rays[i]) for i in ca]
        vb = [sign * dot(u, f.rays[i]) for i in cb]
        if min(va) < 0 or max(vb) > 0:
            continue
        if {i for i, v in zip(ca, va) if v == 0} == common == {i for i, v in zip(cb, vb) if v == 0}:
            return True
    return False


def check_fan(f: Fan) -> Fan:
    msg = validate_fan(f)
    if msg:
        raise FanError(msg)
    return f


def make_fan(rank: int, ray_vectors, cones_as_vectors, labels=None) -> Fan:
    """Build a fan from cones given as lists of (not necessarily primitive)
    vectors, deduplicating and normalising rays on ingestion."""
    rays: list[tuple[int, ...]] = []
    lab: list[str] = []
    index: dict[tuple[int, ...], int] = {}
    for j, v in enumerate(ray_vectors):
        p = primitive(v)
        if p not in index:
            index[p] = len(rays)
            rays.append(p)
            if labels:
                lab.append(labels[j])
    cones = []
    for c in cones_as_vectors:
        idx = []
        for v in c:
            p = primitive(v)
            if p not in index:
                index[p] = len(rays)
                rays.append(p)
                if labels:
                    lab.append(f"e{len(rays)}")
            idx.append(index[p])
        cones.append(tuple(sorted(set(idx))))
    return Fan(rank, tuple(rays), tuple(cones), tuple(lab) if labels else ())


def simplex_multiplicity(vectors) -> int:
    return abs(bareiss_det(vectors))
