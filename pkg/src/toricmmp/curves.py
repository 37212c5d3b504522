"""Intersection numbers with invariant curves and the Mori cone."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .divisors import (
    CartierData,
    PicardBasis,
    add,
    canonical_divisor,
    divisor,
    picard_basis,
    q_cartier_data,
)
from .errors import NotExtremalError, NotQCartierError, PreconditionError
from .fan import Fan, Wall
from .linalg import dot, is_zero, primitive, rank, scale_to_integer
from .polyhedral import PolyCone


def intersect(f: Fan, D, wall: Wall, data: CartierData | None = None, w_ray=None) -> Fraction:
    """D . C_wall for a Q-Cartier divisor ``D``.

    ``w_ray`` optionally picks the ray of the second coface used in the
    formula; the answer does not depend on it.
    """
    if data is None:
        data = q_cartier_data(f, D)
        if data is None:
            raise NotQCartierError("not Q-Cartier")
    s, t = wall.cofaces
    diff = tuple(a - b for a, b in zip(data.functionals[t], data.functionals[s]))
    if w_ray is None:
        w_ray = next(i for i in f.cones[t] if i not in wall.rays)
    w = f.rays[w_ray]
    k = abs(dot(wall.normal, w))
    return Fraction(dot(diff, w)) / k


def curve_class(f: Fan, wall: Wall, basis: PicardBasis, datas=None) -> tuple[Fraction, ...]:
    if datas is None:
        datas = [q_cartier_data(f, B) for B in basis.basis]
    return tuple(intersect(f, B, wall, data=d) for B, d in zip(basis.basis, datas))


def curve_classes(f: Fan, basis: PicardBasis) -> list[tuple[Fraction, ...]]:
    datas = [q_cartier_data(f, B) for B in basis.basis]
    return [curve_class(f, w, basis, datas) for w in f.walls]


def _same_ray(a, b) -> bool:
    """Positive proportionality of two nonzero vectors."""
    return not is_zero(a) and not is_zero(b) and primitive(a) == primitive(b)


@dataclass(frozen=True)
class MoriCone:
    """NE(X) spanned by the classes of the invariant wall curves."""

    fan: Fan
    basis: PicardBasis
    classes: tuple[tuple[Fraction, ...], ...]  # per wall, in fan.walls order
    rays: tuple[tuple[int, ...], ...]
    walls_on_ray: tuple[tuple[int, ...], ...]  # wall indices per ray
    facet_normals: tuple[tuple[int, ...], ...]

    def ray_index(self, r) -> int:
        for i, ray in enumerate(self.rays):
            if _same_ray(ray, r):
                return i
        raise NotExtremalError(f"not an extremal ray: {tuple(r)}")

    def face_containing(self, vectors) -> tuple[int, list[tuple[int, ...]]]:
        """Dimension and extremal rays of the smallest face containing the
        given classes."""
        vecs = [scale_to_integer(v) for v in vectors]
        rays = list(self.rays)
        for u in self.facet_normals:
            if all(dot(u, v) == 0 for v in vecs):
                rays = [r for r in rays if dot(u, r) == 0]
        return rank(rays, self.basis.dimension) if rays else 0, rays


def mori_cone(f: Fan, basis: PicardBasis | None = None) -> MoriCone:
    if basis is None:
        basis = picard_basis(f)
    classes = curve_classes(f, basis)
    p = basis.dimension
    gens = [scale_to_integer(c) for c in classes]
    pc = PolyCone(gens, p)
    if pc.dim and not pc.is_pointed:
        raise PreconditionError("NE(X) contains a line; the fan is not projective")
    rays = sorted(pc.extreme_rays)
    on = tuple(
        tuple(i for i, c in enumerate(classes) if _same_ray(c, r)) for r in rays
    )
    return MoriCone(f, basis, tuple(classes), tuple(rays), on, tuple(pc.facet_normals))


def k_class(f: Fan, basis: PicardBasis, boundary=None) -> tuple[Fraction, ...]:
    K = canonical_divisor(f)
    if boundary is not None:
        K = add(K, divisor(boundary))
    return basis.class_of(K)


def k_negative_rays(f: Fan, boundary=None, cone: MoriCone | None = None):
    """Each extremal ray of NE(X) with the sign of (K+B) on it."""
    if cone is None:
        cone = mori_cone(f)
    K = canonical_divisor(f)
    if boundary is not None:
        K = add(K, divisor(boundary))
    if q_cartier_data(f, K) is None:
        raise NotQCartierError("K_X is not Q-Cartier" if boundary is None else "K_X+B is not Q-Cartier")
    kc = cone.basis.class_of(K)
    out = []
    for r in cone.rays:
        v = dot(kc, r)
        out.append((r, (v > 0) - (v < 0)))
    return out
