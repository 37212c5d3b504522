"""Torus-invariant divisors: Q-Cartier data, the rational Picard group,
pushforward and pullback along toric contractions.

A divisor is a tuple of rationals, one coefficient per ray of its fan.
Support functions take the coefficient itself as value on each ray.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import FanError, NotQCartierError
from .fan import Fan
from .linalg import dot, kernel, rank, solve_affine, to_fraction

Divisor = tuple


def divisor(coeffs) -> Divisor:
    return tuple(to_fraction(c) for c in coeffs)


def canonical_divisor(f: Fan) -> Divisor:
    return tuple(Fraction(-1) for _ in f.rays)


def principal_divisor(f: Fan, u) -> Divisor:
    """The divisor of the character ``u``: coefficient <u, v_rho> at rho."""
    return tuple(Fraction(dot(u, r)) for r in f.rays)


def add(*divs) -> Divisor:
    return tuple(sum(cs, Fraction(0)) for cs in zip(*divs))


def scale(q, D) -> Divisor:
    q = to_fraction(q)
    return tuple(q * c for c in D)


def is_effective(D) -> bool:
    return all(c >= 0 for c in D)


def coordinate_divisor(f: Fan, i: int) -> Divisor:
    return tuple(Fraction(int(j == i)) for j in range(len(f.rays)))


@dataclass(frozen=True)
class CartierData:
    """One linear functional per maximal cone reproducing the coefficients."""

    fan: Fan
    divisor: Divisor
    functionals: tuple[tuple[Fraction, ...], ...]

    def value(self, w) -> Fraction:
        """Value of the support function at a point of the fan's support."""
        k = self.fan.find_cone(w)
        return Fraction(dot(self.functionals[k], w))

    def functional_at(self, k: int):
        return self.functionals[k]


def q_cartier_data(f: Fan, D) -> CartierData | None:
    D = divisor(D)
    if len(D) != len(f.rays):
        raise ValueError("divisor length does not match the ray count")
    cache = f.__dict__.setdefault("_cartier_cache", {})
    if D not in cache:
        cache[D] = _q_cartier_data(f, D)
    return cache[D]


def _q_cartier_data(f: Fan, D) -> CartierData | None:
    ms = []
    for cone in f.cones:
        A = [f.rays[i] for i in cone]
        sol = solve_affine(A, [D[i] for i in cone])
        if sol is None:
            return None
        ms.append(sol[0])
    return CartierData(f, D, tuple(ms))


def require_cartier(f: Fan, D) -> CartierData:
    data = q_cartier_data(f, D)
    if data is None:
        raise NotQCartierError("not Q-Cartier")
    return data


def cartier_constraints(f: Fan) -> list[tuple[Fraction, ...]]:
    """Linear forms on coefficient vectors cutting out the Q-Cartier divisors.

    One form per linear relation among the rays of a maximal cone.
    """
    r = len(f.rays)
    out = []
    for cone in f.cones:
        A = [f.rays[i] for i in cone]
        # left kernel: relations sum lambda_i v_i = 0
        for lam in kernel(list(zip(*A)), len(cone)):
            full = [Fraction(0)] * r
            for i, c in zip(cone, lam):
                full[i] = c
            out.append(tuple(full))
    return out


def is_q_cartier(f: Fan, D) -> bool:
    return q_cartier_data(f, D) is not None


@dataclass(frozen=True)
class PicardBasis:
    """A basis of Pic(X)_Q given by Q-Cartier representative divisors."""

    fan: Fan
    basis: tuple[Divisor, ...]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def class_of(self, D) -> tuple[Fraction, ...]:
        """Coordinates of the class of ``D`` in this basis."""
        D = divisor(D)
        if not is_q_cartier(self.fan, D):
            raise NotQCartierError("not Q-Cartier")
        n = self.fan.rank
        # D = sum c_i B_i + div(chi^u), solved for (c, u)
        cols = list(self.basis) + [
            tuple(Fraction(r[j]) for r in self.fan.rays) for j in range(n)
        ]
        A = list(zip(*cols))
        sol = solve_affine(A, D)
        if sol is None:
            raise NotQCartierError("divisor is not in the span of the basis")
        x, _ = sol
        return tuple(x[: self.dimension])

    def divisor_of(self, coords) -> Divisor:
        return add(*(scale(c, B) for c, B in zip(coords, self.basis))) if self.basis else tuple(
            Fraction(0) for _ in self.fan.rays
        )


def picard_basis(f: Fan, preferred=None) -> PicardBasis:
    """Choose a basis of Pic(X)_Q.

    ``preferred`` (a list of divisors) is used verbatim when given.  Otherwise
    a registered reference basis is used if the fan matches one, and failing
    that the Q-Cartier coordinate divisors are taken greedily in ray order,
    topped up from a kernel basis of the Cartier constraints.
    """
    if preferred is None:
        from .presets import preferred_basis

        preferred = preferred_basis(f)
    n = f.rank
    principal = [tuple(Fraction(r[j]) for r in f.rays) for j in range(n)]
    p_rank = rank(principal, len(f.rays))
    constraints = cartier_constraints(f)
    cdiv = kernel(constraints, len(f.rays)) if constraints else [
        coordinate_divisor(f, i) for i in range(len(f.rays))
    ]
    dim = len(cdiv) - p_rank
    if preferred is not None:
        basis = [divisor(B) for B in preferred]
        for B in basis:
            if not is_q_cartier(f, B):
                raise NotQCartierError("preferred basis divisor is not Q-Cartier")
        if len(basis) != dim or rank(principal + basis, len(f.rays)) != p_rank + dim:
            raise ValueError("preferred divisors do not form a basis of Pic(X)_Q")
        return PicardBasis(f, tuple(basis))
    candidates = [
        coordinate_divisor(f, i)
        for i in range(len(f.rays))
        if is_q_cartier(f, coordinate_divisor(f, i))
    ] + list(cdiv)
    chosen: list[Divisor] = []
    for B in candidates:
        if len(chosen) == dim:
            break
        if rank(principal + chosen + [B], len(f.rays)) > p_rank + len(chosen):
            chosen.append(B)
    return PicardBasis(f, tuple(chosen))


def _ray_map(source: Fan, target: Fan) -> list[int | None]:
    """For each source ray, the index of the same vector in the target."""
    index = {r: i for i, r in enumerate(target.rays)}
    return [index.get(r) for r in source.rays]


def pushforward(D, source: Fan, target: Fan) -> Divisor:
    """Drop coefficients of rays that the target no longer has."""
    D = divisor(D)
    src_index = {r: i for i, r in enumerate(source.rays)}
    if any(r not in src_index for r in target.rays):
        raise FanError("target rays are not a subset of source rays")
    return tuple(D[src_index[r]] for r in target.rays)


def pullback(D, source: Fan, target: Fan) -> Divisor:
    """Pull a Q-Cartier divisor on ``target`` back along source -> target.

    The coefficient at a source ray is the target support function there.
    """
    data = q_cartier_data(target, D)
    if data is None:
        raise NotQCartierError("not Q-Cartier")
    out = []
    for k, cone in enumerate(source.cones):
        if not any(
            all(target.polycone(j).contains(source.rays[i]) for i in cone)
            for j in range(len(target.cones))
        ):
            raise FanError(
                f"source cone {source.cone_name(cone)} lies in no target cone"
            )
    for w in source.rays:
        out.append(data.value(w))
    return tuple(out)


def contraction_discrepancy_divisor(source: Fan, target: Fan, boundary=None) -> Divisor:
    """E = (K_X + B) - pullback(K_Y + B_Y) for a birational toric map."""
    KX = canonical_divisor(source)
    if boundary is not None:
        KX = add(KX, divisor(boundary))
    KY = pushforward(KX, source, target)
    if not is_q_cartier(target, KY):
        raise NotQCartierError("K_Y not Q-Cartier")
    return add(KX, scale(-1, pullback(KY, source, target)))
