"""The (log) Q-Gorenstein MMP loop with per-step certificates."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .contraction import (
    DIVISORIAL,
    FIBER,
    ContractionOutcome,
    DivisorialCertificate,
    FlipCertificate,
    FlipResult,
    contract_ray,
    flip,
    verify_divisorial,
    verify_flip,
)
from .curves import k_negative_rays, mori_cone
from .divisors import add, canonical_divisor, divisor, pushforward, q_cartier_data
from .errors import CertificateError, FanError, NotExtremalError, PreconditionError
from .fan import Fan, validate_fan
from .singularities import is_klt

log = logging.getLogger(__name__)

MINIMAL_MODEL = "minimal-model"
MORI_FIBER_SPACE = "mori-fiber-space"
ABORTED = "aborted"


@dataclass(frozen=True)
class RayPolicy:
    """How to pick among the offered (K+B)-negative rays.

    ``first``: the lexicographically smallest ray.  ``explicit``: the given
    indices, one per step, falling back to ``first`` once exhausted.
    ``interactive``: ``callback(step_number, offered_rays) -> index``.
    """

    kind: str = "first"
    indices: tuple[int, ...] = ()
    callback: Callable | None = None

    def choose(self, step: int, offered) -> int:
        if self.kind == "explicit" and step < len(self.indices):
            i = self.indices[step]
        elif self.kind == "interactive":
            i = self.callback(step, offered)
        else:
            i = 0
        if not 0 <= i < len(offered):
            raise PreconditionError(f"ray choice {i} out of range (offered {len(offered)})")
        return i


FIRST = RayPolicy()


def explicit(*indices) -> RayPolicy:
    return RayPolicy("explicit", tuple(indices))


@dataclass(frozen=True)
class MMPStep:
    number: int
    fan: Fan
    boundary: tuple[Fraction, ...] | None
    offered: tuple[tuple[int, ...], ...]
    chosen: int
    ray: tuple[int, ...]
    outcome: ContractionOutcome
    kind: str  # divisorial | flip | fiber
    divisorial: DivisorialCertificate | None = None
    flip: FlipResult | None = None
    flip_certificate: FlipCertificate | None = None
    output: Fan | None = None
    output_boundary: tuple[Fraction, ...] | None = None


@dataclass(frozen=True)
class MMPRun:
    start: Fan
    boundary: tuple[Fraction, ...] | None
    steps: tuple[MMPStep, ...]
    status: str
    final: Fan | None
    final_boundary: tuple[Fraction, ...] | None
    reason: str = ""

    @property
    def choices(self) -> tuple[int, ...]:
        return tuple(s.chosen for s in self.steps)


def _kb(f, boundary):
    K = canonical_divisor(f)
    return add(K, divisor(boundary)) if boundary is not None else K


def log_pushforward_boundary(boundary, outcome: ContractionOutcome):
    """Coefficients of the boundary on the rays that survive."""
    if boundary is None:
        return None
    return pushforward(boundary, outcome.source, outcome.target)


def offered_rays(f: Fan, boundary=None):
    cone = mori_cone(f)
    neg = [r for r, s in k_negative_rays(f, boundary, cone) if s < 0]
    return cone, neg


def step_mmp(f: Fan, boundary, ray, number: int = 0, chosen: int | None = None, cone=None) -> MMPStep:
    """Contract one (K+B)-negative extremal ray and certify the result."""
    boundary = divisor(boundary) if boundary is not None else None
    if cone is None:
        cone = mori_cone(f)
    neg = [r for r, s in k_negative_rays(f, boundary, cone) if s < 0]
    i = cone.ray_index(ray)
    r = cone.rays[i]
    if r not in neg:
        raise PreconditionError(f"ray {r} is not (K+B)-negative")
    if chosen is None:
        chosen = neg.index(r)
    outcome = contract_ray(f, r, cone=cone, boundary=boundary, require_k_negative=True)
    common = dict(number=number, fan=f, boundary=boundary, offered=tuple(neg), chosen=chosen, ray=r, outcome=outcome)
    if outcome.kind == FIBER:
        return MMPStep(kind=FIBER, output=outcome.target, **common)
    Y = outcome.target
    BY = log_pushforward_boundary(boundary, outcome)
    if outcome.kind == DIVISORIAL and q_cartier_data(Y, _kb(Y, BY)) is not None:
        cert = verify_divisorial(f, outcome, boundary)
        return MMPStep(kind=DIVISORIAL, divisorial=cert, output=Y, output_boundary=BY, **common)
    result = flip(f, outcome, boundary)
    region = [[Y.rays[j] for j in c] for c in result.region]
    fcert = verify_flip(
        f, result.fan, region, boundary=boundary, flipped_boundary=result.boundary, target=Y
    )
    return MMPStep(
        kind="flip",
        flip=result,
        flip_certificate=fcert,
        output=result.fan,
        output_boundary=result.boundary,
        **common,
    )


def run_mmp(f: Fan, boundary=None, policy: RayPolicy = FIRST, max_steps: int = 20) -> MMPRun:
    msg = validate_fan(f)
    if msg:
        raise FanError(msg)
    if not f.is_complete():
        raise PreconditionError("fan is not complete")
    boundary = divisor(boundary) if boundary is not None else None
    if boundary is None:
        if q_cartier_data(f, canonical_divisor(f)) is None:
            raise PreconditionError("K_X is not Q-Cartier")
    else:
        rep = is_klt(f, boundary)
        if not rep.klt:
            raise PreconditionError(f"pair is not klt: {rep.reason}")
    steps: list[MMPStep] = []
    fan, B = f, boundary
    for number in range(max_steps):
        cone, neg = offered_rays(fan, B)
        if not neg:
            return MMPRun(f, boundary, tuple(steps), MINIMAL_MODEL, fan, B)
        i = policy.choose(number, neg)
        try:
            step = step_mmp(fan, B, neg[i], number=number, chosen=i, cone=cone)
        except CertificateError as exc:
            log.error("step %d failed: %s", number, exc)
            return MMPRun(f, boundary, tuple(steps), ABORTED, fan, B, str(exc))
        steps.append(step)
        if step.kind == FIBER:
            return MMPRun(f, boundary, tuple(steps), MORI_FIBER_SPACE, fan, B)
        fan, B = step.output, step.output_boundary
    return MMPRun(f, boundary, tuple(steps), ABORTED, fan, B, f"max_steps={max_steps} exceeded")
