"""Fixed-point data and local/global Lefschetz numbers."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .ratfun import (LaurentPoly, Monomial, PoleError, RatFun, VarTable, elementary_symmetric,
                     inversion, rf_eq, rf_eval, rf_subst)

ATTRACTING, EXPANDING = "attracting", "expanding"


@dataclass(frozen=True)
class SmoothWeights:
    weights: tuple
    bundle_trace: LaurentPoly | None = None

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        for w in self.weights:
            if w.is_unital:
                raise ValueError("smooth weight 1 means the fixed point is not simple")

    @property
    def dim(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class FreeModuleSummand:
    generator: Monomial
    ring_chars: tuple

    def __post_init__(self):
        object.__setattr__(self, "ring_chars", tuple(self.ring_chars))
        for r in self.ring_chars:
            if r.is_unital:
                raise ValueError("a free ring variable cannot have trivial character")

    def trace(self) -> RatFun:
        return RatFun(LaurentPoly.mono(self.generator), self.ring_chars)


@dataclass(frozen=True)
class ModuleDatum:
    """Local cohomology per degree ``q`` as a direct sum of free monomial modules."""

    per_degree: Mapping[int, tuple] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for q, summands in self.per_degree.items():
            if q < 0:
                raise ValueError("cohomology degree must be non-negative")
            clean[int(q)] = tuple(summands)
        object.__setattr__(self, "per_degree", clean)


@dataclass(frozen=True)
class CompleteIntersectionDatum:
    ambient_weights: tuple
    defining_weights: tuple = ()
    bundle_trace: LaurentPoly | None = None

    def __post_init__(self):
        object.__setattr__(self, "ambient_weights", tuple(self.ambient_weights))
        object.__setattr__(self, "defining_weights", tuple(self.defining_weights))
        for w in self.ambient_weights + self.defining_weights:
            if w.is_unital:
                raise ValueError("complete-intersection weights must be non-trivial")


def woods_hole(w: SmoothWeights, p: int, vt: VarTable | None = None) -> RatFun:
    """``trace * e_p(weights) / prod(1 - weight)``."""
    vt = vt or (w.weights[0].vt if w.weights else w.bundle_trace.vt)
    if not 0 <= p <= w.dim:
        raise ValueError(f"p={p} out of range 0..{w.dim}")
    num = elementary_symmetric(w.weights, p, vt)
    if w.bundle_trace is not None:
        num = num * w.bundle_trace
    return RatFun(num, w.weights)


def module_lefschetz(m: ModuleDatum, vt: VarTable) -> RatFun:
    out = RatFun.const(vt, 0)
    for q, summands in sorted(m.per_degree.items()):
        for s in summands:
            t = s.trace()
            out = out + (t if q % 2 == 0 else -t)
    return out


def module_poly_lefschetz(m: ModuleDatum, vt: VarTable) -> RatFun:
    """Same traces graded by ``b^q`` instead of ``(-1)^q``."""
    out = RatFun.const(vt, 0)
    for q, summands in sorted(m.per_degree.items()):
        bq = RatFun.mono(vt.var("b", q))
        for s in summands:
            out = out + bq * s.trace()
    return out


def bfq_local(c: CompleteIntersectionDatum, vt: VarTable) -> RatFun:
    num = LaurentPoly.const(vt, 1)
    for b in c.defining_weights:
        num = num * (LaurentPoly.const(vt, 1) - LaurentPoly.mono(b))
    if c.bundle_trace is not None:
        num = num * c.bundle_trace
    return RatFun(num, c.ambient_weights)


def dualize(local: RatFun, n_parity: int, inv: Mapping[str, Monomial] | None) -> RatFun:
    """``(-1)^n * local`` with the substitution ``inv`` applied (``None`` means no substitution)."""
    out = rf_subst(local, inv) if inv else local
    return -out if n_parity % 2 else out


def product_local(l1: RatFun, l2: RatFun, m: int) -> RatFun:
    out = l1 * l2
    return -out if m % 2 else out


def global_sum(locals_: Sequence[RatFun], vt: VarTable | None = None) -> RatFun:
    if not locals_:
        if vt is None:
            raise ValueError("need a variable table to sum an empty list")
        return RatFun.const(vt, 0)
    out = locals_[0]
    for f in locals_[1:]:
        out = out + f
    return out


@dataclass
class FixedPointDatum:
    """One fixed point.

    ``smooth`` gives Woods Hole data valid for every ``p``; ``modules`` gives
    local cohomology per Hodge degree ``p``.  An expanding point supplies data
    for the adjoint complex: its numbers are multiplied by
    ``(-1)^dual_degree`` and, if ``invert`` is set, the torus variables are
    inverted.  A ``product`` split ``(first, second, m)`` combines the two
    factors Kunneth-style with the extra sign ``(-1)^m``.
    """

    name: str
    vt: VarTable
    smooth: SmoothWeights | None = None
    modules: dict = field(default_factory=dict)
    bfq: CompleteIntersectionDatum | None = None
    side: str = ATTRACTING
    dual_degree: int = 0
    invert: bool = False
    product: tuple | None = None
    spin_half_char: Monomial | None = None
    spin_sign: int = 1
    sign: int = 1  # user-supplied orientation sign

    def __post_init__(self):
        if self.side not in (ATTRACTING, EXPANDING):
            raise ValueError(f"side must be {ATTRACTING!r} or {EXPANDING!r}")
        kinds = sum(x is not None and x != {} for x in (self.smooth, self.modules or None,
                                                          self.product))
        if kinds > 1:
            raise ValueError(f"fixed point {self.name!r}: give only one of smooth, modules, product")

    @property
    def dim(self) -> int | None:
        if self.smooth is not None:
            return self.smooth.dim
        if self.product is not None:
            a, b, _ = self.product
            return (a.dim or 0) + (b.dim or 0)
        return max(self.modules) if self.modules else None

    def hodge_degrees(self) -> list:
        if self.smooth is not None:
            return list(range(self.smooth.dim + 1))
        if self.product is not None:
            a, b, _ = self.product
            return sorted({i + j for i in a.hodge_degrees() for j in b.hodge_degrees()})
        return sorted(self.modules)

    def has_l2(self) -> bool:
        return self.smooth is not None or bool(self.modules) or self.product is not None

    def _finish(self, f: RatFun) -> RatFun:
        if self.side == EXPANDING:
            f = dualize(f, self.dual_degree, inversion(self.vt) if self.invert else None)
        return -f if self.sign < 0 else f

    def _raw(self, p: int, poly: bool) -> RatFun:
        vt = self.vt
        if self.smooth is not None:
            if not 0 <= p <= self.smooth.dim:
                return RatFun.const(vt, 0)
            return woods_hole(self.smooth, p, vt)
        if self.product is not None:
            a, b, m = self.product
            out = RatFun.const(vt, 0)
            for i in a.hodge_degrees():
                j = p - i
                if j in b.hodge_degrees():
                    la = a.local_poly(i) if poly else a.local(i)
                    lb = b.local_poly(j) if poly else b.local(j)
                    out = out + product_local(la, lb, m)
            return out
        if p not in self.modules:
            return RatFun.const(vt, 0)
        md = self.modules[p]
        return module_poly_lefschetz(md, vt) if poly else module_lefschetz(md, vt)

    def local(self, p: int = 0) -> RatFun:
        """Local L^2 Lefschetz number in Hodge degree ``p``."""
        return self._finish(self._raw(p, poly=False))

    def local_poly(self, p: int = 0) -> RatFun:
        """Lefschetz polynomial version (``b^q`` grading); smooth data sit in degree 0."""
        return self._finish(self._raw(p, poly=True))

    def bfq_local(self) -> RatFun:
        if self.bfq is None:
            raise LookupError(f"fixed point {self.name!r} has no complete-intersection data")
        return bfq_local(self.bfq, self.vt)

    def spin_local(self) -> RatFun:
        if self.spin_half_char is None:
            raise LookupError(f"fixed point {self.name!r} has no spin data")
        hol = self.local(0)
        out = hol * RatFun.mono(self.spin_half_char)
        return -out if self.spin_sign < 0 else out


@dataclass
class VerificationReport:
    equal: bool
    lhs: RatFun
    rhs: RatFun
    witnesses: list  # (point, lhs value, rhs value)

    def __bool__(self):
        return self.equal


def random_point(vt: VarTable, rng: random.Random, squares: bool = True) -> dict:
    """Random rational point; values are squares so half-integer powers evaluate exactly."""
    pt = {}
    for n in vt.names:
        v = Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 7))
        pt[n] = v * v if squares else v
    return pt


def verify_identity(lhs: RatFun, rhs: RatFun, n_witness: int = 5, seed: int = 0
                    ) -> VerificationReport:
    rng = random.Random(seed)
    witnesses = []
    tries = 0
    while len(witnesses) < n_witness and tries < 50 * n_witness:
        tries += 1
        pt = random_point(lhs.vt, rng)
        try:
            witnesses.append((pt, rf_eval(lhs, pt), rf_eval(rhs, pt)))
        except PoleError:
            continue
    return VerificationReport(rf_eq(lhs, rhs), lhs, rhs, witnesses)
