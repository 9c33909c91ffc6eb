"""Equivariant chi_y genera and the invariants derived from them."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as cartesian
from typing import Mapping, Sequence

from .ratfun import Monomial, RatFun, VarTable, inversion, rf_eq, rf_partial_eval, rf_subst


@dataclass(frozen=True)
class ChiY:
    value: RatFun
    n: int

    @property
    def vt(self) -> VarTable:
        return self.value.vt

    def __add__(self, other: "ChiY") -> "ChiY":
        return ChiY(self.value + other.value, max(self.n, other.n))


def chi_y_assemble(per_p: Mapping[int, RatFun], n: int, vt: VarTable | None = None) -> ChiY:
    """``sum_p y^p * per_p[p]``."""
    if vt is None:
        if not per_p:
            raise ValueError("need a variable table for an empty chi_y")
        vt = next(iter(per_p.values())).vt
    out = RatFun.const(vt, 0)
    for p, f in sorted(per_p.items()):
        if not 0 <= p <= n:
            raise ValueError(f"Hodge degree p={p} out of range 0..{n}")
        out = out + RatFun.mono(vt.var("y", p)) * f
    return ChiY(out, n)


def chi_y_duality_check(c: ChiY, inv: Mapping[str, Monomial] | None = None) -> bool:
    """Is ``chi_y == (-y)^n * chi_{1/y}`` evaluated at the inverse torus element?"""
    vt = c.vt
    inv = dict(inversion(vt) if inv is None else inv)
    inv["y"] = vt.var("y", -1)
    rhs = RatFun.mono(vt.var("y", c.n), (-1) ** c.n) * rf_subst(c.value, inv)
    return rf_eq(c.value, rhs)


def specialize(c: ChiY, y0) -> RatFun:
    return rf_partial_eval(c.value, {"y": Fraction(y0)})


def signature(c: ChiY) -> RatFun:
    return specialize(c, 1)


def euler(c: ChiY) -> RatFun:
    return specialize(c, -1)


def riemann_roch(c: ChiY) -> RatFun:
    return specialize(c, 0)


def sd_asd_indices(c: ChiY) -> tuple:
    e, s = euler(c), signature(c)
    return (e + s).scale(Fraction(1, 2)), (e - s).scale(Fraction(1, 2))


def sd_asd_duality_check(c: ChiY, var: str) -> bool:
    """Does unit-circle conjugation in ``var`` (``var -> 1/var``) carry ind_SD to ind_ASD?"""
    vt = c.vt
    if var not in vt.torus:
        raise KeyError(f"{var!r} is not a torus variable")
    sd, asd = sd_asd_indices(c)
    return rf_eq(asd, rf_subst(sd, {var: vt.var(var, -1)}))


def spin_local(hol: RatFun, half_char: Monomial) -> RatFun:
    return hol * RatFun.mono(half_char)


def spin_sign_search(hols: Sequence[RatFun], half_chars: Sequence[Monomial],
                     expected: RatFun) -> list:
    """All sign vectors ``s`` (first entry fixed to +1) with ``sum s_i hol_i half_i == expected``.

    Solutions come in global sign pairs; when ``expected`` is 0 both members of a pair work,
    so fixing the first sign loses nothing.
    """
    terms = [spin_local(h, c) for h, c in zip(hols, half_chars)]
    found = []
    for tail in cartesian((1, -1), repeat=max(len(terms) - 1, 0)):
        signs = (1,) + tail if terms else ()
        total = RatFun.const(expected.vt, 0)
        for s, t in zip(signs, terms):
            total = total + (t if s > 0 else -t)
        if rf_eq(total, expected):
            found.append(signs)
    return found
