"""Exact Laurent polynomials and rational functions with (1 - monomial) denominators.

Exponents are stored doubled so that half-integer characters such as
``(lambda*mu)^(1/2)`` stay exact.  Denominators are kept in factored form and
never reduced by a GCD: two rational functions are compared by
cross-multiplication over the least common multiple of their factor multisets.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence, Union

RESERVED = ("y", "b")

Exp = tuple  # doubled exponent vector
Rational = Union[int, Fraction]


class VarTableMismatch(ValueError):
    pass


class PoleError(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class VarTable:
    """Ordered variable names; ``y`` and ``b`` are always appended last."""

    names: tuple

    def __init__(self, torus: Iterable[str] = ()):
        torus = tuple(torus)
        for r in RESERVED:
            if r in torus:
                raise ValueError(f"{r!r} is reserved")
        if len(set(torus)) != len(torus):
            raise ValueError(f"duplicate variable names in {torus}")
        object.__setattr__(self, "names", torus + RESERVED)

    @property
    def torus(self) -> tuple:
        return self.names[: -len(RESERVED)]

    @property
    def ntorus(self) -> int:
        return len(self.names) - len(RESERVED)

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}; known: {', '.join(self.names)}") from None

    def zero(self) -> Exp:
        return (0,) * len(self.names)

    def one(self) -> "Monomial":
        return Monomial(self, self.zero())

    def var(self, name: str, power: Rational = 1) -> "Monomial":
        return self.monomial({name: power})

    def monomial(self, exps: Mapping[str, Rational]) -> "Monomial":
        e = [0] * len(self.names)
        for name, p in exps.items():
            e[self.index(name)] += _double(p)
        return Monomial(self, tuple(e))


def _double(p) -> int:
    p = Fraction(p)
    d = 2 * p
    if d.denominator != 1:
        raise ValueError(f"exponent {p} is not a multiple of 1/2")
    return int(d)


def _check(a, b):
    if a.vt != b.vt:
        raise VarTableMismatch(f"variable tables differ: {a.vt.names} vs {b.vt.names}")


def _add_exp(a: Exp, b: Exp) -> Exp:
    return tuple(x + y for x, y in zip(a, b))


def _neg_exp(a: Exp) -> Exp:
    return tuple(-x for x in a)


def _is_canonical(e: Exp) -> bool:
    for x in e:
        if x:
            return x > 0
    return False


def _fmt_power(name: str, e2: int) -> str:
    if e2 == 2:
        return name
    if e2 % 2 == 0:
        return f"{name}^{e2 // 2}"
    return f"{name}^({e2}/2)"


@dataclass(frozen=True)
class Monomial:
    vt: VarTable
    exp2: Exp

    def __post_init__(self):
        if len(self.exp2) != len(self.vt):
            raise ValueError("exponent vector length does not match variable table")

    def __mul__(self, other: "Monomial") -> "Monomial":
        _check(self, other)
        return Monomial(self.vt, _add_exp(self.exp2, other.exp2))

    def __truediv__(self, other: "Monomial") -> "Monomial":
        return self * other.inverse()

    def __pow__(self, k: int) -> "Monomial":
        return Monomial(self.vt, tuple(k * x for x in self.exp2))

    def inverse(self) -> "Monomial":
        return Monomial(self.vt, _neg_exp(self.exp2))

    @property
    def is_unital(self) -> bool:
        return not any(self.exp2)

    @property
    def is_canonical(self) -> bool:
        return _is_canonical(self.exp2)

    def exponent(self, name: str) -> Fraction:
        return Fraction(self.exp2[self.vt.index(name)], 2)

    def torus_degree2(self) -> int:
        """Sum of doubled exponents over torus variables (``y`` and ``b`` excluded)."""
        return sum(self.exp2[: self.vt.ntorus])

    def as_dict(self) -> dict:
        return {n: Fraction(e, 2) for n, e in zip(self.vt.names, self.exp2) if e}

    def __str__(self):
        parts = [_fmt_power(n, e) for n, e in zip(self.vt.names, self.exp2) if e]
        return "*".join(parts) if parts else "1"

    def __repr__(self):
        return f"Monomial({self})"


class LaurentPoly:
    """Finite map doubled-exponent -> nonzero Fraction."""

    __slots__ = ("vt", "terms")

    def __init__(self, vt: VarTable, terms: Mapping[Exp, Rational] | None = None):
        self.vt = vt
        clean = {}
        for e, c in (terms or {}).items():
            if c:
                if len(e) != len(vt):
                    raise ValueError("exponent vector length does not match variable table")
                clean[tuple(e)] = Fraction(c)
        self.terms = clean

    @classmethod
    def const(cls, vt: VarTable, c: Rational) -> "LaurentPoly":
        return cls(vt, {vt.zero(): c})

    @classmethod
    def mono(cls, m: Monomial, c: Rational = 1) -> "LaurentPoly":
        return cls(m.vt, {m.exp2: c})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> Fraction:
        return self.terms.get(self.vt.zero(), Fraction(0))

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        _check(self, other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(self.vt, out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.vt, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        _check(self, other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = _add_exp(e1, e2)
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly(self.vt, out)

    def scale(self, c: Rational) -> "LaurentPoly":
        return LaurentPoly(self.vt, {e: c * v for e, v in self.terms.items()})

    def shift(self, m: Monomial) -> "LaurentPoly":
        """Multiply by a monomial."""
        return LaurentPoly(self.vt, {_add_exp(e, m.exp2): c for e, c in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.vt == other.vt and self.terms == other.terms

    def __hash__(self):
        return hash((self.vt, frozenset(self.terms.items())))

    def monomials(self):
        for e, c in self.terms.items():
            yield Monomial(self.vt, e), c

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for e, c in self.sorted_terms():
            m = str(Monomial(self.vt, e))
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if m == "1":
                body = str(a)
            elif a == 1:
                body = m
            else:
                body = f"{a}*{m}"
            out.append((sign, body))
        s = ("-" if out[0][0] == "-" else "") + out[0][1]
        for sign, body in out[1:]:
            s += f" {sign} {body}"
        return s

    def __repr__(self):
        return f"LaurentPoly({self})"


def lp_add(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a + b


def lp_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a * b


def _one_minus(vt: VarTable, e: Exp) -> LaurentPoly:
    return LaurentPoly(vt, {vt.zero(): 1, e: -1})


def _den_product(vt: VarTable, den: Counter) -> LaurentPoly:
    out = LaurentPoly.const(vt, 1)
    for e, k in sorted(den.items()):
        f = _one_minus(vt, e)
        for _ in range(k):
            out = out * f
    return out


class RatFun:
    """``sign * unit * num / prod(1 - m_i)`` with every ``m_i`` lexicographically positive.

    Instances are immutable.  ``==`` is value equality (see :func:`rf_eq`), so
    RatFun is deliberately unhashable.
    """

    __slots__ = ("vt", "sign", "unit", "num", "den")
    __hash__ = None

    def __init__(self, num: LaurentPoly, den: Iterable[Monomial] = (), unit: Monomial | None = None,
                 sign: int = 1):
        vt = num.vt
        unit = unit if unit is not None else vt.one()
        _check(num, unit)
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        counts: Counter = Counter()
        for m in den:
            _check(num, m)
            if m.is_unital:
                raise PoleError("denominator factor (1 - 1) vanishes identically")
            counts[m.exp2] += 1
        self.vt = vt
        self.sign = sign
        self.unit = unit
        self.num = num
        self.den = counts
        self._canonicalize()

    def _canonicalize(self):
        if self.num.is_zero:
            self.sign, self.unit, self.den = 1, self.vt.one(), Counter()
            return
        sign, unit = self.sign, self.unit.exp2
        fixed: Counter = Counter()
        for e, k in self.den.items():
            if _is_canonical(e):
                fixed[e] += k
            else:
                # 1/(1-m) = -m^{-1}/(1-m^{-1})
                inv = _neg_exp(e)
                fixed[inv] += k
                sign *= (-1) ** k
                unit = _add_exp(unit, tuple(k * x for x in inv))
        self.sign, self.unit, self.den = sign, Monomial(self.vt, unit), fixed

    # constructors -----------------------------------------------------------
    @classmethod
    def const(cls, vt: VarTable, c: Rational) -> "RatFun":
        return cls(LaurentPoly.const(vt, c))

    @classmethod
    def from_poly(cls, p: LaurentPoly) -> "RatFun":
        return cls(p)

    @classmethod
    def mono(cls, m: Monomial, c: Rational = 1) -> "RatFun":
        return cls(LaurentPoly.mono(m, c))

    @classmethod
    def geometric(cls, m: Monomial) -> "RatFun":
        """``1/(1-m)``."""
        return cls(LaurentPoly.const(m.vt, 1), [m])

    # accessors --------------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def den_factors(self) -> list:
        return [Monomial(self.vt, e) for e, k in sorted(self.den.items()) for _ in range(k)]

    def prefactor_poly(self) -> LaurentPoly:
        """``sign * unit * num`` as one Laurent polynomial."""
        return self.num.shift(self.unit).scale(self.sign)

    def as_poly(self) -> LaurentPoly | None:
        """The Laurent polynomial equal to ``self`` when there is no denominator."""
        if self.den:
            return None
        return self.prefactor_poly()

    # arithmetic -------------------------------------------------------------
    def __add__(self, other: "RatFun") -> "RatFun":
        return rf_add(self, other)

    def __sub__(self, other: "RatFun") -> "RatFun":
        return rf_add(self, -other)

    def __neg__(self) -> "RatFun":
        if self.is_zero:
            return self
        return RatFun(self.num, self.den_factors(), self.unit, -self.sign)

    def __mul__(self, other) -> "RatFun":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return rf_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "RatFun":
        if k < 0:
            return self.inverse() ** (-k)
        out = RatFun.const(self.vt, 1)
        for _ in range(k):
            out = out * self
        return out

    def scale(self, c: Rational) -> "RatFun":
        c = Fraction(c)
        return RatFun(self.num.scale(c), self.den_factors(), self.unit, self.sign)

    def inverse(self) -> "RatFun":
        """Reciprocal, defined when the numerator is ``c*m`` or ``c*(1 - m)``."""
        terms = self.num.terms
        den_poly = _den_product(self.vt, self.den)
        if len(terms) == 1:
            (e, c), = terms.items()
            return RatFun(den_poly.scale(Fraction(self.sign) / c), (),
                          Monomial(self.vt, _neg_exp(_add_exp(e, self.unit.exp2))))
        if len(terms) == 2:
            (e1, c1), (e2, c2) = sorted(terms.items())
            if c1 == -c2:
                # c1*u1 + c2*u2 = c1*u1*(1 - u2/u1)
                ratio = Monomial(self.vt, _add_exp(e2, _neg_exp(e1)))
                unit = Monomial(self.vt, _neg_exp(_add_exp(e1, self.unit.exp2)))
                return RatFun(den_poly.scale(Fraction(self.sign) / c1), [ratio], unit)
        raise ValueError(f"cannot invert {self}: numerator is not a monomial times (1 - monomial)")

    def __truediv__(self, other) -> "RatFun":
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(other))
        return self * other.inverse()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RatFun.const(self.vt, other)
        if not isinstance(other, RatFun):
            return NotImplemented
        return rf_eq(self, other)

    def __str__(self):
        pre = self.prefactor_poly()
        if not self.den:
            return str(pre)
        dens = "*".join(f"(1 - {Monomial(self.vt, e)})" + (f"^{k}" if k > 1 else "")
                        for e, k in sorted(self.den.items()))
        if len(self.den) > 1 or sum(self.den.values()) > 1 and "*" in dens:
            dens = f"({dens})"
        top = f"({pre})" if len(pre.terms) > 1 else str(pre)
        return f"{top}/{dens}"

    def __repr__(self):
        return f"RatFun({self})"


def rf_canonicalize(f: RatFun) -> RatFun:
    """Rewrite every factor to lexicographically positive orientation.

    Construction already canonicalizes, so this is a value-preserving copy.
    """
    return RatFun(f.num, f.den_factors(), f.unit, f.sign)


def rf_add(a: RatFun, b: RatFun) -> RatFun:
    _check(a, b)
    if a.is_zero:
        return b
    if b.is_zero:
        return a
    common = a.den | b.den  # multiset maximum
    na = a.prefactor_poly() * _den_product(a.vt, common - a.den)
    nb = b.prefactor_poly() * _den_product(a.vt, common - b.den)
    return RatFun(na + nb, [Monomial(a.vt, e) for e in common.elements()])


def rf_mul(a: RatFun, b: RatFun) -> RatFun:
    _check(a, b)
    return RatFun(a.num * b.num, a.den_factors() + b.den_factors(), a.unit * b.unit,
                  a.sign * b.sign)


def rf_eq(a: RatFun, b: RatFun) -> bool:
    _check(a, b)
    common = a.den | b.den
    lhs = a.prefactor_poly() * _den_product(a.vt, common - a.den)
    rhs = b.prefactor_poly() * _den_product(a.vt, common - b.den)
    return lhs == rhs


# substitution --------------------------------------------------------------

def _subst_exp(vt: VarTable, e: Exp, images: Sequence[Exp]) -> Exp:
    out = [0] * len(vt)
    for k, ek in enumerate(e):
        if not ek:
            continue
        img = images[k]
        for j, ij in enumerate(img):
            # v^(ek/2) with v -> m, m stored doubled: doubled result is ek*ij/2
            prod = ek * ij
            if prod % 2:
                raise ValueError("substitution produces a quarter-integer exponent")
            out[j] += prod // 2
    return tuple(out)


def _images(vt: VarTable, mapping: Mapping[str, Monomial]) -> list:
    images = []
    for k, name in enumerate(vt.names):
        if name in mapping:
            m = mapping[name]
            if m.vt != vt:
                raise VarTableMismatch("substitution image uses a different variable table")
            images.append(m.exp2)
        else:
            unit = [0] * len(vt)
            unit[k] = 2
            images.append(tuple(unit))
    for name in mapping:
        vt.index(name)
    return images


def lp_subst(p: LaurentPoly, mapping: Mapping[str, Monomial]) -> LaurentPoly:
    images = _images(p.vt, mapping)
    out: dict = {}
    for e, c in p.terms.items():
        e2 = _subst_exp(p.vt, e, images)
        out[e2] = out.get(e2, 0) + c
    return LaurentPoly(p.vt, out)


def rf_subst(f: RatFun, mapping: Mapping[str, Monomial]) -> RatFun:
    """Apply a monomial substitution homomorphically and re-canonicalize."""
    vt = f.vt
    images = _images(vt, mapping)
    den = []
    for m in f.den_factors():
        e = _subst_exp(vt, m.exp2, images)
        if not any(e):
            raise PoleError(f"substitution sends denominator factor (1 - {m}) to zero")
        den.append(Monomial(vt, e))
    unit = Monomial(vt, _subst_exp(vt, f.unit.exp2, images))
    return RatFun(lp_subst(f.num, mapping), den, unit, f.sign)


def inversion(vt: VarTable, names: Iterable[str] | None = None) -> dict:
    """Substitution map sending each named variable (default: all torus variables) to its inverse."""
    names = vt.torus if names is None else tuple(names)
    return {n: vt.var(n, -1) for n in names}


# evaluation ----------------------------------------------------------------

def _sqrt_exact(x: Fraction) -> Fraction:
    if x < 0:
        raise ValueError(f"half-integer power of negative value {x}")
    n, d = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if n * n != x.numerator or d * d != x.denominator:
        raise ValueError(f"{x} is not the square of a rational; cannot take a half-integer power")
    return Fraction(n, d)


def _pow2(x: Fraction, e2: int) -> Fraction:
    if e2 % 2 == 0:
        return x ** (e2 // 2)
    return _sqrt_exact(x) ** e2


def _point_vector(vt: VarTable, point: Mapping[str, Rational], partial: bool = False) -> list:
    vals = []
    for n in vt.names:
        if n in point:
            vals.append(Fraction(point[n]))
        elif partial:
            vals.append(None)
        else:
            raise KeyError(f"no value given for variable {n!r}")
    for n in point:
        vt.index(n)
    return vals


def _eval_exp(vals: Sequence, e: Exp) -> Fraction:
    out = Fraction(1)
    for v, k in zip(vals, e):
        if k:
            if v == 0 and k < 0:
                raise PoleError("negative power of zero")
            out *= _pow2(v, k)
    return out


def lp_eval(p: LaurentPoly, point: Mapping[str, Rational]) -> Fraction:
    return rf_eval(RatFun(p), point)


def rf_eval(f: RatFun, point: Mapping[str, Rational]) -> Fraction:
    """Exact value at a rational point.

    Reserved variables that do not occur in ``f`` need not be assigned.
    """
    vt = f.vt
    used = set()
    for e in list(f.num.terms) + list(f.den) + [f.unit.exp2]:
        used.update(i for i, x in enumerate(e) if x)
    full = dict(point)
    for i, n in enumerate(vt.names):
        if n not in full and i not in used:
            full[n] = 1
    vals = _point_vector(vt, full)
    den = Fraction(1)
    for e, k in f.den.items():
        d = 1 - _eval_exp(vals, e)
        if d == 0:
            raise PoleError(f"denominator factor (1 - {Monomial(vt, e)}) vanishes at {point}")
        den *= d ** k
    num = sum((c * _eval_exp(vals, e) for e, c in f.num.terms.items()), Fraction(0))
    return f.sign * _eval_exp(vals, f.unit.exp2) * num / den


def rf_partial_eval(f: RatFun, point: Mapping[str, Rational]) -> RatFun:
    """Substitute rational constants for some variables.

    Denominator factors must either avoid the substituted variables or become
    constants.
    """
    vt = f.vt
    vals = _point_vector(vt, point, partial=True)
    idx = [i for i, v in enumerate(vals) if v is not None]

    def split(e):
        fixed = tuple(x if i in idx else 0 for i, x in enumerate(e))
        rest = tuple(0 if i in idx else x for i, x in enumerate(e))
        fv = [v if v is not None else Fraction(1) for v in vals]
        return _eval_exp(fv, fixed), rest

    out: dict = {}
    for e, c in f.num.terms.items():
        val, rest = split(e)
        out[rest] = out.get(rest, 0) + c * val
    uval, urest = split(f.unit.exp2)
    scale = Fraction(f.sign) * uval
    den = []
    for e, k in f.den.items():
        val, rest = split(e)
        if not any(rest):
            d = 1 - val
            if d == 0:
                raise PoleError(f"denominator factor (1 - {Monomial(vt, e)}) vanishes")
            scale /= d ** k
        elif val != 1:
            raise ValueError(f"factor (1 - {Monomial(vt, e)}) mixes substituted and free variables")
        else:
            den.extend([Monomial(vt, rest)] * k)
    return RatFun(LaurentPoly(vt, out).scale(scale), den, Monomial(vt, urest))


# Laurent expansion -----------------------------------------------------------

INSIDE, OUTSIDE = "inside", "outside"


def _region_sides(f: RatFun, region) -> dict:
    """Map canonical factor exponent -> side.

    ``region`` is a side string for every factor, or a mapping from factor
    monomial to side.  A key given in non-canonical orientation ``(1 - m^-1)``
    has its side flipped, because expanding in ``m^-1`` is the outside
    expansion of the canonical factor ``(1 - m)``.
    """
    if isinstance(region, str):
        if region not in (INSIDE, OUTSIDE):
            raise ValueError(f"region must be {INSIDE!r} or {OUTSIDE!r}")
        return {e: region for e in f.den}
    sides = {}
    for m, side in region.items():
        if side not in (INSIDE, OUTSIDE):
            raise ValueError(f"region must be {INSIDE!r} or {OUTSIDE!r}")
        e = m.exp2
        if not _is_canonical(e):
            e = _neg_exp(e)
            side = OUTSIDE if side == INSIDE else INSIDE
        sides[e] = side
    missing = [Monomial(f.vt, e) for e in f.den if e not in sides]
    if missing:
        raise ValueError(f"no region given for factors {', '.join(map(str, missing))}")
    return sides


def expansion_weight(vt: VarTable, sides: Mapping[Exp, str]) -> tuple:
    """Integer weight vector ``w`` with ``w.m > 0`` on inside factors and ``< 0`` on outside ones.

    Such a ``w`` exists exactly when the chosen expansions share an annulus of
    convergence; every expanded term then has ``w``-degree bounded below.
    """
    nt = vt.ntorus
    rows = []
    for e, side in sides.items():
        s = 1 if side == INSIDE else -1
        rows.append([s * x for x in e[:nt]])
    if not rows:
        return (0,) * len(vt)
    w = _feasible_weight(rows, nt)
    if w is None:
        raise ValueError("the chosen expansion regions have no common domain of convergence")
    return tuple(w) + (0,) * (len(vt) - nt)


def _feasible_weight(rows, n):
    def ok(w):
        return all(sum(a * b for a, b in zip(r, w)) > 0 for r in rows)

    guess = [sum(r[j] for r in rows) for j in range(n)]
    if ok(guess):
        return guess
    import numpy as np
    from scipy.optimize import linprog

    A = np.array(rows, dtype=float)
    # maximise margin t subject to A w >= t, |w_j| <= 1
    c = np.zeros(n + 1)
    c[-1] = -1
    A_ub = np.hstack([-A, np.ones((len(rows), 1))])
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(len(rows)),
                  bounds=[(-1, 1)] * n + [(0, 1)], method="highs")
    if not res.success or res.x[-1] <= 1e-9:
        return None
    fr = [Fraction(x).limit_denominator(1000) for x in res.x[:n]]
    lcm = math.lcm(*(f.denominator for f in fr))
    w = [int(f * lcm) for f in fr]
    return w if ok(w) else None


def expansion_window(f: RatFun, region, order: int, weight=None) -> tuple:
    """Return ``(weight, bound)`` used by :func:`rf_expand`.

    ``bound = sum_i (order + o_i) * |weight . m_i|`` over the denominator
    factors, with ``o_i = 1`` for outside factors (their series starts at
    ``m_i^-1``) and 0 otherwise.  The bound is measured from exponent 0 and
    ignores how the numerator and unit are split, so value-equal inputs with
    the same denominator get the same window.
    """
    sides = _region_sides(f, region)
    if weight is None:
        weight = expansion_weight(f.vt, sides)
    bound = 0
    for e, k in f.den.items():
        g = abs(sum(a * b for a, b in zip(weight, e)))
        bound += k * (order + (1 if sides[e] == OUTSIDE else 0)) * g
    return tuple(weight), bound


def rf_expand(f: RatFun, region, order: int, *, weight=None, window: int | None = None
              ) -> LaurentPoly:
    """Truncated Laurent expansion of ``f`` in the region chosen factor by factor.

    ``inside`` expands ``1/(1-m) = sum_k m^k``; ``outside`` rewrites
    ``1/(1-m) = -m^-1/(1-m^-1)`` and expands in ``m^-1``.  All terms of the
    resulting series whose weight-degree is at most the window bound are
    returned (see :func:`expansion_window`); the retained set is a fixed
    half-space of exponents, so truncated expansions are additive.
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    vt = f.vt
    if not f.den and window is None:
        return f.prefactor_poly()
    sides = _region_sides(f, region)
    weight, bound = expansion_window(f, region, order, weight)
    if window is not None:
        bound = window

    def wdeg(e):
        return sum(a * b for a, b in zip(weight, e))

    # prefactor: sign*unit*num times (-q_i) for each outside factor
    pre = f.prefactor_poly()
    steps = []
    for e, k in sorted(f.den.items()):
        q = e if sides[e] == INSIDE else _neg_exp(e)
        if wdeg(q) <= 0:
            raise ValueError("weight does not make the expansion variable positive")
        if sides[e] == OUTSIDE:
            for _ in range(k):
                pre = LaurentPoly(vt, {_add_exp(x, q): -c for x, c in pre.terms.items()})
        steps.extend([q] * k)

    out: dict = {}

    def walk(i, exp, coef):
        if i == len(steps):
            out[exp] = out.get(exp, 0) + coef
            return
        # every later step only raises the weight, so stop once past the bound
        while wdeg(exp) <= bound:
            walk(i + 1, exp, coef)
            exp = _add_exp(exp, steps[i])

    for e, c in pre.terms.items():
        if wdeg(e) <= bound:
            walk(0, e, c)
    return LaurentPoly(vt, {e: c for e, c in out.items() if wdeg(e) <= bound})


# polynomial helpers ------------------------------------------------------------

def elementary_symmetric(chars: Sequence[Monomial], p: int, vt: VarTable | None = None
                         ) -> LaurentPoly:
    if vt is None:
        if not chars:
            raise ValueError("need a variable table for an empty character list")
        vt = chars[0].vt
    if not 0 <= p <= len(chars):
        raise ValueError(f"p={p} out of range 0..{len(chars)}")
    out = LaurentPoly(vt)
    for combo in combinations(chars, p):
        m = vt.one()
        for c in combo:
            m = m * c
        out = out + LaurentPoly.mono(m)
    return out


def b_coefficients(p: LaurentPoly) -> list:
    """Coefficient list ``[c_0, c_1, ...]`` of a polynomial in ``b`` alone."""
    vt = p.vt
    ib = vt.index("b")
    coeffs: dict = {}
    for e, c in p.terms.items():
        if any(x for i, x in enumerate(e) if i != ib):
            raise ValueError(f"{p} is not a polynomial in b alone")
        if e[ib] < 0 or e[ib] % 2:
            raise ValueError(f"{p} has a non-polynomial power of b")
        coeffs[e[ib] // 2] = c
    n = max(coeffs, default=-1)
    return [coeffs.get(k, Fraction(0)) for k in range(n + 1)]


def b_poly(vt: VarTable, coeffs: Sequence[Rational]) -> LaurentPoly:
    ib = vt.index("b")
    terms = {}
    for k, c in enumerate(coeffs):
        e = [0] * len(vt)
        e[ib] = 2 * k
        terms[tuple(e)] = c
    return LaurentPoly(vt, terms)


def divide_one_plus_b(coeffs: Sequence[Rational]) -> tuple:
    """Synthetic division of ``sum c_k b^k`` by ``(1 + b)``: returns ``(quotient, remainder)``."""
    c = [Fraction(x) for x in coeffs]
    if len(c) <= 1:
        return [], (c[0] if c else Fraction(0))
    n = len(c) - 1
    q = [Fraction(0)] * n
    q[n - 1] = c[n]
    for k in range(n - 1, 0, -1):
        q[k - 1] = c[k] - q[k]
    rem = c[0] - q[0]
    while q and q[-1] == 0:
        q.pop()
    return q, rem


def poly_divide_linear(p: LaurentPoly) -> tuple:
    """Divide a polynomial in ``b`` by ``(1 + b)``; the remainder is ``p(-1)``."""
    q, rem = divide_one_plus_b(b_coefficients(p))
    return b_poly(p.vt, q), rem


def lp_divide_one_minus(p: LaurentPoly, m: Monomial) -> LaurentPoly | None:
    """Exact quotient ``p / (1 - m)`` or ``None`` when ``(1 - m)`` does not divide ``p``.

    Terms are grouped into cosets of ``m``; on each coset ``p`` is a univariate
    Laurent polynomial in ``t = m`` and division by ``1 - t`` is a running sum.
    """
    d = m.exp2
    i0 = next((i for i, x in enumerate(d) if x), None)
    if i0 is None:
        raise PoleError("division by 1 - 1")
    if d[i0] < 0:
        d = _neg_exp(d)
        flip = True  # 1 - m = -m (1 - m^-1)
    else:
        flip = False
    classes: dict = {}
    for e, c in p.terms.items():
        k = e[i0] // d[i0]
        r = tuple(x - k * y for x, y in zip(e, d))
        classes.setdefault(r, {})[k] = c
    out = {}
    for r, coeffs in classes.items():
        lo, hi = min(coeffs), max(coeffs)
        run = Fraction(0)
        for k in range(lo, hi + 1):
            run += coeffs.get(k, 0)
            if k < hi and run:
                out[tuple(x + k * y for x, y in zip(r, d))] = run
        if run:
            return None
    q = LaurentPoly(p.vt, out)
    if flip:
        # p/(1-m) = -m^-1 p/(1-m^-1)
        q = q.shift(Monomial(p.vt, d)).scale(-1)
    return q


def rf_reduce(f: RatFun) -> RatFun:
    """Cancel denominator factors that divide the numerator exactly (no GCD needed)."""
    num = f.num
    kept = []
    for m in f.den_factors():
        q = lp_divide_one_minus(num, m)
        if q is None:
            kept.append(m)
        else:
            num = q
    return RatFun(num, kept, f.unit, f.sign)
