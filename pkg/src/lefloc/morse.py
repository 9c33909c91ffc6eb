"""De Rham Morse polynomials on stratified spaces and the strong Morse inequalities."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .ratfun import divide_one_plus_b


class BPoly:
    """Polynomial in ``b`` with rational coefficients, stored as a dense list."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence | Mapping = ()):
        if isinstance(coeffs, Mapping):
            n = max((int(k) for k in coeffs), default=-1)
            dense = [Fraction(0)] * (n + 1)
            for k, c in coeffs.items():
                if int(k) < 0:
                    raise ValueError("negative power of b")
                dense[int(k)] += Fraction(c)
        else:
            dense = [Fraction(c) for c in coeffs]
        while dense and dense[-1] == 0:
            dense.pop()
        self.coeffs = tuple(dense)

    @classmethod
    def monomial(cls, k: int, c=1) -> "BPoly":
        return cls({k: c})

    def __add__(self, other: "BPoly") -> "BPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return BPoly([x + y for x, y in zip(a, b)])

    def __neg__(self) -> "BPoly":
        return BPoly([-c for c in self.coeffs])

    def __sub__(self, other: "BPoly") -> "BPoly":
        return self + (-other)

    def __mul__(self, other: "BPoly") -> "BPoly":
        if not self.coeffs or not other.coeffs:
            return BPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] += x * y
        return BPoly(out)

    def __call__(self, b) -> Fraction:
        out = Fraction(0)
        for c in reversed(self.coeffs):
            out = out * b + c
        return out

    def __eq__(self, other):
        if not isinstance(other, BPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def as_dict(self) -> dict:
        return {k: c for k, c in enumerate(self.coeffs) if c}

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            mag = abs(c)
            if k == 0:
                body = str(mag)
            else:
                pw = "b" if k == 1 else f"b^{k}"
                body = pw if mag == 1 else f"{mag}*{pw}"
            parts.append(("-" if c < 0 else "+", body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def __repr__(self):
        return f"BPoly({self})"


@dataclass(frozen=True)
class LinkData:
    dim_l: int
    betti: tuple

    def __post_init__(self):
        object.__setattr__(self, "betti", tuple(int(x) for x in self.betti))
        if len(self.betti) != self.dim_l + 1:
            raise ValueError(f"link of dimension {self.dim_l} needs {self.dim_l + 1} Betti numbers")
        if any(x < 0 for x in self.betti):
            raise ValueError("Betti numbers must be non-negative")
        if self.betti != self.betti[::-1]:
            warnings.warn(f"link Betti numbers {self.betti} are not Poincare symmetric",
                          stacklevel=2)


@dataclass(frozen=True)
class SmoothDisc:
    real_dim: int

    def __post_init__(self):
        if self.real_dim < 0:
            raise ValueError("disc dimension must be non-negative")


@dataclass(frozen=True)
class Cone:
    link: LinkData


@dataclass(frozen=True)
class CriticalPointDatum:
    name: str
    attracting: SmoothDisc | Cone = field(default_factory=lambda: SmoothDisc(0))
    expanding: SmoothDisc | Cone = field(default_factory=lambda: SmoothDisc(0))


def cone_local_poincare(link: LinkData) -> BPoly:
    top = (link.dim_l - 1) // 2
    return BPoly({k: link.betti[k] for k in range(top + 1)})


def cone_dual_poincare(link: LinkData) -> BPoly:
    top = (link.dim_l - 1) // 2
    return BPoly({link.dim_l + 1 - k: link.betti[k] for k in range(top + 1)})


def _attracting_poly(f) -> BPoly:
    if isinstance(f, SmoothDisc):
        return BPoly([1])
    return cone_local_poincare(f.link)


def _expanding_poly(f) -> BPoly:
    if isinstance(f, SmoothDisc):
        return BPoly.monomial(f.real_dim)
    return cone_dual_poincare(f.link)


def local_morse_poly(cp: CriticalPointDatum) -> BPoly:
    return _attracting_poly(cp.attracting) * _expanding_poly(cp.expanding)


def global_morse(points: Sequence[CriticalPointDatum]) -> BPoly:
    out = BPoly()
    for cp in points:
        out = out + local_morse_poly(cp)
    return out


@dataclass(frozen=True)
class MorseInequalityResult:
    Q: BPoly
    divisible: bool
    nonneg: bool
    euler_match: bool

    @property
    def ok(self) -> bool:
        return self.divisible and self.nonneg and self.euler_match


def morse_inequality_check(M: BPoly, N: BPoly) -> MorseInequalityResult:
    """Write ``M - N = (1+b) Q`` and test that ``Q`` has non-negative coefficients."""
    q, rem = divide_one_plus_b((M - N).coeffs)
    Q = BPoly(q)
    return MorseInequalityResult(Q, rem == 0, all(c >= 0 for c in Q.coeffs), M(-1) == N(-1))


def lacunary_check(M: BPoly) -> bool:
    c = M.coeffs
    return not any(c[k] and c[k + 1] for k in range(len(c) - 1))
