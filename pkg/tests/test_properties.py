"""Randomised algebraic properties (hypothesis, 200 examples each)."""
from fractions import Fraction

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from lefloc.invariants import (chi_y_assemble, chi_y_duality_check, euler, sd_asd_indices,
                               signature)
from lefloc.localization import (FreeModuleSummand, ModuleDatum, SmoothWeights, dualize,
                                 module_lefschetz, module_poly_lefschetz, woods_hole)
from lefloc.ratfun import (INSIDE, LaurentPoly, Monomial, PoleError, RatFun, VarTable,
                           inversion, rf_canonicalize, rf_eq, rf_eval, rf_expand,
                           rf_partial_eval, rf_subst)

VT = VarTable(("lambda", "mu"))
N = 200
SETTINGS = settings(max_examples=N, deadline=None)

exp2 = st.integers(-4, 4)


@st.composite
def monomials(draw, unital_ok=True, halves=True):
    a, b = draw(exp2), draw(exp2)
    if not halves:
        a, b = 2 * (a // 2), 2 * (b // 2)
    m = Monomial(VT, (a, b, 0, 0))
    if not unital_ok:
        assume(not m.is_unital)
    return m


@st.composite
def laurents(draw, max_terms=3):
    terms = {}
    for _ in range(draw(st.integers(1, max_terms))):
        m = draw(monomials())
        terms[m.exp2] = terms.get(m.exp2, 0) + Fraction(draw(st.integers(-3, 3)),
                                                        draw(st.integers(1, 3)))
    return LaurentPoly(VT, terms)


@st.composite
def ratfuns(draw, max_den=2):
    num = draw(laurents())
    den = draw(st.lists(monomials(unital_ok=False), max_size=max_den))
    return RatFun(num, den)


def _points(n, seed=0):
    import random
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        out.append({"lambda": Fraction(rng.randint(2, 12), rng.randint(1, 5)) ** 2,
                    "mu": Fraction(rng.randint(2, 12), rng.randint(1, 5)) ** 2})
    return out


POINTS = _points(20)


def _evals(f):
    vals = []
    for pt in POINTS:
        try:
            vals.append(rf_eval(f, pt))
        except ZeroDivisionError:
            vals.append(None)
    return vals


# ring axioms ----------------------------------------------------------------------------

@SETTINGS
@given(laurents(), laurents(), laurents())
def test_laurent_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a and a * b == b * a
    assert a * (b + c) == a * b + a * c


@SETTINGS
@given(ratfuns(), ratfuns(), ratfuns())
def test_ratfun_ring_axioms(a, b, c):
    assert rf_eq((a + b) + c, a + (b + c))
    assert rf_eq((a * b) * c, a * (b * c))
    assert rf_eq(a + b, b + a) and rf_eq(a * b, b * a)
    assert rf_eq(a * (b + c), a * b + a * c)
    assert rf_eq(a - a, RatFun.const(VT, 0))


@SETTINGS
@given(ratfuns())
def test_canonicalize_idempotent(f):
    g = rf_canonicalize(f)
    assert rf_eq(f, g)
    h = rf_canonicalize(g)
    assert (h.sign, h.unit, h.num, dict(h.den)) == (g.sign, g.unit, g.num, dict(g.den))
    assert all(m.is_canonical for m in g.den_factors())


# substitution ---------------------------------------------------------------------------

@SETTINGS
@given(ratfuns(), ratfuns(), monomials(halves=False), monomials(halves=False))
def test_subst_homomorphism(a, b, ml, mm):
    phi = {"lambda": ml, "mu": mm}
    try:
        sa, sb = rf_subst(a, phi), rf_subst(b, phi)
        s_sum, s_prod = rf_subst(a + b, phi), rf_subst(a * b, phi)
    except PoleError:
        assume(False)
    assert rf_eq(s_sum, sa + sb)
    assert rf_eq(s_prod, sa * sb)


@SETTINGS
@given(ratfuns())
def test_double_inversion(f):
    inv = inversion(VT)
    assert rf_eq(rf_subst(rf_subst(f, inv), inv), f)


# equality versus evaluation -------------------------------------------------------------

@st.composite
def pairs(draw):
    a = draw(ratfuns())
    if draw(st.booleans()):
        # same value, different representation
        m = draw(monomials(unital_ok=False))
        k = draw(monomials())
        one_minus = LaurentPoly(VT, {VT.zero(): 1, m.exp2: -1})
        b = RatFun(a.num * one_minus * LaurentPoly.mono(k),
                   a.den_factors() + [m], a.unit / k, a.sign)
    else:
        b = draw(ratfuns())
    return a, b


@SETTINGS
@given(pairs())
def test_rf_eq_agrees_with_evaluation(pair):
    a, b = pair
    va, vb = _evals(a), _evals(b)
    agree = all(x == y for x, y in zip(va, vb) if x is not None and y is not None)
    assert rf_eq(a, b) == agree


# expansion ------------------------------------------------------------------------------

WEIGHT = (8, 1, 0, 0)  # positive on every canonical exponent with |mu part| < 8


@SETTINGS
@given(ratfuns(), ratfuns())
def test_expand_additive(f, g):
    window = 12
    ef = rf_expand(f, INSIDE, 0, weight=WEIGHT, window=window)
    eg = rf_expand(g, INSIDE, 0, weight=WEIGHT, window=window)
    assert rf_expand(f + g, INSIDE, 0, weight=WEIGHT, window=window) == ef + eg


# localization ---------------------------------------------------------------------------

weights = st.lists(monomials(unital_ok=False), min_size=1, max_size=3)


@SETTINGS
@given(weights)
def test_koszul_telescoping(ws):
    w = SmoothWeights(ws)
    total = RatFun.const(VT, 0)
    for p in range(w.dim + 1):
        total = total + woods_hole(w, p, VT).scale((-1) ** p)
    assert rf_eq(total, RatFun.const(VT, 1))


@st.composite
def modules(draw):
    per = {}
    for q in draw(st.lists(st.integers(0, 3), min_size=1, max_size=3, unique=True)):
        per[q] = [FreeModuleSummand(draw(monomials()),
                                    draw(st.lists(monomials(unital_ok=False), max_size=2)))
                  for _ in range(draw(st.integers(1, 2)))]
    return ModuleDatum(per)


@SETTINGS
@given(modules())
def test_poly_trace_at_minus_one(m):
    assert rf_eq(rf_partial_eval(module_poly_lefschetz(m, VT), {"b": -1}),
                 module_lefschetz(m, VT))


@SETTINGS
@given(ratfuns(), st.integers(0, 5))
def test_dualize_involution(f, n):
    inv = inversion(VT)
    assert rf_eq(dualize(dualize(f, n, inv), n, inv), f)


@SETTINGS
@given(weights)
def test_chi_y_duality_smooth(ws):
    w = SmoothWeights(ws)
    c = chi_y_assemble({p: woods_hole(w, p, VT) for p in range(w.dim + 1)}, w.dim, VT)
    assert chi_y_duality_check(c)


@SETTINGS
@given(weights)
def test_sd_asd_sum_and_difference(ws):
    w = SmoothWeights(ws)
    c = chi_y_assemble({p: woods_hole(w, p, VT) for p in range(w.dim + 1)}, w.dim, VT)
    sd, asd = sd_asd_indices(c)
    assert rf_eq(sd + asd, euler(c))
    assert rf_eq(sd - asd, signature(c))
