from fractions import Fraction

import pytest

from lefloc.expr import parse_ratfun
from lefloc.localization import (CompleteIntersectionDatum, FreeModuleSummand, ModuleDatum,
                                 SmoothWeights, bfq_local, dualize, global_sum,
                                 module_lefschetz, module_poly_lefschetz, product_local,
                                 random_point, verify_identity, woods_hole)
from lefloc.ratfun import LaurentPoly, RatFun, elementary_symmetric, inversion, rf_eval


def test_woods_hole_quadric_smooth(vt2):
    w = SmoothWeights([vt2.monomial({"lambda": -1, "mu": 1}), vt2.var("lambda", -2)])
    assert woods_hole(w, 0) == parse_ratfun("1/((1-mu/lambda)*(1-1/lambda^2))", vt2)
    assert woods_hole(w, 2) == parse_ratfun("(mu/lambda^3)/((1-mu/lambda)*(1-1/lambda^2))", vt2)
    with pytest.raises(ValueError):
        woods_hole(w, 3)


def test_trivial_weight_rejected(vt1):
    with pytest.raises(ValueError):
        SmoothWeights([vt1.one()])


def test_woods_hole_matches_bfq(vt2):
    ws = [vt2.var("lambda"), vt2.monomial({"lambda": 1, "mu": -2})]
    for p in range(3):
        ep = elementary_symmetric(ws, p, vt2)
        assert woods_hole(SmoothWeights(ws, ep), 0) == \
            bfq_local(CompleteIntersectionDatum(ws, (), ep), vt2)


def test_bfq_cusp(vt1):
    c = CompleteIntersectionDatum([vt1.var("lambda", 2), vt1.var("lambda", 3)],
                                  [vt1.var("lambda", 6)])
    assert bfq_local(c, vt1) == parse_ratfun("(1+lambda^3)/(1-lambda^2)", vt1)


def test_depth2_bfq_frozen(vt2):
    # oracle: independent CAS evaluation at (2, 3)
    c = CompleteIntersectionDatum([vt2.monomial({"lambda": 3, "mu": 1}), vt2.var("lambda", 4),
                                   vt2.var("mu", 4)], [vt2.monomial({"lambda": 12, "mu": 4})])
    assert rf_eval(bfq_local(c, vt2), {"lambda": 2, "mu": 3}) == Fraction(577, 48)


def test_module_traces(vt2):
    ring = [vt2.var("lambda", 2), vt2.var("mu", 2)]
    m = ModuleDatum({0: [FreeModuleSummand(vt2.one(), ring),
                         FreeModuleSummand(vt2.monomial({"lambda": 1, "mu": 1}), ring)],
                     1: [FreeModuleSummand(vt2.var("lambda"), ring)]})
    L = module_lefschetz(m, vt2)
    assert L == parse_ratfun("(1+lambda*mu-lambda)/((1-lambda^2)*(1-mu^2))", vt2)
    P = module_poly_lefschetz(m, vt2)
    assert P == parse_ratfun("(1+lambda*mu+b*lambda)/((1-lambda^2)*(1-mu^2))", vt2)


def test_module_degree_validation(vt1):
    with pytest.raises(ValueError):
        ModuleDatum({-1: []})
    with pytest.raises(ValueError):
        FreeModuleSummand(vt1.one(), [vt1.one()])


def test_dualize(vt2):
    f = parse_ratfun("1/((1-lambda)*(1-mu))", vt2)
    inv = inversion(vt2)
    assert dualize(f, 2, inv) == parse_ratfun("1/((1-1/lambda)*(1-1/mu))", vt2)
    assert dualize(f, 1, None) == -f
    assert dualize(dualize(f, 1, inv), 1, inv) == f


def test_product_local(vt2):
    a = parse_ratfun("1/(1-lambda)", vt2)
    b = parse_ratfun("1/(1-mu)", vt2)
    assert product_local(a, b, 0) == a * b
    assert product_local(a, b, 1) == -(a * b)


def test_global_sum_empty(vt1):
    assert global_sum([], vt1) == 0
    with pytest.raises(ValueError):
        global_sum([])


def test_verify_identity_reports(vt1):
    lhs = parse_ratfun("1/(1-lambda) + 1/(1-1/lambda)", vt1)
    rep = verify_identity(lhs, RatFun.const(vt1, 1))
    assert rep and len(rep.witnesses) == 5
    assert all(a == b for _, a, b in rep.witnesses)
    bad = verify_identity(lhs, RatFun.const(vt1, 2))
    assert not bad and all(a != b for _, a, b in bad.witnesses)


def test_random_point_is_square(vt2):
    import random
    pt = random_point(vt2, random.Random(3))
    for v in pt.values():
        n, d = Fraction(v).numerator, Fraction(v).denominator
        assert int(n ** 0.5) ** 2 == n and int(d ** 0.5) ** 2 == d


def test_corpus_points(corpus):
    q = corpus["quadric"]
    a3 = q.point("a3")
    assert a3.hodge_degrees() == [0, 1, 2] and a3.has_l2()
    assert a3.local(0) == parse_ratfun("(1+lambda*mu)/((1-lambda^2)*(1-mu^2))", q.vt)


def test_spin_self_duality(corpus):
    # the quadric spin local is unchanged by dualize with even parity and full inversion
    q = corpus["quadric"]
    s = q.point("a3").spin_local()
    assert dualize(s, 2, inversion(q.vt)) == s


def test_koszul_telescopes(vt2):
    ws = [vt2.var("lambda"), vt2.monomial({"lambda": -1, "mu": 1}), vt2.var("mu", 3)]
    w = SmoothWeights(ws)
    total = sum((woods_hole(w, p).scale((-1) ** p) for p in range(4)), RatFun.const(vt2, 0))
    assert total == 1
    assert isinstance(elementary_symmetric(ws, 1), LaurentPoly)
