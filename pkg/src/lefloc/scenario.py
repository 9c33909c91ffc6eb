"""Scenario files: parsing, serialization and evaluation of expectations."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import complexlab as cl
from .expr import ExprError, parse_laurent, parse_ratfun
from .invariants import (ChiY, chi_y_assemble, chi_y_duality_check, euler, riemann_roch,
                         sd_asd_duality_check, sd_asd_indices, signature)
from .localization import (ATTRACTING, EXPANDING, CompleteIntersectionDatum, FixedPointDatum,
                           FreeModuleSummand, ModuleDatum, SmoothWeights, global_sum)
from .morse import (BPoly, Cone, CriticalPointDatum, LinkData, SmoothDisc, global_morse,
                    lacunary_check, local_morse_poly, morse_inequality_check)
from .ratfun import (LaurentPoly, Monomial, RatFun, VarTable, b_coefficients, rf_eq, rf_expand,
                     rf_reduce)


class ScenarioError(ValueError):
    """Malformed scenario input (exit code 2)."""


# JSON <-> objects -------------------------------------------------------------------------

def parse_monomial(obj, vt: VarTable, where: str = "") -> Monomial:
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where}: monomial must be an object like {{\"lambda\": 2}}")
    exps = {}
    for name, e in obj.items():
        try:
            exps[name] = Fraction(e) if isinstance(e, (int, str)) else _bad(e)
        except (ValueError, ZeroDivisionError):
            raise ScenarioError(f"{where}: malformed exponent {e!r} for {name!r}") from None
    try:
        return vt.monomial(exps)
    except KeyError as exc:
        raise ScenarioError(f"{where}: {exc.args[0]}") from None
    except ValueError as exc:
        raise ScenarioError(f"{where}: {exc}") from None


def _bad(e):
    raise ValueError(e)


def monomial_json(m: Monomial) -> dict:
    out = {}
    for name, e in m.as_dict().items():
        out[name] = int(e) if e.denominator == 1 else f"{e.numerator}/{e.denominator}"
    return out


def _coef_json(c: Fraction):
    return int(c) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def laurent_json(p: LaurentPoly) -> list:
    return [{"coef": _coef_json(c), "mono": monomial_json(Monomial(p.vt, e))}
            for e, c in p.sorted_terms()]


def parse_laurent_json(obj, vt: VarTable, where: str = "") -> LaurentPoly:
    if isinstance(obj, (str, int)):
        try:
            return parse_laurent(obj, vt)
        except ExprError as exc:
            raise ScenarioError(f"{where}: {exc}") from None
    if not isinstance(obj, list):
        raise ScenarioError(f"{where}: Laurent polynomial must be a term list or expression")
    out = LaurentPoly(vt)
    for i, t in enumerate(obj):
        m = parse_monomial(t.get("mono", {}), vt, f"{where}[{i}]")
        try:
            c = Fraction(t.get("coef", 1))
        except (ValueError, ZeroDivisionError, TypeError):
            raise ScenarioError(f"{where}[{i}]: malformed coefficient {t.get('coef')!r}") from None
        out = out + LaurentPoly.mono(m, c)
    return out


def ratfun_json(f: RatFun) -> dict:
    return {"text": str(f), "num": laurent_json(f.num),
            "den_factors": [monomial_json(m) for m in f.den_factors()],
            "unit": monomial_json(f.unit), "sign": f.sign}


def parse_ratfun_json(obj, vt: VarTable, where: str = "") -> RatFun:
    if isinstance(obj, (str, int)):
        try:
            return parse_ratfun(obj, vt)
        except (ExprError, ValueError, ZeroDivisionError) as exc:
            raise ScenarioError(f"{where}: {exc}") from None
    if not isinstance(obj, dict) or "num" not in obj:
        raise ScenarioError(f"{where}: rational function needs num/den_factors/unit/sign")
    num = parse_laurent_json(obj["num"], vt, f"{where}.num")
    den = [parse_monomial(m, vt, f"{where}.den_factors") for m in obj.get("den_factors", [])]
    unit = parse_monomial(obj.get("unit", {}), vt, f"{where}.unit")
    sign = obj.get("sign", 1)
    if sign not in (1, -1):
        raise ScenarioError(f"{where}: sign must be 1 or -1")
    return RatFun(num, den, unit, sign)


def bpoly_json(p: BPoly) -> dict:
    return {str(k): _coef_json(c) for k, c in p.as_dict().items()}


def parse_bpoly(obj, vt: VarTable, where: str = "") -> BPoly:
    if isinstance(obj, dict):
        try:
            return BPoly({int(k): Fraction(v) for k, v in obj.items()})
        except (ValueError, TypeError):
            raise ScenarioError(f"{where}: b-polynomial must map degrees to numbers") from None
    try:
        return BPoly(b_coefficients(parse_laurent(str(obj), vt)))
    except (ExprError, ValueError) as exc:
        raise ScenarioError(f"{where}: {exc}") from None


# scenario model ---------------------------------------------------------------------------

@dataclass
class ComplexEntry:
    complex: cl.FiniteComplex
    endo: cl.ComplexEndomorphism


@dataclass
class Scenario:
    name: str
    vt: VarTable
    dimension: int
    fixed_points: list
    auxiliary_points: list = field(default_factory=list)
    critical_points: list = field(default_factory=list)
    poincare: BPoly | None = None
    complexes: dict = field(default_factory=dict)
    expectations: list = field(default_factory=list)
    description: str = ""
    source: str | None = None

    def point(self, name: str) -> FixedPointDatum:
        for p in self.fixed_points + self.auxiliary_points:
            if p.name == name:
                return p
        known = ", ".join(p.name for p in self.fixed_points + self.auxiliary_points) or "none"
        raise LookupError(f"no fixed point named {name!r} (known: {known})")

    def critical_point(self, name: str) -> CriticalPointDatum:
        for c in self.critical_points:
            if c.name == name:
                return c
        raise LookupError(f"no critical point named {name!r}")

    def complex_entry(self, name: str) -> ComplexEntry:
        if name not in self.complexes:
            raise LookupError(f"no complex named {name!r}")
        return self.complexes[name]

    # aggregated quantities
    def l2_points(self) -> list:
        return [p for p in self.fixed_points if p.has_l2()]

    def global_l2(self, p: int) -> RatFun:
        pts = self.l2_points()
        if not pts:
            raise LookupError("scenario has no L2 fixed-point data")
        return global_sum([x.local(p) for x in pts], self.vt)

    def global_poly(self, p: int) -> RatFun:
        pts = self.l2_points()
        if not pts:
            raise LookupError("scenario has no L2 fixed-point data")
        return global_sum([x.local_poly(p) for x in pts], self.vt)

    def global_bfq(self) -> RatFun:
        pts = [p for p in self.fixed_points if p.bfq is not None or p.smooth is not None]
        if not any(p.bfq is not None for p in pts):
            raise LookupError("scenario has no complete-intersection data")
        out = []
        for p in pts:
            # smooth points contribute their Woods Hole number
            out.append(p.bfq_local() if p.bfq is not None else p.local(0))
        return global_sum(out, self.vt)

    def local_chi(self, pt: FixedPointDatum) -> ChiY:
        n = pt.dim if pt.dim is not None else self.dimension
        return chi_y_assemble({p: pt.local(p) for p in range(self.dimension + 1)},
                              max(n, self.dimension), self.vt)

    def global_chi(self) -> ChiY:
        pts = self.l2_points()
        if not pts:
            raise LookupError("scenario has no L2 fixed-point data")
        total = ChiY(RatFun.const(self.vt, 0), self.dimension)
        for p in pts:
            total = total + self.local_chi(p)
        return total

    def spin_global(self) -> RatFun:
        pts = [p for p in self.fixed_points if p.spin_half_char is not None]
        if not pts:
            raise LookupError("scenario has no spin data")
        return global_sum([p.spin_local() for p in pts], self.vt)

    def morse(self) -> BPoly:
        if not self.critical_points:
            raise LookupError("scenario has no critical-point data")
        return global_morse(self.critical_points)

    def euler_characteristic(self):
        """Euler characteristic from L2 data when every Hodge degree is present, else N(-1)."""
        pts = self.l2_points()
        complete = pts and all(p.smooth is not None or p.product is not None
                               or set(range(self.dimension + 1)) <= set(p.modules) for p in pts)
        if complete:
            e = rf_reduce(euler(self.global_chi()))
            poly = e.as_poly()
            if poly is not None and set(poly.terms) <= {self.vt.zero()}:
                return poly.constant_term()
            return e
        if self.poincare is not None:
            return self.poincare(-1)
        raise LookupError("no Euler characteristic available (need all Hodge degrees or a Poincare polynomial)")


def _parse_modules(obj, vt, where) -> dict:
    """``{"p": {"q": [{"gens": [...], "ring": [...]}, ...]}}`` -> ``{p: ModuleDatum}``."""
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where}: modules must map Hodge degree p to per-degree data")
    out = {}
    for p, per_q in obj.items():
        if not isinstance(per_q, dict):
            raise ScenarioError(f"{where}.{p}: expected a map from degree q to summand groups")
        degs = {}
        for q, groups in per_q.items():
            summands = []
            for gi, g in enumerate(groups):
                w = f"{where}.{p}.{q}[{gi}]"
                ring = [parse_monomial(m, vt, w + ".ring") for m in g.get("ring", [])]
                gens = g.get("gens", [g["gen"]] if "gen" in g else None)
                if gens is None:
                    raise ScenarioError(f"{w}: summand group needs 'gens' or 'gen'")
                try:
                    summands += [FreeModuleSummand(parse_monomial(m, vt, w + ".gens"), ring)
                                 for m in gens]
                except ValueError as exc:
                    raise ScenarioError(f"{w}: {exc}") from None
            try:
                degs[int(q)] = summands
            except ValueError:
                raise ScenarioError(f"{where}.{p}: degree {q!r} is not an integer") from None
        try:
            out[int(p)] = ModuleDatum(degs)
        except ValueError as exc:
            raise ScenarioError(f"{where}.{p}: {exc}") from None
    return out


_POINT_KEYS = {"name", "smooth", "modules", "bfq", "side", "dual_degree", "invert", "product",
               "spin", "sign", "note"}


def parse_fixed_point(obj, vt: VarTable, where: str) -> FixedPointDatum:
    if not isinstance(obj, dict) or "name" not in obj:
        raise ScenarioError(f"{where}: fixed point needs a name")
    unknown = set(obj) - _POINT_KEYS
    if unknown:
        raise ScenarioError(f"{where}: unknown keys {sorted(unknown)}")
    where = f"{where}({obj['name']})"
    kw: dict[str, Any] = {}
    if "smooth" in obj:
        s = obj["smooth"]
        ws = [parse_monomial(m, vt, where + ".smooth.weights") for m in s.get("weights", [])]
        bt = parse_laurent_json(s["bundle_trace"], vt, where + ".bundle_trace") \
            if "bundle_trace" in s else None
        try:
            kw["smooth"] = SmoothWeights(ws, bt)
        except ValueError as exc:
            raise ScenarioError(f"{where}: {exc}") from None
    if "modules" in obj:
        kw["modules"] = _parse_modules(obj["modules"], vt, where + ".modules")
    if "bfq" in obj:
        b = obj["bfq"]
        try:
            kw["bfq"] = CompleteIntersectionDatum(
                [parse_monomial(m, vt, where + ".bfq.ambient") for m in b.get("ambient", [])],
                [parse_monomial(m, vt, where + ".bfq.defining") for m in b.get("defining", [])],
                parse_laurent_json(b["bundle_trace"], vt, where) if "bundle_trace" in b else None)
        except ValueError as exc:
            raise ScenarioError(f"{where}: {exc}") from None
    if "product" in obj:
        pr = obj["product"]
        kw["product"] = (parse_fixed_point({"name": obj["name"] + ".1", **pr["first"]}, vt, where),
                         parse_fixed_point({"name": obj["name"] + ".2", **pr["second"]}, vt, where),
                         int(pr.get("m", 0)))
    if "spin" in obj:
        sp = obj["spin"]
        kw["spin_half_char"] = parse_monomial(sp.get("half_char", {}), vt, where + ".spin")
        kw["spin_sign"] = int(sp.get("sign", 1))
    side = obj.get("side", ATTRACTING)
    if side not in (ATTRACTING, EXPANDING):
        raise ScenarioError(f"{where}: side must be 'attracting' or 'expanding'")
    try:
        return FixedPointDatum(name=str(obj["name"]), vt=vt, side=side,
                               dual_degree=int(obj.get("dual_degree", 0)),
                               invert=bool(obj.get("invert", False)),
                               sign=int(obj.get("sign", 1)), **kw)
    except ValueError as exc:
        raise ScenarioError(f"{where}: {exc}") from None


def _parse_factor(obj, where):
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ScenarioError(f"{where}: factor must be {{\"disc\": m}} or {{\"cone\": {{...}}}}")
    (kind, val), = obj.items()
    try:
        if kind == "disc":
            return SmoothDisc(int(val))
        if kind == "cone":
            return Cone(LinkData(int(val["dim"]), val["betti"]))
    except (ValueError, KeyError, TypeError) as exc:
        raise ScenarioError(f"{where}: {exc}") from None
    raise ScenarioError(f"{where}: unknown factor kind {kind!r}")


def _parse_complex(obj, where) -> ComplexEntry:
    try:
        if "torus" in obj:
            c, t = cl.torus_pair(int(obj["torus"]["n"]), obj["torus"]["map"])
            return ComplexEntry(c, t)
        c = cl.FiniteComplex(tuple(obj["dims"]),
                             tuple(_frac_matrix(m) for m in obj["differentials"]))
        t = cl.ComplexEndomorphism(tuple(_frac_matrix(m) for m in obj["endomorphism"])) \
            if "endomorphism" in obj else cl.ComplexEndomorphism.identity(c)
    except (KeyError, ValueError, TypeError, ZeroDivisionError) as exc:
        raise ScenarioError(f"{where}: {exc}") from None
    if not cl.validate(c, t):
        raise ScenarioError(f"{where}: differentials do not square to zero or T is not a chain map")
    return ComplexEntry(c, t)


def _frac_matrix(rows):
    return tuple(tuple(Fraction(x) for x in r) for r in rows)


_TOP_KEYS = {"name", "description", "variables", "dimension", "fixed_points", "auxiliary_points",
             "critical_points", "poincare", "complexes", "expectations", "notes"}


def scenario_from_dict(data: dict, source: str | None = None) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ScenarioError(f"unknown top-level keys {sorted(unknown)}")
    try:
        vt = VarTable(data.get("variables", []))
    except ValueError as exc:
        raise ScenarioError(f"variables: {exc}") from None
    fps = [parse_fixed_point(p, vt, f"fixed_points[{i}]")
           for i, p in enumerate(data.get("fixed_points", []))]
    aux = [parse_fixed_point(p, vt, f"auxiliary_points[{i}]")
           for i, p in enumerate(data.get("auxiliary_points", []))]
    names = [p.name for p in fps + aux]
    if len(set(names)) != len(names):
        raise ScenarioError("fixed point names must be unique")
    cps = []
    for i, c in enumerate(data.get("critical_points", [])):
        w = f"critical_points[{i}]"
        cps.append(CriticalPointDatum(str(c.get("name", i)),
                                      _parse_factor(c.get("attracting", {"disc": 0}), w),
                                      _parse_factor(c.get("expanding", {"disc": 0}), w)))
    poinc = parse_bpoly(data["poincare"], vt, "poincare") if "poincare" in data else None
    cplx = {str(k): _parse_complex(v, f"complexes.{k}")
            for k, v in data.get("complexes", {}).items()}
    if not (fps or cps or cplx):
        raise ScenarioError("scenario needs fixed_points, critical_points or complexes")
    dims = [p.dim for p in fps if p.dim is not None]
    dimension = int(data.get("dimension", max(dims, default=0)))
    exps = data.get("expectations", [])
    if not all(isinstance(e, str) for e in exps):
        raise ScenarioError("expectations must be strings of the form 'quantity == value'")
    sc = Scenario(str(data.get("name", source or "scenario")), vt, dimension, fps, aux, cps,
                  poinc, cplx, list(exps), str(data.get("description", "")), source)
    for e in sc.expectations:
        parse_expectation(e)
    return sc


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: JSON error at line {exc.lineno}, column {exc.colno}: "
                            f"{exc.msg}") from None
    try:
        return scenario_from_dict(data, str(path))
    except ScenarioError as exc:
        raise ScenarioError(f"{path}: {exc}") from None


# expectations --------------------------------------------------------------------------------

_EXPECT = re.compile(r"^\s*([a-z_][a-z_0-9]*)\s*(?:\[([^\]]*)\])?\s*==\s*(.+?)\s*$")


@dataclass(frozen=True)
class Expectation:
    text: str
    quantity: str
    args: tuple
    expected: str


def parse_expectation(text: str) -> Expectation:
    m = _EXPECT.match(text)
    if not m:
        raise ScenarioError(f"malformed expectation {text!r}; expected 'quantity[args] == value'")
    q, args, rhs = m.groups()
    args = tuple(a.strip() for a in args.split(";")) if args else ()
    return Expectation(text, q, args, rhs)


@dataclass
class Outcome:
    expectation: Expectation
    passed: bool
    actual: Any
    error: str | None = None


_PDEG = re.compile(r"^(local|global|local_poly|global_poly|expand)_p(\d+)$")


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t not in ("true", "false"):
        raise ScenarioError(f"expected true or false, got {text!r}")
    return t == "true"


def _need(args, n, q):
    if len(args) < n:
        raise ScenarioError(f"{q} needs {n} argument(s) in brackets")


def quantity(sc: Scenario, q: str, args: tuple):
    """Compute a named quantity; returns RatFun, BPoly, bool, list, LaurentPoly or number."""
    vt = sc.vt
    m = _PDEG.match(q)
    if m:
        kind, p = m.group(1), int(m.group(2))
        if kind == "global":
            return sc.global_l2(p)
        if kind == "global_poly":
            return sc.global_poly(p)
        _need(args, 1, q)
        pt = sc.point(args[0])
        if kind == "local":
            return pt.local(p)
        if kind == "local_poly":
            return pt.local_poly(p)
        _need(args, 3, q)
        region = args[1]
        return rf_expand(pt.local(p), region, int(args[2]))
    if q == "global_bfq":
        return sc.global_bfq()
    if q == "local_bfq":
        _need(args, 1, q)
        return sc.point(args[0]).bfq_local()
    if q in ("chi_y", "chi_y_duality", "signature", "euler", "riemann_roch", "sd", "asd"):
        c = sc.local_chi(sc.point(args[0])) if args else sc.global_chi()
        if q == "chi_y":
            return c.value
        if q == "chi_y_duality":
            if args:
                return chi_y_duality_check(c)
            return chi_y_duality_check(c) and all(chi_y_duality_check(sc.local_chi(p))
                                                  for p in sc.l2_points())
        if q in ("sd", "asd"):
            return sd_asd_indices(c)[0 if q == "sd" else 1]
        return {"signature": signature, "euler": euler, "riemann_roch": riemann_roch}[q](c)
    if q == "sd_asd_duality":
        _need(args, 1, q)
        c = sc.local_chi(sc.point(args[0]))
        vars_ = [args[1]] if len(args) > 1 else list(vt.torus)
        return all(sd_asd_duality_check(c, v) for v in vars_)
    if q == "spin_global":
        return sc.spin_global()
    if q == "spin_local":
        _need(args, 1, q)
        return sc.point(args[0]).spin_local()
    if q == "morse":
        return sc.morse()
    if q == "morse_local":
        _need(args, 1, q)
        return local_morse_poly(sc.critical_point(args[0]))
    if q == "poincare":
        if sc.poincare is None:
            raise LookupError("scenario has no Poincare polynomial")
        return sc.poincare
    if q in ("morse_inequalities", "morse_q"):
        if sc.poincare is None:
            raise LookupError("scenario has no Poincare polynomial")
        res = morse_inequality_check(sc.morse(), sc.poincare)
        return res.ok if q == "morse_inequalities" else res.Q
    if q == "lacunary":
        return lacunary_check(sc.morse())
    if q == "morse_euler":
        return sc.morse()(-1) == sc.euler_characteristic()
    if q in ("lefschetz_poly", "cohomology", "mckean_singer", "supersymmetry", "duality"):
        _need(args, 1, q)
        e = sc.complex_entry(args[0])
        if q == "lefschetz_poly":
            return cl.lefschetz_poly(e.complex, e.endo)
        if q == "cohomology":
            return cl.cohomology_dims(e.complex)
        if q == "supersymmetry":
            return cl.supersymmetry_check(e.complex)
        if q == "duality":
            return cl.duality_check(e.complex, e.endo)
        exact = float(cl.lefschetz_number(e.complex, e.endo))
        return all(abs(cl.heat_supertrace(e.complex, e.endo, t, -1.0) - exact) <= 1e-9
                   for t in (0.05, 0.5, 5.0, 50.0))
    if q == "kunneth":
        _need(args, 2, q)
        a, b = sc.complex_entry(args[0]), sc.complex_entry(args[1])
        return cl.kunneth_check(a.complex, a.endo, b.complex, b.endo).ok
    raise ScenarioError(f"unknown quantity {q!r}")


def compare(actual, expected: str, vt: VarTable) -> bool:
    if isinstance(actual, bool):
        return actual == _bool(expected)
    if isinstance(actual, RatFun):
        return rf_eq(actual, parse_ratfun(expected, vt))
    if isinstance(actual, LaurentPoly):
        return actual == parse_laurent(expected, vt)
    if isinstance(actual, BPoly):
        return actual == BPoly(b_coefficients(parse_laurent(expected, vt)))
    if isinstance(actual, list):
        return actual == json.loads(expected)
    if isinstance(actual, (int, Fraction)):
        return Fraction(actual) == Fraction(expected)
    raise TypeError(f"cannot compare {type(actual).__name__}")


def evaluate(sc: Scenario, e: Expectation) -> Outcome:
    try:
        actual = quantity(sc, e.quantity, e.args)
    except (LookupError, ScenarioError, ValueError, ZeroDivisionError) as exc:
        return Outcome(e, False, None, f"{type(exc).__name__}: {exc}")
    try:
        ok = compare(actual, e.expected, sc.vt)
    except (ExprError, ScenarioError, ValueError, ZeroDivisionError, json.JSONDecodeError) as exc:
        return Outcome(e, False, actual, f"cannot read expected value: {exc}")
    return Outcome(e, ok, actual)


def verify(sc: Scenario) -> list:
    return [evaluate(sc, parse_expectation(t)) for t in sc.expectations]


def value_json(v):
    if isinstance(v, RatFun):
        return ratfun_json(v)
    if isinstance(v, LaurentPoly):
        return {"text": str(v), "terms": laurent_json(v)}
    if isinstance(v, BPoly):
        return {"text": str(v), "coeffs": bpoly_json(v)}
    if isinstance(v, Fraction):
        return _coef_json(v)
    if isinstance(v, ChiY):
        return ratfun_json(v.value)
    return v


def value_text(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, list):
        return json.dumps(v)
    return str(v)


def display(v):
    """Reduced form for reporting: cancels known factors, never changes the value."""
    return rf_reduce(v) if isinstance(v, RatFun) else v
