"""Command-line driver: ``lefloc <command> <scenario.json> [options]``."""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

from . import complexlab as cl
from .localization import FixedPointDatum
from .scenario import (Scenario, ScenarioError, display, evaluate, load_scenario,
                       parse_expectation, quantity, value_json, value_text)

COMMANDS = ("local", "global", "chi-y", "invariants", "spin", "morse", "expand", "complexlab",
            "verify")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def corpus_dir() -> Path:
    env = os.environ.get("LEFLOC_CORPUS")
    if env:
        return Path(env)
    return Path(str(resources.files("lefloc") / "corpus"))


def corpus_files() -> list:
    return sorted(corpus_dir().glob("*.json"))


def resolve(path: str) -> Path:
    """A path as given, else a file of that name (with or without .json) in the corpus."""
    p = Path(path)
    if p.is_file():
        return p
    for cand in (corpus_dir() / p.name, corpus_dir() / (p.name + ".json")):
        if cand.is_file():
            return cand
    raise ScenarioError(f"scenario file not found: {path}")


# reports --------------------------------------------------------------------------------------

class Report:
    def __init__(self, scenario: str, command: str):
        self.scenario = scenario
        self.command = command
        self.rows = []  # (key, value, status or None, note or None)

    def add(self, key: str, value, status: bool | None = None, note: str | None = None):
        self.rows.append((key, display(value), status, note))

    @property
    def failed(self) -> bool:
        return any(s is False for _, _, s, _ in self.rows)

    def to_json(self) -> dict:
        out = []
        for key, value, status, note in self.rows:
            row = {"key": key, "value": value_json(value), "text": value_text(value)}
            if status is not None:
                row["pass"] = status
            if note:
                row["note"] = note
            out.append(row)
        return {"scenario": self.scenario, "command": self.command, "results": out}

    def to_text(self) -> str:
        lines = [f"# {self.scenario}: {self.command}"]
        width = max((len(k) for k, *_ in self.rows), default=0)
        for key, value, status, note in self.rows:
            tag = "" if status is None else ("PASS  " if status else "FAIL  ")
            line = f"{tag}{key.ljust(width)}  {value_text(value)}"
            if note:
                line += f"    ({note})"
            lines.append(line)
        return "\n".join(lines)


def _points(sc: Scenario, name: str | None, include_aux: bool = True) -> list:
    if name:
        return [sc.point(name)]
    return sc.fixed_points + (sc.auxiliary_points if include_aux else [])


def _degrees(sc: Scenario, pt: FixedPointDatum, p: int | None) -> list:
    if p is not None:
        return [p]
    return pt.hodge_degrees()


def _complete_degrees(sc: Scenario) -> list:
    pts = sc.l2_points()
    if not pts:
        return []
    common = set(range(sc.dimension + 1))
    for pt in pts:
        common &= set(pt.hodge_degrees())
    return sorted(common)


def _add_q(rep: Report, sc: Scenario, key: str, q: str, args: tuple = ()):
    rep.add(key, quantity(sc, q, args))


def cmd_local(sc, a, rep):
    for pt in _points(sc, a.point):
        if pt.has_l2():
            for p in _degrees(sc, pt, a.p):
                _add_q(rep, sc, f"local_p{p}[{pt.name}]", f"local_p{p}", (pt.name,))
        if pt.bfq is not None:
            _add_q(rep, sc, f"local_bfq[{pt.name}]", "local_bfq", (pt.name,))


def cmd_global(sc, a, rep):
    for p in ([a.p] if a.p is not None else _complete_degrees(sc)):
        _add_q(rep, sc, f"global_p{p}", f"global_p{p}")
    if any(pt.bfq is not None for pt in sc.fixed_points):
        _add_q(rep, sc, "global_bfq", "global_bfq")
    if not rep.rows:
        raise LookupError("scenario has no fixed-point data")


def cmd_chi_y(sc, a, rep):
    for pt in _points(sc, a.point, include_aux=False):
        if pt.has_l2():
            _add_q(rep, sc, f"chi_y[{pt.name}]", "chi_y", (pt.name,))
            _add_q(rep, sc, f"chi_y_duality[{pt.name}]", "chi_y_duality", (pt.name,))
    if not a.point:
        _add_q(rep, sc, "chi_y", "chi_y")
        _add_q(rep, sc, "chi_y_duality", "chi_y_duality")


def cmd_invariants(sc, a, rep):
    names = ("signature", "euler", "riemann_roch", "sd", "asd")
    for pt in _points(sc, a.point, include_aux=False):
        if pt.has_l2():
            for q in names:
                _add_q(rep, sc, f"{q}[{pt.name}]", q, (pt.name,))
            if len(sc.vt.torus) and pt.dim == 2:
                _add_q(rep, sc, f"sd_asd_duality[{pt.name}]", "sd_asd_duality", (pt.name,))
    if not a.point:
        for q in names:
            _add_q(rep, sc, q, q)


def cmd_spin(sc, a, rep):
    pts = [p for p in _points(sc, a.point, include_aux=False) if p.spin_half_char is not None]
    if not pts:
        raise LookupError("scenario has no spin data")
    for pt in pts:
        _add_q(rep, sc, f"spin_local[{pt.name}]", "spin_local", (pt.name,))
    if not a.point:
        _add_q(rep, sc, "spin_global", "spin_global")


def cmd_morse(sc, a, rep):
    for cp in sc.critical_points:
        _add_q(rep, sc, f"morse_local[{cp.name}]", "morse_local", (cp.name,))
    _add_q(rep, sc, "morse", "morse")
    _add_q(rep, sc, "lacunary", "lacunary")
    if sc.poincare is not None:
        for q in ("poincare", "morse_q", "morse_inequalities"):
            _add_q(rep, sc, q, q)
    try:
        rep.add("euler_characteristic", sc.euler_characteristic())
        _add_q(rep, sc, "morse_euler", "morse_euler")
    except LookupError:
        pass


def cmd_expand(sc, a, rep):
    if not a.point:
        raise ScenarioError("expand needs --point")
    p = a.p if a.p is not None else 0
    order = a.order if a.order is not None else 5
    region = a.region or "inside"
    args = (a.point, region, str(order))
    rep.add(f"local_p{p}[{a.point}]", quantity(sc, f"local_p{p}", (a.point,)))
    _add_q(rep, sc, f"expand_p{p}[{';'.join(args)}]", f"expand_p{p}", args)


def cmd_complexlab(sc, a, rep):
    if not sc.complexes:
        raise LookupError("scenario has no complexes")
    for name, e in sc.complexes.items():
        rep.add(f"dims[{name}]", list(e.complex.dims))
        for q in ("cohomology", "lefschetz_poly", "mckean_singer", "supersymmetry", "duality"):
            _add_q(rep, sc, f"{q}[{name}]", q, (name,))
        for t in (0.05, 0.5, 5.0, 50.0):
            rep.add(f"heat_supertrace[{name};t={t};b=-1]",
                    round(cl.heat_supertrace(e.complex, e.endo, t, -1.0), 12))


HANDLERS = {"local": cmd_local, "global": cmd_global, "chi-y": cmd_chi_y,
            "invariants": cmd_invariants, "spin": cmd_spin, "morse": cmd_morse,
            "expand": cmd_expand, "complexlab": cmd_complexlab}


def verify_report(sc: Scenario) -> Report:
    rep = Report(sc.name, "verify")
    for text in sc.expectations:
        o = evaluate(sc, parse_expectation(text))
        rep.add(text, o.actual if o.actual is not None else "", o.passed, o.error)
    return rep


def _verify_path(path: str) -> tuple:
    """Worker for ``verify --jobs``: returns ``(json report, text report)`` or an input error."""
    try:
        rep = verify_report(load_scenario(path))
    except ScenarioError as exc:
        return None, str(exc)
    return rep.to_json(), rep.to_text()


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lefloc",
        description="Exact local and global equivariant Lefschetz numbers from fixed-point data.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("scenarios", nargs="*", metavar="scenario.json",
                    help="scenario file or bundled corpus name (verify with none: whole corpus)")
    ap.add_argument("--json", action="store_true", help="machine-readable output")
    ap.add_argument("--point", help="restrict to one fixed point")
    ap.add_argument("--p", type=int, help="Hodge degree")
    ap.add_argument("--order", type=int, help="expansion order (default 5)")
    ap.add_argument("--region", choices=("inside", "outside"), help="expansion region (default inside)")
    ap.add_argument("--jobs", type=int, default=1, help="verify scenarios in parallel")
    return ap


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    out = sys.stdout
    try:
        if a.command == "verify":
            paths = [str(resolve(s)) for s in a.scenarios] or [str(p) for p in corpus_files()]
            if not paths:
                raise ScenarioError(f"no scenarios found in {corpus_dir()}")
            if a.jobs > 1 and len(paths) > 1:
                with ProcessPoolExecutor(max_workers=a.jobs) as ex:
                    results = list(ex.map(_verify_path, paths))
            else:
                results = [_verify_path(p) for p in paths]
            errors = [txt for js, txt in results if js is None]
            if errors:
                raise ScenarioError("; ".join(errors))
            failed = any(r.get("pass") is False for js, _ in results for r in js["results"])
            if a.json:
                doc = [js for js, _ in results]
                json.dump(doc[0] if len(doc) == 1 else doc, out, indent=2)
                out.write("\n")
            else:
                out.write("\n\n".join(txt for _, txt in results) + "\n")
                n = sum(len(js["results"]) for js, _ in results)
                bad = sum(r.get("pass") is False for js, _ in results for r in js["results"])
                out.write(f"\n{n - bad}/{n} expectations passed\n")
            return EXIT_FAIL if failed else EXIT_OK
        if len(a.scenarios) != 1:
            raise ScenarioError(f"{a.command} takes exactly one scenario file")
        sc = load_scenario(resolve(a.scenarios[0]))
        rep = Report(sc.name, a.command)
        HANDLERS[a.command](sc, a, rep)
    except (ScenarioError, LookupError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, LookupError) and exc.args else str(exc)
        print(f"lefloc: error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    if a.json:
        json.dump(rep.to_json(), out, indent=2)
        out.write("\n")
    else:
        out.write(rep.to_text() + "\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
