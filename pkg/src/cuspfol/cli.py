"""Command-line front end: ``cuspfol <command> CONFIG [options]``.

CONFIG is a TOML file or the name of a packaged fixture (``alpha5``,
``moussu``, ...).  Exit codes: 0 when the command ran (a failing verdict
still exits 0), 2 for a bad config, 3 for a numeric failure.
"""
from __future__ import annotations

import argparse
import sys

from .config import AnalysisConfig, ConfigError, list_fixtures, load_config
from .criteria import CriteriaError
from .parser import ParseError
from .report import dumps, new_report, orbit_samples, write_csv
from .series import TruncationError
from .verdict import FAILS, Verdict

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

BOUNDARY_MESSAGE = "double root / boundary r=0: alpha = +-4 is excluded"
RESONANT_CHECKS = ("thm6", "thm7", "section", "holonomy")


def _numeric_errors():
    from .holonomy import HolonomyError
    from .integral import IntegralError
    return (HolonomyError, TruncationError, IntegralError, ArithmeticError)


# -- helpers ------------------------------------------------------------------------

def _fspec(cfg: AnalysisConfig):
    from .integral import FSpec
    f = cfg.f
    if f is None:
        return FSpec(cfg.family.p, cfg.family.q)
    if len(f) == 2:
        return FSpec(f[0], f[1])
    return FSpec(f[0], f[1], f[2])


def _candidate(cfg: AnalysisConfig, text: str | None = None, vars=("t", "z")):
    from .integral import MeroFunction
    text = text or cfg.candidate
    return None if text is None else MeroFunction.parse(text, vars)


def _form(cfg: AnalysisConfig):
    from .parser import parse_one_form
    w = parse_one_form(cfg.form.text, cfg.form.vars)
    return w if cfg.exact else w.to_float()


def _is_boundary(params) -> bool:
    if params.k != 2 * params.n:
        return False
    return abs(complex(params.alpha_sq) - 16) < 1e-12


def _error(kind: str, message: str, check: str | None = None) -> dict:
    out = {"kind": kind, "message": message}
    if check:
        out["check"] = check
    return out


# -- holonomy -----------------------------------------------------------------------

def _holonomy_gens(cfg: AnalysisConfig):
    from .holonomy import holonomy_generators, special_component
    if cfg.form is not None and cfg.form.divisor is not None:
        fs = cfg.form
        if not fs.marked:
            return [], {"source": "form", "divisor": fs.divisor}
        bp = fs.basepoint if fs.basepoint is not None else 1.0
        radii = [fs.radius] * len(fs.marked) if fs.radius else None
        gens = holonomy_generators(_form(cfg), fs.divisor, fs.marked, bp, radii)
        return gens, {"source": "form", "divisor": fs.divisor}
    params = cfg.family_params()
    sc = special_component(params.form_2d(), params.k)
    return sc.generators(), {"source": "special-component", "special_component": sc.to_json()}


def holonomy_fragment(cfg: AnalysisConfig) -> tuple[dict, list]:
    from .holonomy import commutator_displacement, generator_table
    gens, info = _holonomy_gens(cfg)
    table = generator_table(gens, cfg.t0, cfg.max_order, cfg.period_tol)
    comms = [commutator_displacement(gens[i], gens[j], cfg.t0)
             for i in range(len(gens)) for j in range(i + 1, len(gens))]
    frag = dict(info, generators=[r.to_json() for r in table], commutators=comms, t0=cfg.t0)
    return frag, gens


# -- commands -------------------------------------------------------------------------

def run_analyze(cfg: AnalysisConfig) -> tuple[dict, int]:
    from .criteria import (corollary4_check, corollary4_probe, family_classify, prop5_check,
                           theorem6_check, theorem7_check)
    report = new_report("analyze", cfg)
    checks: dict = {}
    certs: dict = {}
    errors: list = []
    report["checks"] = checks
    report["certificates"] = certs
    params = cfg.family_params() if cfg.family is not None else None
    if params is not None and _is_boundary(params) and any(c in RESONANT_CHECKS for c in cfg.checks):
        raise CriteriaError(BOUNDARY_MESSAGE)
    numeric = _numeric_errors()
    if params is not None and params.k == 2 * params.n:
        try:
            report["resolution"] = family_classify(params, cfg.order).to_json()
        except CriteriaError as exc:
            report["resolution"] = {"error": str(exc)}
    for check in cfg.checks:
        try:
            if check == "prop5":
                checks["prop5"] = prop5_check(params)
            elif check == "cor4":
                v = corollary4_check(params.k, params.n, params.alpha_sq, commutator_tol=cfg.commutator_tol)
                if v.inconclusive and "holonomy" not in v.evidence:
                    probe, _ = corollary4_probe(params.k, params.n, params.alpha_value(), params.U,
                                                t0=cfg.t0, max_order=cfg.max_order, tol=cfg.period_tol)
                    v = corollary4_check(params.k, params.n, params.alpha_sq, probe, cfg.commutator_tol)
                checks["cor4"] = v
            elif check == "thm6":
                F = _candidate(cfg)
                checks["thm6"] = theorem6_check(params, F, hold_tol=cfg.hold_tol, fail_tol=cfg.fail_tol,
                                                order=cfg.order)
            elif check == "thm7":
                checks["thm7"] = theorem7_check(params, order=cfg.order)
            elif check == "section":
                sec = _section(cfg, params)
                report["section"] = None if isinstance(sec, Verdict) else sec.to_json()
                if isinstance(sec, Verdict):
                    checks["section"] = sec
                else:
                    certs["section"] = sec.certificate
            elif check == "first-integral":
                v, pv = _first_integral(cfg, params)
                checks["first-integral"] = v
                certs["first_integral"] = {"planar": _cert(v), "pullback": _cert(pv) if pv else None}
            elif check == "holonomy":
                report["holonomy"], _ = holonomy_fragment(cfg)
        except numeric as exc:
            errors.append(_error(type(exc).__name__, str(exc), check))
    if cfg.candidate is not None and "first-integral" not in cfg.checks and params is not None:
        try:
            v, pv = _first_integral(cfg, params)
            certs["first_integral"] = {"planar": _cert(v), "pullback": _cert(pv) if pv else None}
        except numeric as exc:
            errors.append(_error(type(exc).__name__, str(exc), "first-integral"))
    if errors:
        report["errors"] = errors
        report["status"] = "error"
    return report, EXIT_NUMERIC if errors else EXIT_OK


def _cert(v: Verdict) -> dict:
    return {"status": v.status, "order": v.order, "exact": v.evidence.get("exact")}


def _first_integral(cfg: AnalysisConfig, params, text: str | None = None, form=None):
    from .integral import monomial_fiber_map, pullback_integral, verify_first_integral
    vars = form.vars if form is not None else ("t", "z")
    F = _candidate(cfg, text, vars)
    if F is None:
        raise ConfigError("no candidate first integral: give [candidate] F or --F")
    if form is None:
        form = params.form_2d()
    v = verify_first_integral(F, form)
    pv = None
    if params is not None and form.vars == ("t", "z"):
        fs = _fspec(cfg)
        if fs.monomial:
            phi = monomial_fiber_map((fs.a, fs.b))
            pv = verify_first_integral(pullback_integral(F, phi), phi.pullback(form), cfg.order)
    return v, pv


def _section(cfg: AnalysisConfig, params):
    from .integral import NotDicritical, dicriticalness_section
    try:
        return dicriticalness_section(params, _fspec(cfg), cfg.section_order)
    except NotDicritical as exc:
        return Verdict(FAILS, "section", f"no section: {exc}", {})


def run_blowup(cfg: AnalysisConfig, steps: int | None = None, dim: int = 3) -> tuple[dict, int]:
    from .blowup import blowup_axis_3d, blowup_point, blowup_point_2d, axis_in_singular_locus
    from .germ import FoliationGerm
    report = new_report("blowup", cfg)
    trace = []
    if cfg.form is not None:
        form = _form(cfg)
        n = 1 if steps is None else steps
        cur = form
        for _ in range(n):
            res = blowup_point_2d(cur) if len(cur.vars) == 2 else blowup_point(cur)
            cur = res.form
            trace.append(res.to_json())
        out_vars = cur.vars
    else:
        params = cfg.family_params()
        if dim == 2:
            cur = params.form_2d()
            n = params.n if steps is None else steps
            for _ in range(n):
                res = blowup_point_2d(cur)
                cur = res.form.rename({res.form.vars[1]: "z"})
                trace.append(res.to_json())
        else:
            cur = params.form_3d()
            owed = {"x": params.q * params.n, "y": params.p * params.n}
            n = sum(owed.values()) if steps is None else steps
            for step in range(n):
                axis = next((a for a in ("x", "y") if owed[a] and axis_in_singular_locus(cur, a)), None)
                if axis is None:
                    raise CriteriaError(f"no owed axis in the singular locus after {step} steps")
                res = blowup_axis_3d(FoliationGerm(cur), axis, 1, "z")
                cur = res.form
                owed[axis] -= 1
                trace.append(dict(res.to_json(), axis=axis))
        if trace:
            # the fiber coordinate after the chain is printed as w
            cur = cur.rename({"z": "w"})
        out_vars = cur.vars
    report["resolution"] = {"steps": trace, "form": str(cur), "vars": list(out_vars)}
    return report, EXIT_OK


def run_classify(cfg: AnalysisConfig) -> tuple[dict, int]:
    from .classify import classify_simple_type, first_integral_local_verdict
    from .criteria import family_classify, planar_points, prop5_check
    from .germ import FoliationGerm
    report = new_report("classify", cfg)
    if cfg.form is not None:
        w = _form(cfg)
        div = (cfg.form.divisor,) if cfg.form.divisor else ()
        cls = classify_simple_type(FoliationGerm(w, div), order=cfg.order)
        report["classification"] = {"form": cls.to_json(), "local": first_integral_local_verdict(cls).to_json()}
        return report, EXIT_OK
    params = cfg.family_params()
    out: dict = {}
    if params.k == 2 * params.n:
        if _is_boundary(params):
            raise CriteriaError(BOUNDARY_MESSAGE)
        out["family"] = family_classify(params, cfg.order).to_json()
        out["planar"] = [{"w": p["w"], "class": p["class"].to_json(), "local": p["verdict"].to_json()}
                         for p in planar_points(params.k, params.n, params.alpha_value(), params.U, cfg.order)]
    else:
        out["prop5"] = prop5_check(params).to_json()
    report["classification"] = out
    return report, EXIT_OK


def run_holonomy(cfg: AnalysisConfig, csv_path: str | None = None) -> tuple[dict, int]:
    report = new_report("holonomy", cfg)
    frag, gens = holonomy_fragment(cfg)
    report["holonomy"] = frag
    if csv_path:
        write_csv(csv_path, orbit_samples(gens, cfg.t0, cfg.samples))
    return report, EXIT_OK


def run_section(cfg: AnalysisConfig) -> tuple[dict, int]:
    report = new_report("section", cfg)
    params = cfg.family_params()
    if _is_boundary(params):
        raise CriteriaError(BOUNDARY_MESSAGE)
    sec = _section(cfg, params)
    if isinstance(sec, Verdict):
        report["section"] = None
        report["checks"] = {"section": sec}
    else:
        report["section"] = sec.to_json()
        report["certificates"] = {"section": sec.certificate}
    return report, EXIT_OK


def run_verify_integral(cfg: AnalysisConfig, F_text: str | None = None) -> tuple[dict, int]:
    report = new_report("verify-integral", cfg)
    form = _form(cfg) if cfg.form is not None else None
    params = cfg.family_params() if cfg.family is not None else None
    v, pv = _first_integral(cfg, params, F_text, form)
    report["checks"] = {"first-integral": v}
    report["certificates"] = {"first_integral": {"planar": _cert(v), "pullback": _cert(pv) if pv else None}}
    if pv is not None:
        report["checks"]["first-integral-pullback"] = pv
    return report, EXIT_OK


# -- entry point ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="TOML config file or packaged fixture name")
    common.add_argument("--order", type=int, help="truncation order (overrides the config)")
    common.add_argument("--tol", type=float, help="holds threshold for numeric tests")
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="exact", action="store_true", default=None, help="exact arithmetic")
    mode.add_argument("--float", dest="exact", action="store_false", help="floating-point arithmetic")
    common.add_argument("--json", metavar="PATH", help="write the JSON report here ('-' for stdout)")

    ap = argparse.ArgumentParser(prog="cuspfol", description=__doc__.splitlines()[0])
    ap.add_argument("--list-fixtures", action="store_true", help="list packaged fixtures and exit")
    sub = ap.add_subparsers(dest="command")
    sub.add_parser("analyze", parents=[common], help="run the configured checks")
    bp = sub.add_parser("blowup", parents=[common], help="print saturated blow-up transforms")
    bp.add_argument("--steps", type=int, help="number of blow-ups (default: the full chain)")
    bp.add_argument("--dim", type=int, choices=(2, 3), default=3, help="planar shadow or 3D family")
    sub.add_parser("classify", parents=[common], help="classify singular points")
    hp = sub.add_parser("holonomy", parents=[common], help="holonomy generator table")
    hp.add_argument("--csv", metavar="PATH", help="write orbit samples as CSV")
    sub.add_parser("section", parents=[common], help="construct the dicriticalness section")
    vp = sub.add_parser("verify-integral", parents=[common], help="verify a candidate first integral")
    vp.add_argument("--F", dest="F", help="candidate first integral (expression)")
    return ap


def _summary(report: dict) -> str:
    lines = []
    res = report.get("resolution") or {}
    if report["command"] == "blowup":
        lines.append(res.get("form", ""))
    for name, v in sorted((report.get("checks") or {}).items()):
        v = v.to_json() if isinstance(v, Verdict) else v
        lines.append(f"{name}: {v['status']} ({v['reason']})")
    hol = report.get("holonomy")
    if hol:
        for g in hol["generators"]:
            m = g["multiplier"]
            lines.append(f"{g['label']}: multiplier {m['re']:.9g}{m['im']:+.9g}i, order {g['periodicity_order']}")
        for c in hol.get("commutators", []):
            lines.append(f"commutator displacement {c:.3g}")
    for name, cert in sorted((report.get("certificates") or {}).items()):
        lines.append(f"certificate {name}: {cert}")
    cls = report.get("classification")
    if cls and "family" in cls:
        lines.append(f"family: {cls['family']['label']}")
    elif cls and "form" in cls:
        lines.append(f"class: {cls['form'].get('label')}")
    for e in report.get("errors", []) + ([report["error"]] if "error" in report else []):
        lines.append(f"error ({e['kind']}): {e['message']}")
    return "\n".join(lines)


def _emit(report: dict, args) -> None:
    text = dumps(report)
    if args.json == "-":
        sys.stdout.write(text)
        return
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text)
    print(_summary(report))


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.list_fixtures:
        print("\n".join(list_fixtures()))
        return EXIT_OK
    if not args.command:
        ap.print_help()
        return EXIT_CONFIG
    cfg = None
    try:
        cfg = load_config(args.config).with_overrides(args.order, args.tol, args.exact)
        if args.command == "analyze":
            report, code = run_analyze(cfg)
        elif args.command == "blowup":
            if args.steps is not None and args.steps < 0:
                raise ConfigError("--steps must be non-negative")
            report, code = run_blowup(cfg, args.steps, args.dim)
        elif args.command == "classify":
            report, code = run_classify(cfg)
        elif args.command == "holonomy":
            report, code = run_holonomy(cfg, args.csv)
        elif args.command == "section":
            report, code = run_section(cfg)
        else:
            report, code = run_verify_integral(cfg, args.F)
    except (ConfigError, ParseError, CriteriaError) as exc:
        report, code = new_report(args.command, cfg), EXIT_CONFIG
        report["status"] = "error"
        report["error"] = _error(type(exc).__name__, str(exc))
    except _numeric_errors() as exc:
        report, code = new_report(args.command, cfg), EXIT_NUMERIC
        report["status"] = "error"
        report["error"] = _error(type(exc).__name__, str(exc))
    _emit(report, args)
    if code == EXIT_CONFIG and args.json != "-":
        print(f"cuspfol: {report['error']['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
