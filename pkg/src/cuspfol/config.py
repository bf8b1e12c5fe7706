"""Analysis configuration files.

The format is TOML.  Recognised tables::

    [family]      p, q, n, k, alpha or alpha_sq, U (list), f
    [analysis]    order, section_order, checks, exact, hold_tol, fail_tol
    [candidate]   F (expression in t, z)
    [form]        text, vars, divisor, marked, basepoint, radius
    [holonomy]    t0, max_order, period_tol, commutator_tol, samples

``f`` is either ``[p1, p2]`` or a table ``{a = .., b = .., V = "expr in x, y"}``.
Numbers given as strings (``"64/3"``) are read exactly.  A config may
contain only a ``[form]`` table, in which case family checks are skipped.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .criteria import CriteriaError, FamilyParams

KNOWN_CHECKS = ("prop5", "cor4", "thm6", "thm7", "holonomy", "section", "first-integral")
DEFAULT_CHECKS = ("prop5", "thm6", "thm7")


class ConfigError(ValueError):
    pass


@dataclass
class FormSpec:
    text: str
    vars: tuple
    divisor: str | None = None
    marked: tuple = ()
    basepoint: complex | None = None
    radius: float | None = None


@dataclass
class AnalysisConfig:
    family: FamilyParams | None = None
    f: object = None
    form: FormSpec | None = None
    candidate: str | None = None
    order: int = 12
    section_order: int = 8
    checks: tuple = DEFAULT_CHECKS
    exact: bool = True
    hold_tol: float = 1e-6
    fail_tol: float = 1e-2
    t0: float = 0.05
    max_order: int = 12
    period_tol: float = 1e-4
    commutator_tol: float = 1e-3
    samples: int = 8
    source: str = ""
    raw: dict = field(default_factory=dict)

    def with_overrides(self, order=None, tol=None, exact=None) -> "AnalysisConfig":
        cfg = replace(self)
        if order is not None:
            if order < 1:
                raise ConfigError("--order must be positive")
            cfg.order = order
        if tol is not None:
            if not 0 < tol < cfg.fail_tol:
                raise ConfigError("--tol must lie in (0, fail_tol)")
            cfg.hold_tol = tol
        if exact is not None:
            cfg.exact = exact
        return cfg

    def family_params(self) -> FamilyParams:
        """Family parameters, converted to floating point in float mode."""
        if self.family is None:
            raise ConfigError("this command needs a [family] table")
        if self.exact:
            return self.family
        fam = self.family
        return FamilyParams(fam.p, fam.q, fam.k, fam.n, complex(fam.alpha_sq), tuple(complex(c) for c in fam.U),
                            None if fam.alpha is None else complex(fam.alpha))

    def to_json(self):
        return {
            "source": self.source,
            "family": self.family.to_json() if self.family else None,
            "f": _f_json(self.f),
            "form": None if self.form is None else {
                "text": self.form.text, "vars": list(self.form.vars), "divisor": self.form.divisor,
                "marked": [_cjson(m) for m in self.form.marked],
                "basepoint": None if self.form.basepoint is None else _cjson(self.form.basepoint),
                "radius": self.form.radius},
            "candidate": self.candidate,
            "order": self.order, "section_order": self.section_order, "checks": list(self.checks),
            "exact": self.exact, "hold_tol": self.hold_tol, "fail_tol": self.fail_tol,
            "t0": self.t0, "max_order": self.max_order, "period_tol": self.period_tol,
            "commutator_tol": self.commutator_tol,
        }


def _cjson(z):
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _f_json(f):
    if f is None:
        return None
    if isinstance(f, tuple) and len(f) == 2:
        return list(f)
    return {"a": f[0], "b": f[1], "V": f[3]}


def _scalar(value, what: str):
    if isinstance(value, bool):
        raise ConfigError(f"{what}: expected a number, got a boolean")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # 2.5 in a config means the exact 5/2 when it is exactly representable
        return Fraction(value).limit_denominator(10 ** 6) if value == round(value, 6) else value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            try:
                return complex(value.replace("i", "j").replace(" ", ""))
            except ValueError:
                raise ConfigError(f"{what}: cannot read {value!r} as a number") from None
    if isinstance(value, dict) and set(value) <= {"re", "im"}:
        return complex(value.get("re", 0), value.get("im", 0))
    raise ConfigError(f"{what}: cannot read {value!r} as a number")


def _complex(value, what: str) -> complex:
    v = _scalar(value, what)
    return complex(v)


def _int(table: dict, key: str, default=None) -> int:
    v = table.get(key, default)
    if v is None:
        raise ConfigError(f"missing required key {key!r}")
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{key}: expected an integer, got {v!r}")
    return v


def _parse_family(tab: dict) -> tuple:
    unknown = set(tab) - {"p", "q", "n", "k", "alpha", "alpha_sq", "U", "f"}
    if unknown:
        raise ConfigError(f"[family]: unknown keys {sorted(unknown)}")
    p, q = _int(tab, "p", 1), _int(tab, "q", 1)
    n, k = _int(tab, "n"), _int(tab, "k")
    alpha = tab.get("alpha")
    alpha_sq = tab.get("alpha_sq")
    if alpha is None and alpha_sq is None:
        raise ConfigError("[family]: give alpha or alpha_sq")
    from .criteria import _exact_scalar
    a = None if alpha is None else _scalar(alpha, "alpha")
    if alpha_sq is None:
        a_ex = _exact_scalar(a)
        alpha_sq = a_ex * a_ex
    else:
        alpha_sq = _scalar(alpha_sq, "alpha_sq")
    U = tuple(_scalar(c, "U") for c in tab.get("U", [1]))
    try:
        fam = FamilyParams(p, q, k, n, alpha_sq, U, a)
    except (CriteriaError, TypeError) as exc:
        raise ConfigError(f"[family]: {exc}") from None
    f = tab.get("f")
    if f is not None:
        f = _parse_f(f)
    return fam, f


def _parse_f(f):
    if isinstance(f, list):
        if len(f) != 2 or not all(isinstance(x, int) and x > 0 for x in f):
            raise ConfigError("f must be [p1, p2] with positive integers")
        return (f[0], f[1])
    if isinstance(f, dict):
        a, b = _int(f, "a"), _int(f, "b")
        V = f.get("V", "1")
        from .parser import ParseError, parse_series
        try:
            series = parse_series(str(V), ("x", "y"))
        except ParseError as exc:
            raise ConfigError(f"f.V: {exc}") from None
        return (a, b, series, str(V))
    raise ConfigError("f must be [p1, p2] or a table {a, b, V}")


def _parse_form(tab: dict) -> FormSpec:
    text = tab.get("text")
    if not isinstance(text, str):
        raise ConfigError("[form]: 'text' is required")
    vars = tuple(tab.get("vars", ()))
    if len(vars) not in (2, 3):
        raise ConfigError("[form]: 'vars' must list two or three variable names")
    from .parser import ParseError, parse_one_form
    try:
        parse_one_form(text, vars)
    except ParseError as exc:
        raise ConfigError(f"[form]: {exc}") from None
    divisor = tab.get("divisor")
    if divisor is not None and divisor not in vars:
        raise ConfigError(f"[form]: divisor {divisor!r} is not one of {vars}")
    marked = tuple(_complex(m, "marked") for m in tab.get("marked", ()))
    bp = tab.get("basepoint")
    return FormSpec(text, vars, divisor, marked, None if bp is None else _complex(bp, "basepoint"),
                    None if tab.get("radius") is None else float(tab["radius"]))


def parse_config(data: dict, source: str = "<memory>") -> AnalysisConfig:
    unknown = set(data) - {"family", "analysis", "candidate", "form", "holonomy"}
    if unknown:
        raise ConfigError(f"unknown tables {sorted(unknown)}")
    cfg = AnalysisConfig(source=source, raw=data)
    if "family" in data:
        cfg.family, cfg.f = _parse_family(data["family"])
    if "form" in data:
        cfg.form = _parse_form(data["form"])
    if cfg.family is None and cfg.form is None:
        raise ConfigError("config needs a [family] or a [form] table")
    an = data.get("analysis", {})
    cfg.order = _int(an, "order", cfg.order)
    cfg.section_order = _int(an, "section_order", cfg.section_order)
    checks = an.get("checks")
    if checks is not None:
        bad = [c for c in checks if c not in KNOWN_CHECKS]
        if bad:
            raise ConfigError(f"unknown checks {bad}; known: {list(KNOWN_CHECKS)}")
        cfg.checks = tuple(checks)
    elif cfg.family is None:
        cfg.checks = ()
    cfg.exact = bool(an.get("exact", True))
    cfg.hold_tol = float(an.get("hold_tol", cfg.hold_tol))
    cfg.fail_tol = float(an.get("fail_tol", cfg.fail_tol))
    if not 0 < cfg.hold_tol < cfg.fail_tol:
        raise ConfigError("need 0 < hold_tol < fail_tol")
    cand = data.get("candidate", {})
    if "F" in cand:
        cfg.candidate = str(cand["F"])
        from .parser import ParseError, parse_quotient
        try:
            parse_quotient(cfg.candidate, ("t", "z"))
        except ParseError as exc:
            raise ConfigError(f"[candidate]: {exc}") from None
    hol = data.get("holonomy", {})
    cfg.t0 = float(hol.get("t0", cfg.t0))
    cfg.max_order = _int(hol, "max_order", cfg.max_order)
    cfg.period_tol = float(hol.get("period_tol", cfg.period_tol))
    cfg.commutator_tol = float(hol.get("commutator_tol", cfg.commutator_tol))
    cfg.samples = _int(hol, "samples", cfg.samples)
    if cfg.family is None and any(c != "holonomy" for c in cfg.checks):
        raise ConfigError("family checks requested without a [family] table")
    return cfg


def fixture_path(name: str) -> Path | None:
    """Path of a packaged fixture (``alpha5`` or ``alpha5.toml``)."""
    fname = name if name.endswith(".toml") else name + ".toml"
    res = resources.files("cuspfol") / "fixtures" / fname
    return Path(str(res)) if res.is_file() else None


def list_fixtures() -> list:
    root = resources.files("cuspfol") / "fixtures"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".toml"))


def load_config(path_or_name: str) -> AnalysisConfig:
    path = Path(path_or_name)
    if not path.is_file():
        fx = fixture_path(path_or_name)
        if fx is None:
            raise ConfigError(f"no such config file or fixture: {path_or_name}")
        path = fx
    try:
        data = tomllib.loads(path.read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path.name}: {exc}") from None
    return parse_config(data, path.name)
