"""Cuspidal nilpotent foliations: blow-ups, classification, first-integral criteria and holonomy."""
from __future__ import annotations

__version__ = "0.1.0"

from .criteria import (FamilyParams, alpha_resonance_solve, corollary4_check, family_classify,
                       prop5_check, theorem6_check, theorem7_check)
from .forms import Form, SubstitutionMap, VectorField
from .germ import FoliationGerm
from .integral import (MeroFunction, PuiseuxCurve, SectionMap, dicriticalness_section, rectify,
                       separatrix_family, verify_first_integral, verify_separatrix)
from .parser import parse_form, parse_one_form, parse_series
from .scalar import QQi
from .series import TruncSeries
from .verdict import FAILS, HOLDS, INCONCLUSIVE, Verdict

__all__ = [
    "FAILS", "HOLDS", "INCONCLUSIVE", "FamilyParams", "FoliationGerm", "Form", "MeroFunction",
    "PuiseuxCurve", "QQi", "SectionMap", "SubstitutionMap", "TruncSeries", "VectorField", "Verdict",
    "alpha_resonance_solve", "corollary4_check", "dicriticalness_section", "family_classify",
    "parse_form", "parse_one_form", "parse_series", "prop5_check", "rectify", "separatrix_family",
    "theorem6_check", "theorem7_check", "verify_first_integral", "verify_separatrix",
]
