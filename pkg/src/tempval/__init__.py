__version__ = "0.1.0"

from .core import PlanValidator, check_plan, report_plan
from .enums import HappeningPath, InvariantSemantics, Mutation, Verdict
from .exceptions import GroundingError, ParseError, TempvalError, ValidationError, WellFormednessError
from .models import CorpusRun, DiffTestReport, RunReport, SizeBounds
from .parser import parse_domain, parse_plan, parse_problem

__all__ = (
    "CorpusRun",
    "DiffTestReport",
    "GroundingError",
    "HappeningPath",
    "InvariantSemantics",
    "Mutation",
    "ParseError",
    "PlanValidator",
    "RunReport",
    "SizeBounds",
    "TempvalError",
    "ValidationError",
    "Verdict",
    "WellFormednessError",
    "check_plan",
    "parse_domain",
    "parse_plan",
    "parse_problem",
    "report_plan",
)
