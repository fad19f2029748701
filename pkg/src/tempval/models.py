from __future__ import annotations

from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field

from .enums import HappeningPath, InvariantSemantics, Mutation, Verdict

__all__ = ("CorpusRun", "DiffTestReport", "Disagreement", "RunReport", "SizeBounds")


class RunReport(BaseModel):
    verdict: Verdict
    message: str
    duration_seconds: float = Field(ge=0)
    happening_count: int = Field(default=0, ge=0)
    step_count: int = Field(default=0, ge=0)
    path: Optional[HappeningPath] = None

    @property
    def ok(self) -> bool:
        return self.verdict == Verdict.Valid


class CorpusRun(BaseModel):
    """One plan of a benchmark corpus together with the files it was checked against."""

    plan: Path
    domain: Path
    problem: Path
    report: RunReport


class SizeBounds(BaseModel):
    """Upper bounds on the random ground instances generated for differential testing."""

    max_atoms: int = Field(default=8, ge=1)
    max_actions: int = Field(default=6, ge=1)
    max_steps: int = Field(default=6, ge=0)
    max_denominator: int = Field(default=8, ge=1)
    max_time: int = Field(default=4, ge=0)


class Disagreement(BaseModel):
    case: int
    reference_valid: bool
    pipeline_valid: bool
    reference_state: Optional[list[str]] = None
    pipeline_state: Optional[list[str]] = None
    reproducer: str = ""


class DiffTestReport(BaseModel):
    seed: int
    count: int
    semantics: InvariantSemantics
    mutation: Optional[Mutation] = None
    disagreements: list[Disagreement] = Field(default_factory=list)
    duration_seconds: float = Field(default=0.0, ge=0)

    @property
    def ok(self) -> bool:
        return not self.disagreements
