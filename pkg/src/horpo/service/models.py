"""Request and response schemas of the orientation service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class EngineOptions(BaseModel):
    mode: Literal["sound", "paper"] = "sound"
    smt: Literal["off", "auto", "always"] = "auto"
    bound: int = Field(default=16, ge=0)
    budget_nodes: int = Field(default=100_000, ge=1)
    budget_ms: int = Field(default=10_000, ge=1)
    seed: int = 0
    filters: Literal["search", "full"] = "search"


class ErrorModel(BaseModel):
    code: str
    message: str
    line: int = 0
    col: int = 0


class DerivationModel(BaseModel):
    rule: str
    slug: str
    left: str
    right: str
    index: Optional[int] = None
    entailment: Optional[str] = None
    premises: list["DerivationModel"] = []


class RuleReport(BaseModel):
    index: int
    rule: str
    demand: Literal["strict", "weak"]
    ok: bool
    clause: Optional[str] = None
    clause_slug: Optional[str] = None
    reason: Optional[str] = None


class StatsModel(BaseModel):
    candidates: int = 0
    nodes: int = 0
    entailment_calls: int = 0
    entailment_cache_hits: int = 0
    elapsed_ms: int = 0


class ParamsModel(BaseModel):
    """Found or supplied parameters, in the params-file line syntax."""

    precedence: list[str] = []
    filters: dict[str, list[int]] = {}


class CheckRequest(BaseModel):
    problem: str
    params: Optional[str] = None
    options: EngineOptions = EngineOptions()


class CheckResponse(BaseModel):
    ok: bool
    rules: list[RuleReport]
    warnings: list[str] = []


class OrientRequest(BaseModel):
    problem: str
    options: EngineOptions = EngineOptions()


class OrientResponse(BaseModel):
    status: Literal["oriented", "space-exhausted", "budget-exhausted"]
    params: Optional[ParamsModel] = None
    rules: list[RuleReport] = []
    stats: StatsModel = StatsModel()


class ExplainRequest(BaseModel):
    problem: str
    params: Optional[str] = None
    rule: int = Field(default=1, ge=1)
    options: EngineOptions = EngineOptions()


class ExplainResponse(BaseModel):
    rule: str
    demand: Literal["strict", "weak"]
    ok: bool
    derivation: Optional[DerivationModel] = None
    reason: Optional[str] = None
    params: Optional[ParamsModel] = None


class SelftestRequest(BaseModel):
    universe_size: int = Field(default=4, ge=1, le=7)
    substitutions: int = Field(default=25, ge=0)
    seed: int = 0
    mode: Literal["sound", "paper"] = "sound"


class LemmaLine(BaseModel):
    parameter_set: str
    name: str
    passed: bool
    checked: int
    counterexample: Optional[str] = None


class SelftestResponse(BaseModel):
    passed: bool
    universe_terms: int
    lemmas: list[LemmaLine]
    agreement_pairs: int
    agreement_ok: bool
    mismatches: list[str] = []


class HealthResponse(BaseModel):
    status: str
    version: str
