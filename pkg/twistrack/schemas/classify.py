from __future__ import annotations

from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, field_validator

Outcome = Literal["TypeD", "PossibleException", "NotTypeD"]


class XInfo(BaseModel):
    """What is known about the class representative x; ``None`` means unknown."""

    is_identity_coset: Optional[bool] = Field(
        default=None, description="x lies in the theta-class of 1 in PGL_n(q)"
    )
    theta_inverse: Optional[bool] = Field(
        default=None, description="theta(x) = x^-1, i.e. x.theta is an involution"
    )
    is_missing_class: Optional[bool] = Field(
        default=None, description="the class is the distinguished class of eth"
    )


class ClassDescriptor(BaseModel):
    n: int = Field(..., ge=2)
    q: int = Field(..., ge=3)
    lam: List[int] = Field(..., min_length=1, description="partition of floor(n/2)")
    eps: List[int] = Field(..., min_length=1)
    x_info: XInfo = Field(default_factory=XInfo)

    @field_validator("eps")
    def _binary(cls, value: List[int]) -> List[int]:
        if any(e not in (0, 1) for e in value):
            raise ValueError("eps entries must be 0 or 1")
        return value


class Verdict(BaseModel):
    outcome: Outcome
    justification: str
    table_row: Optional[str] = None
    witness: Dict[str, Any] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)


class SweepRequest(BaseModel):
    n_max: int = Field(..., ge=2, le=16)
    q_max: int = Field(..., ge=3, le=128)
    compare_golden: bool = True


class SweepEntry(BaseModel):
    n: int
    q: int
    lam: List[int]
    eps: List[int]
    row: str

    def key(self) -> tuple:
        return (self.n, self.q, tuple(self.lam), tuple(self.eps), self.row)


class SweepReport(BaseModel):
    n_max: int
    q_max: int
    entries: List[SweepEntry]
    golden_match: Optional[bool] = None
    missing: List[SweepEntry] = Field(default_factory=list)
    extra: List[SweepEntry] = Field(default_factory=list)


class MainTheoremReport(BaseModel):
    n: int
    q: int
    holds: bool
    exceptions: List[SweepEntry] = Field(default_factory=list)


class Refinement(BaseModel):
    n: int
    q: int
    lam: List[int]
    eps: List[int]
    tag: str = "r2e0"


class MonotonicityViolation(BaseModel):
    n: int
    lam: List[int]
    eps: List[int]
    q_certified: int
    q_failing: int
    tag: str


class TableRow(BaseModel):
    """One transcribed row of the exception table.

    ``n`` and ``q`` are selectors: ``{"values": [...]}``, ``{"parity": "even"}``,
    ``{"twice_odd": true}``, ``{"mod": 4, "residue": 3}`` or ``{}`` for any.
    """

    id: str
    lam: Literal["one", "not_one"]
    r: Optional[int] = None
    eps: Optional[List[int]] = None
    eps_first: Optional[int] = None
    n: Dict[str, Any] = Field(default_factory=dict)
    q: Dict[str, Any] = Field(default_factory=dict)
    x: str = "any"
    asterisk: bool = False


class TableRefinement(BaseModel):
    row: str
    q: int
    lam1_min: int = 1
    lam2_min: int = 1


class AsteriskRule(BaseModel):
    row: str
    zeros_min_even: int
    zeros_min_odd: int


class TableDocument(BaseModel):
    rows: List[TableRow]
    refinements: List[TableRefinement] = Field(default_factory=list)
    asterisk: Optional[AsteriskRule] = None
