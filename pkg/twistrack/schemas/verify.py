from __future__ import annotations

from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class H2Request(BaseModel):
    q: int = Field(..., ge=3, description="odd prime power, q = 3 mod 4")


class H2Report(BaseModel):
    q: int
    trace_half: str = Field(..., description="Tr(z)/2 as a GF(q) element")
    x: str
    order_x_squared: int
    order_u1: int
    expected: int
    conditions: Dict[str, bool]


class Psl43Report(BaseModel):
    scanned: int
    invertible: int
    max_proj_order: int
    histogram: Dict[int, int]
    delta_histogram: Dict[str, int]


class UnipotentRequest(BaseModel):
    n: int = Field(..., ge=4)
    q: int = Field(..., ge=5)
    eta_square: bool = True


class UnipotentReport(BaseModel):
    n: int
    q: int
    eta: str
    xi: Optional[str] = None
    branch: str
    r: str
    s: str
    left: str
    right: str
    subrack_sizes: List[int]


class OddUnipotentReport(BaseModel):
    n: int
    q: int
    r: str
    s: str
    pairs_tried: int
    subrack_sizes: List[int]


class MissingClassReport(BaseModel):
    n: int
    q: int
    exponent: int
    representative: str
    theta_semisimple: bool
    theta_product_order: int
    sampled_orders: List[int]
    all_odd: bool


class QuestionRequest(BaseModel):
    n: int = Field(..., ge=2)
    q: int = Field(..., ge=3)
    budget: int = Field(default=10_000, ge=1)


class QuestionReport(BaseModel):
    n: int
    q: int
    witness: Optional[str] = None
    witness_order: Optional[int] = None
    phase: Optional[str] = None
    tried: int
    exhaustive: bool
    in_sl: bool = Field(..., description="whether t_eta itself has determinant 1")


class Theorem51Report(BaseModel):
    n: int
    q: int
    covered: bool
    classes: int
    semisimple_classes: int
    uncovered: List[str] = Field(default_factory=list)
