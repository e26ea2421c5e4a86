from __future__ import annotations

from typing import List, Optional

from pydantic import BaseModel, Field


class TorusRequest(BaseModel):
    n: int = Field(..., ge=2)
    q: int = Field(..., ge=3)
    lam: List[int] = Field(..., min_length=1)
    eps: List[int] = Field(..., min_length=1)
    realize: bool = Field(default=False, description="also build the torus as matrices")


class TorusReport(BaseModel):
    n: int
    q: int
    lam: List[int]
    eps: List[int]
    torus: str
    torus_order: int
    k_subgroup: str
    gamma_image: str
    gamma_image_order: int
    max_order: int
    zeta: bool
    two_orbits: bool
    realized_order: Optional[int] = None
    realized_exponent: Optional[int] = None
    theta_stable: Optional[bool] = None
