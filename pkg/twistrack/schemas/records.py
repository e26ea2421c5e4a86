from __future__ import annotations

from typing import Any, Dict, Optional

from pydantic import BaseModel, Field


class ReportRecord(BaseModel):
    """One JSON line of CLI output."""

    tool_version: str
    command: str
    inputs: Dict[str, Any] = Field(default_factory=dict)
    modulus: Optional[str] = None
    outcome: str
    witness: Any = None
    timing_ms: float = 0.0
