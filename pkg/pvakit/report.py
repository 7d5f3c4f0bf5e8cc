###############################################################################
# pvakit: exact computer algebra for non-local Hamiltonian structures.
# Copyright © 2026 by the pvakit developers. All rights reserved.
# Distributed under the BSD 3-clause license; see LICENSE.md.
###############################################################################
"""
Report models shared by the checks, the hierarchy runner and the command line.
"""

from __future__ import annotations

from datetime import datetime, timezone
import json
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, computed_field

from pvakit.const import REPORT_SCHEMA, ExitCode, Verdict

__author__ = "pvakit developers"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class TripleVerdict(BaseModel):
    i: int
    j: int
    k: int
    verdict: Verdict
    witness: Optional[str] = None


class CheckReport(BaseModel):
    """Outcome of one check on one operator."""

    model_config = ConfigDict(populate_by_name=True)

    schema_: int = Field(REPORT_SCHEMA, alias="schema")
    check: str
    operator: str
    engine: Optional[str] = None
    window: Optional[Dict[str, int]] = None
    verdicts: List[TripleVerdict] = []
    result: Optional[Verdict] = None
    details: Dict[str, Any] = {}
    timestamp: str = Field(default_factory=_now)

    @computed_field
    @property
    def verdict(self) -> Verdict:
        """Overall verdict: any Fail wins, then any Undetermined."""
        found = [v.verdict for v in self.verdicts]
        if self.result is not None:
            found.append(self.result)
        if Verdict.FAIL in found:
            return Verdict.FAIL
        if Verdict.UNDETERMINED in found:
            return Verdict.UNDETERMINED
        return Verdict.PASS

    @property
    def passed(self) -> bool:
        return self.verdict == Verdict.PASS

    def witnesses(self) -> List[TripleVerdict]:
        return [v for v in self.verdicts if v.verdict == Verdict.FAIL]


class JacobiReport(CheckReport):
    check: str = "jacobi"


class StepReport(BaseModel):
    n: int
    h: Optional[str] = None
    P: List[str]
    xi: List[str] = []
    closed: bool = True
    exact: bool = True
    polynomial: bool = True
    checks: Dict[str, bool] = {}


class HierarchyReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_: int = Field(REPORT_SCHEMA, alias="schema")
    check: str = "lenard"
    operator: str
    steps: List[StepReport] = []
    involution: Dict[str, bool] = {}
    obstruction: Optional[str] = None
    assumptions: List[str] = []
    timestamp: str = Field(default_factory=_now)

    @computed_field
    @property
    def verdict(self) -> Verdict:
        if self.obstruction is not None or not all(self.involution.values()):
            return Verdict.FAIL
        for step in self.steps:
            if not all(step.checks.values()):
                return Verdict.FAIL
        return Verdict.PASS


def exit_code(verdict: Verdict) -> int:
    return {
        Verdict.PASS: ExitCode.PASS,
        Verdict.FAIL: ExitCode.FAIL,
        Verdict.UNDETERMINED: ExitCode.UNDETERMINED,
    }[verdict]


def to_json(report: BaseModel, **dump_kw) -> str:
    """Deterministic JSON text (keys sorted, schema alias used)."""
    data = report.model_dump(mode="json", by_alias=True)
    dump_kw.setdefault("indent", 2)
    return json.dumps(data, sort_keys=True, **dump_kw)


def comparable(report: BaseModel) -> Dict[str, Any]:
    """Report data without the timestamp."""
    data = report.model_dump(mode="json", by_alias=True)
    data.pop("timestamp", None)
    return data


def to_text(report: BaseModel) -> str:
    """Plain-text rendering."""
    lines = []
    if isinstance(report, HierarchyReport):
        lines.append(f"lenard: {report.operator}")
        for step in report.steps:
            lines.append(f"  n={step.n}")
            lines.append(f"    h = {step.h if step.h is not None else '-'}")
            lines.append(f"    P = ({', '.join(step.P)})")
            failed = [name for name, ok in step.checks.items() if not ok]
            if failed:
                lines.append(f"    failed: {', '.join(failed)}")
        for pair, ok in report.involution.items():
            lines.append(f"  involution {pair}: {'ok' if ok else 'FAIL'}")
        if report.obstruction:
            lines.append(f"  obstruction: {report.obstruction}")
    else:
        engine = f" [{report.engine}]" if report.engine else ""
        lines.append(f"{report.check}{engine}: {report.operator}")
        for v in report.verdicts:
            extra = f"  witness: {v.witness}" if v.witness else ""
            lines.append(f"  ({v.i},{v.j},{v.k}) {v.verdict.value}{extra}")
        for key, value in report.details.items():
            lines.append(f"  {key}: {value}")
    lines.append(f"verdict: {report.verdict.value}")
    return "\n".join(lines)
