###############################################################################
# pvakit: exact computer algebra for non-local Hamiltonian structures.
# Copyright © 2026 by the pvakit developers. All rights reserved.
# Distributed under the BSD 3-clause license; see LICENSE.md.
###############################################################################
"""
Jupyter Notebook utilities
"""
# stdlib
from typing import Optional
from warnings import warn

# third-party
from IPython.display import Markdown

# package
from pvakit.lenard import HierarchyState
from pvakit.report import CheckReport, HierarchyReport


def _cell(text: Optional[str]) -> str:
    if text is None:
        return "-"
    return "`" + text.replace("|", "\\|") + "`"


def display_report(report: CheckReport) -> Markdown:
    """Display a check report as a Markdown table of verdicts.

    Args:
        report: Report from one of the checks in `pvakit.pva`

    Returns:
        Markdown object for Jupyter Notebook to render
    """
    if report is None:
        warn("Nothing to display")
        return None
    engine = f" ({report.engine})" if report.engine else ""
    lines = [f"**{report.check}{engine}** on {_cell(report.operator)}: **{report.verdict.value}**"]
    if report.verdicts:
        lines += ["", "| i | j | k | verdict | witness |", "|---|---|---|---|---|"]
        for v in report.verdicts:
            lines.append(f"| {v.i} | {v.j} | {v.k} | {v.verdict.value} | {_cell(v.witness)} |")
    if report.details:
        lines += ["", "| detail | value |", "|---|---|"]
        for key, value in report.details.items():
            lines.append(f"| {key} | {_cell(str(value))} |")
    return Markdown("\n".join(lines))


def display_hierarchy(hierarchy, operator: str = "") -> Markdown:
    """Display the densities and vector fields of a Lenard-Magri run.

    Args:
        hierarchy: A `HierarchyReport`, or a `HierarchyState` (then `operator` names it)
        operator: Label used when `hierarchy` is a state

    Returns:
        Markdown object for Jupyter Notebook to render
    """
    if isinstance(hierarchy, HierarchyState):
        hierarchy = hierarchy.to_report(operator)
    if not isinstance(hierarchy, HierarchyReport):
        warn("Nothing to display")
        return None
    lines = [f"**Lenard-Magri** for {_cell(hierarchy.operator)}", ""]
    lines += ["| n | h | P | checks |", "|---|---|---|---|"]
    for step in hierarchy.steps:
        ok = "ok" if all(step.checks.values()) else "FAIL"
        lines.append(f"| {step.n} | {_cell(step.h)} | {_cell(', '.join(step.P))} | {ok} |")
    if hierarchy.obstruction:
        lines += ["", f"Obstruction: {hierarchy.obstruction}"]
    return Markdown("\n".join(lines))
