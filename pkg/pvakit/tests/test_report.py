"""
Tests for `report` module.
"""
import json

import pytest

from pvakit.const import ExitCode, Verdict
from pvakit.report import CheckReport, HierarchyReport, JacobiReport, StepReport
from pvakit.report import TripleVerdict, comparable, exit_code, to_json, to_text


@pytest.fixture
def jacobi_report():
    return JacobiReport(
        operator="d^3 + u^2*d + u*u'",
        engine="exact",
        verdicts=[
            TripleVerdict(i=0, j=0, k=0, verdict=Verdict.FAIL, witness="lam^2*mu: u'"),
        ],
    )


@pytest.mark.unit
def test_overall_verdict(jacobi_report):
    assert jacobi_report.verdict == Verdict.FAIL
    assert jacobi_report.witnesses()[0].witness == "lam^2*mu: u'"
    report = CheckReport(check="skew", operator="d")
    assert report.verdict == Verdict.PASS and report.passed
    report.result = Verdict.UNDETERMINED
    assert report.verdict == Verdict.UNDETERMINED
    assert exit_code(report.verdict) == ExitCode.UNDETERMINED


@pytest.mark.unit
def test_json(jacobi_report):
    text = to_json(jacobi_report)
    data = json.loads(text)
    assert data["schema"] == 1
    assert data["check"] == "jacobi"
    assert data["verdict"] == "fail"
    assert data["verdicts"][0]["witness"] == "lam^2*mu: u'"
    assert to_json(jacobi_report) == text


@pytest.mark.unit
def test_comparable(jacobi_report):
    data = comparable(jacobi_report)
    assert "timestamp" not in data
    later = jacobi_report.model_copy(update={"timestamp": "2000-01-01T00:00:00+00:00"})
    assert comparable(later) == data


@pytest.mark.unit
def test_hierarchy_report():
    step = StepReport(n=0, h="u^2/2", P=["u'"], checks={"C G = P": True})
    report = HierarchyReport(operator="H | K", steps=[step], involution={"H(0,1)": True})
    assert report.verdict == Verdict.PASS
    text = to_text(report)
    assert "h = u^2/2" in text
    assert text.endswith("verdict: pass")
    failed = report.model_copy(update={"obstruction": "solve B at step 1"})
    assert failed.verdict == Verdict.FAIL
    assert "obstruction: solve B at step 1" in to_text(failed)
    bad_step = StepReport(n=1, checks={"B F = xi": False})
    assert HierarchyReport(operator="x", steps=[bad_step]).verdict == Verdict.FAIL


@pytest.mark.unit
def test_text(jacobi_report):
    text = to_text(jacobi_report)
    assert text.startswith("jacobi [exact]: d^3 + u^2*d + u*u'")
    assert "(0,0,0) fail  witness: lam^2*mu: u'" in text
    assert text.endswith("verdict: fail")
