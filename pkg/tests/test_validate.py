import json

import pytest

from dopolab.harness.compare import Check
from dopolab.harness.validate import (
    EVIDENCE,
    ValidationReport,
    check_conjugate_symmetry,
    check_eigensystem,
    check_full_matrix,
    check_noise_statistics,
    check_optimal_time,
    check_ou_variance,
    check_projection_spectrum,
    check_stratonovich,
    check_wiener_correlations,
    log_evidence,
    validate,
)

SEED = 99


@pytest.mark.parametrize("check", [check_eigensystem, check_full_matrix, check_projection_spectrum, check_optimal_time])
def test_closed_form_checks_pass(check):
    result = check()
    assert result.passed, result


def test_integrator_checks_pass_on_small_ensembles():
    assert check_ou_variance(SEED, n=2000).passed
    strat = check_stratonovich(SEED, n=4000)
    assert strat.passed, strat.detail
    assert check_noise_statistics(SEED, n=100_000).passed


def test_conjugate_symmetry_check():
    check = check_conjugate_symmetry(SEED, n=8, tau_end=0.3)
    assert check.passed
    assert check.value < 1e-8


def test_wiener_check():
    assert check_wiener_correlations(SEED, n=20_000).passed


def test_evidence_is_appended_as_json_lines(tmp_path):
    path = tmp_path / "nested" / EVIDENCE
    log_evidence(path, {"name": "a", "value": 1})
    log_evidence(path, {"name": "b", "value": 2.5})
    lines = [json.loads(line) for line in path.read_text().splitlines()]
    assert [entry["name"] for entry in lines] == ["a", "b"]
    assert lines[0]["ts"].endswith("Z")


def test_report_records_criterion_and_verdict(tmp_path):
    report = ValidationReport(evidence=tmp_path / EVIDENCE)
    report.add(1, Check("ok", True, 0.0))
    assert report.passed
    report.add(6, Check("bad", False, 7.5, {"z": 7.5}))
    assert not report.passed
    entries = [json.loads(line) for line in (tmp_path / EVIDENCE).read_text().splitlines()]
    assert [(e["criterion"], e["passed"]) for e in entries] == [(1, True), (6, False)]
    assert entries[1]["detail"] == {"z": 7.5}


@pytest.mark.slow
def test_fast_suite_passes(tmp_path):
    report = validate(tmp_path)
    assert report.passed, [c for c in report.checks if not c["passed"]]
    assert (tmp_path / EVIDENCE).exists()
    assert {c["criterion"] for c in report.checks} == {1, 2, 6, 7, 8, 9}
