import json

import pytest

from conelip.verify import SUITES, emit_report, run_case, run_suite


def test_suite_names():
    assert set(SUITES) == {
        "lipschitz", "mcshane", "cone", "algebra", "freespace",
        "ph-isometry", "duality", "annihilator", "theta-phi", "q-bound",
    }


def test_empty_and_single_case_reports(tmp_path):
    empty = run_suite("lipschitz", cases=0, seed=1)
    path, csv_path, dumped = emit_report(empty, tmp_path / "e.json")
    doc = json.loads(path.read_text())
    assert doc["case_count"] == 0 and doc["cases"] == [] and not dumped
    one = run_suite("lipschitz", cases=1, seed=1)
    doc = json.loads(emit_report(one, tmp_path / "o.json")[0].read_text())
    assert doc["case_count"] == 1 and "residual" in doc["cases"][0]
    assert len(csv_path.read_text().splitlines()) == 1


@pytest.mark.parametrize("name", sorted(SUITES))
def test_each_suite_passes_a_few_cases(name):
    report = run_suite(name, cases=12, seed=11)
    assert report.passed, [c.to_dict() for c in report.cases if not c.passed]


def test_parallel_matches_serial():
    a = run_suite("cone", cases=6, seed=2, jobs=1)
    b = run_suite("cone", cases=6, seed=2, jobs=2)
    assert [c.to_dict() for c in a.cases] == [c.to_dict() for c in b.cases]


def test_cases_replay():
    a = run_case("duality", 7, 3)
    b = run_case("duality", 7, 3)
    assert a.digest == b.digest and a.to_dict() == b.to_dict()


def test_all_runs_every_suite():
    report = run_suite("all", cases=1, seed=0)
    assert [c.suite for c in report.cases] == list(SUITES)
