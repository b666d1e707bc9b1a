from __future__ import annotations

import json
from fractions import Fraction

import pytest

from almostnormal.cli import main, run
from almostnormal.config import (ConfigError, bundled_config_names, bundled_config_text, parse_config,
                                 parse_levels)
from almostnormal.report import EXACT_FAIL, EXACT_PASS, INCONCLUSIVE, Check, Report, exact, jsonable


def test_bundled_configs_parse():
    assert bundled_config_names() == ["dihedral", "shift", "zxa5"]
    for name in bundled_config_names():
        cfg = parse_config(bundled_config_text(name))
        assert cfg.name == name


def test_parse_levels():
    assert parse_levels("1..4") == [1, 2, 3, 4]
    assert parse_levels([2, 3]) == [2, 3]
    assert parse_levels(3) == [3]
    with pytest.raises(ValueError):
        parse_levels(True)


def test_config_collects_every_violation():
    doc = {"schema": 2, "family": {"type": "dihedral_infinite"}, "chain": [{"dihedral_power": 1}],
           "depth": -1, "cap": 0}
    with pytest.raises(ConfigError) as err:
        parse_config(doc)
    v = err.value.violations
    assert "schema must be 1" in v and "depth ≥ 0" in v and "cap > 0" in v


def test_config_rejects_non_nested_chain_and_deep_depth():
    doc = {"schema": 1, "family": {"type": "dihedral_infinite"},
           "chain": [{"dihedral_power": 2}, {"dihedral_power": 1}], "depth": 3}
    with pytest.raises(ConfigError) as err:
        parse_config(doc)
    text = " | ".join(err.value.violations)
    assert "not nested" in text and "exceeds" in text


def test_config_malformed_json():
    with pytest.raises(ConfigError) as err:
        parse_config("{not json")
    assert err.value.violations[0].startswith("malformed JSON")


def test_overrides_apply():
    cfg = parse_config(bundled_config_text("dihedral"), {"depth": 3, "levels": [1, 2], "level": 1})
    assert cfg.depth == 3 and cfg.levels == [1, 2]


def test_report_json_is_exact_and_stable():
    r = Report("verify all", {"x": Fraction(1, 3)})
    r.add(exact("ok", "claim", True, {"m": Fraction(2, 4)}))
    text = r.dumps()
    doc = json.loads(text)
    assert doc["schema"] == 1 and doc["config"]["x"] == "1/3"
    assert doc["checks"][0]["data"]["m"] == "1/2"
    assert text == r.dumps()
    assert r.exit_status == 0
    r.add(exact("bad", "claim", False, {"where": 3}))
    assert r.exit_status == 1 and r.checks[-1].trace == {"counterexample": {"where": 3}}
    with pytest.raises(TypeError):
        jsonable(0.5)
    with pytest.raises(ValueError):
        Check("x", "y", "MAYBE")


def test_main_exit_code_2_on_config_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"schema": 1, "family": {"type": "dihedral_infinite"}, "chain": [],
                               "depth": -2}))
    assert main(["odometer", "analyze", "--config", str(bad)]) == 2
    err = json.loads(capsys.readouterr().err)
    assert "depth ≥ 0" in err["config_errors"]
    assert main(["odometer", "analyze", "--config", str(tmp_path / "missing.json")]) == 2


def test_main_writes_report(tmp_path):
    out = tmp_path / "r.json"
    code = main(["odometer", "analyze", "--config", "bundled:dihedral", "--depth", "4", "--output", str(out)])
    doc = json.loads(out.read_text())
    assert code == 0 and doc["exit_status"] == 0
    assert doc["results"]["level_sizes"] == [1, 2, 4, 8, 16]
    assert doc["summary"]["EXACT-FAIL"] == 0


def test_subgroup_report_with_inline_H(capsys):
    code = main(["subgroup", "report", "--config", "bundled:zxa5", "--depth", "3", "--levels", "1..3",
                 "--H", '{"finite_generators": [[[0], [1, 0, 2, 3, 4]]]}'])
    # a transposition is not in A5, so the element is rejected before any computation
    assert code == 2
    code = main(["subgroup", "report", "--config", "bundled:zxa5", "--depth", "3", "--levels", "1..3"])
    doc = json.loads(capsys.readouterr().out)
    assert code == 0
    assert doc["results"]["almost_normality"]["verdict"] == "yes"


def test_factor_build_needs_a_certificate():
    cfg = parse_config(bundled_config_text("dihedral"), {"depth": 5})
    r = run(cfg, "factor build")
    assert [c.verdict for c in r.checks] == [INCONCLUSIVE]


def test_cap_turns_into_inconclusive():
    cfg = parse_config(bundled_config_text("dihedral"), {"cap": 10})
    r = run(cfg, "odometer analyze")
    assert r.checks[-1].verdict == INCONCLUSIVE and r.exit_status == 0


def test_shift_config_runs():
    r = run(parse_config(bundled_config_text("shift")), "verify all")
    assert {c.verdict for c in r.checks} == {EXACT_PASS}
    assert run(parse_config(bundled_config_text("shift")), "extend build").checks[0].verdict == INCONCLUSIVE


def test_extend_build_on_zxa5():
    cfg = parse_config(bundled_config_text("zxa5"), {"depth": 2, "levels": [1, 2], "level": 1})
    r = run(cfg, "extend build")
    assert r.exit_status == 0
    assert EXACT_FAIL not in {c.verdict for c in r.checks}
    assert r.results["gamma_search"]["found"]["index"] == 60
