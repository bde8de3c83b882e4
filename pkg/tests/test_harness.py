import csv
import io

import pytest

from sylvbq.exceptions import ConfigError
from sylvbq.harness import (HarnessConfig, compare_baseline, load_config, observed_order, parse_config_text,
                            parse_ladder, run_case, sweep)

MANU = HarnessConfig(case="example2", source="manufactured")


def _drop_runtime(text):
    rows = list(csv.reader(io.StringIO(text)))
    k = rows[0].index("runtime_ms")
    return [r[:k] + r[k + 1:] for r in rows]


def test_parse_config_text():
    vals = parse_config_text("# comment\ncase = example2\nJ = 20   # trailing\nl = 1/400\n\ntol=1e-10\n")
    assert vals == {"case": "example2", "J": 20, "l": 1 / 400, "tol": 1e-10}


@pytest.mark.parametrize("text", ["J 20", "bogus = 1", "J = 2.5", "l = abc", "max_iters = 1/0"])
def test_parse_config_rejects(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_load_config_file_and_override(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("case = example2\nJ = 16\nl = 1/120\n")
    cfg = load_config(p, J="20")
    assert (cfg.case, cfg.J, cfg.l) == ("example2", 20, 1 / 120)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")
    with pytest.raises(ConfigError):
        load_config(None, solver="magic")
    with pytest.raises(ConfigError):
        load_config(None, case="example9")


def test_ladder_parsing():
    assert parse_ladder("10:1/100, 20:0.005") == [(10, 0.01), (20, 0.005)]
    with pytest.raises(ConfigError):
        parse_ladder("10-0.01")
    with pytest.raises(ConfigError):
        parse_ladder(" , ")


def test_one_row_sweep_has_no_order_column():
    res = sweep("example2", [(8, 1 / 80)], MANU)
    lines = res.to_csv().strip().splitlines()
    assert len(lines) == 2 and "order" not in lines[0]
    assert lines[0] == "J,l,alpha,q,Er,RelEr,runtime_ms,iters,method,status"


def test_csv_number_format():
    row = sweep("example2", [(8, 1 / 80)], MANU).to_csv().splitlines()[1].split(",")
    assert row[1] == "1.250000e-02" and row[4].count("e") == 1


def test_sweep_deterministic_and_ordered():
    ladder = [(6, 1 / 60), (8, 1 / 80), (10, 1 / 100)]
    a = sweep("example2", ladder, MANU)
    b = sweep("example2", ladder, MANU, workers=3)
    assert _drop_runtime(a.to_csv()) == _drop_runtime(b.to_csv())
    assert [r.J for r in b.rows] == [6, 8, 10]
    assert a.orders[0] is not None and a.rows[0].order is None


def test_sweep_row_matches_fresh_run():
    res = sweep("example2", [(6, 1 / 60), (8, 1 / 80)], MANU)
    from dataclasses import replace

    fresh = run_case(replace(MANU, J=8, l=1 / 80)).report.Er
    assert abs(res.rows[1].Er - fresh) <= 1e-14 * fresh


def test_failing_rows_are_tagged_not_dropped():
    res = sweep("example1", [(10, 1 / 100)], HarnessConfig())
    (row,) = res.rows
    assert row.status.startswith("blowup@") and row.Er is None
    assert ",blowup@" in res.to_csv()


def test_empty_ladder_rejected():
    with pytest.raises(ConfigError):
        sweep("example1", [])


def test_observed_order():
    assert observed_order(4.0, 1.0, 0.2, 0.1) == pytest.approx(2.0)
    assert observed_order(None, 1.0, 0.2, 0.1) is None


def test_compare_small_grid_paths_agree():
    rec = compare_baseline("example1", 8, 1e-3, 50)
    assert max(rec.divergence.values()) <= 1e-8
    assert set(rec.times_s) == {"lyapunov", "banded", "dense"}


def test_compare_zero_steps():
    rec = compare_baseline("example1", 6, 1e-2, 0)
    assert rec.divergence == {"banded": 0.0, "dense": 0.0}


def test_compare_refuses_dense_above_cap():
    with pytest.raises(ConfigError):
        compare_baseline("example1", 60, 1e-3, 1, HarnessConfig(dense_cap=50))
    rec = compare_baseline("example1", 12, 1e-3, 2, HarnessConfig(dense_cap=10), dense=False)
    assert "dense" not in rec.times_s
