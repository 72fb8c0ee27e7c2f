import json

import numpy as np
import pytest

import semipositone as sp
from semipositone import sweep_cli
from semipositone.sweep_cli import (CSV_HEADER, SweepReport, SweepRow,
                                    _default_a_values, _summarize, emit,
                                    main, parse_config)


def write(tmp_path, text, name="cfg.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


SMALL = "[grid]\nn = 128\nr_max = 20\n[sweep]\ncount = 2\ndecades = 1\n"


def test_header_is_pinned():
    assert CSV_HEADER == ("a,level,norm_h2,sup_ext,min_value,neg_mass,"
                          "decay_fit,decay_pred,residual,converged")


def test_parse_defaults(tmp_path):
    cfg = parse_config(write(tmp_path, ""))
    assert cfg.problem.dim == 5
    assert cfg.problem.family == "paper_example"
    assert cfg.grid.n == 512
    assert cfg.mp.path_nodes == 17
    assert cfg.sweep.count == 12


def test_parse_sectionless_is_problem(tmp_path):
    cfg = parse_config(write(tmp_path, "dim = 6\ngamma = 3.0\n"))
    assert cfg.problem.dim == 6
    assert cfg.problem.gamma == 3.0


def test_parse_a_list_and_bools(tmp_path):
    cfg = parse_config(write(tmp_path, "[sweep]\na_list = 0.5, 0.25\nwarm_start = off\n"))
    assert cfg.sweep.a_list == (0.5, 0.25)
    assert cfg.sweep.warm_start is False


@pytest.mark.parametrize("text,fragment", [
    ("[problem]\nfoo = 1\n", "problem.foo"),
    ("[nope]\nx = 1\n", "unknown section"),
    ("dim = 4\n", "N >= 5"),
    ("gamma = 12\n", "(2, 10)"),
    ("[sweep]\nwarm_start = maybe\n", "sweep.warm_start"),
    ("[mp]\narmijo = 0.1\n", "mp.armijo"),
    ("[grid]\nr_max = 0.8\n", "r_max"),
    ("[grid]\nn = 8\n", "16 nodes"),
    ("[sweep]\na_list = -1\n", ">= 0"),
    ("[weight]\nfamily = custom_table\n", "table_path"),
    ("[problem]\nfamily = cubic\n", "family"),
])
def test_parse_rejections(tmp_path, text, fragment):
    with pytest.raises(ValueError, match=None) as err:
        parse_config(write(tmp_path, text))
    assert fragment in str(err.value)


def test_build_problem_families(tmp_path):
    cfg = parse_config(write(tmp_path, "family = power\npower = 3\ngamma = 4\n"))
    spec, weight, grid = sweep_cli.build_problem(cfg)
    assert spec.f(2.0) == pytest.approx(8.0)
    assert weight.name == "paper_example"
    assert grid.n == 512


def test_default_a_values(geometry128):
    vals = _default_a_values(geometry128, 12, 2.0)
    assert len(vals) == 12
    assert vals[0] == pytest.approx(0.5 * geometry128.a1)
    assert vals[-1] == pytest.approx(0.5 * geometry128.a1 * 1e-2)
    assert all(x > y for x, y in zip(vals, vals[1:]))


def fake_row(a, norm, min_value, converged=True):
    return SweepRow(a=a, level=2.0, norm_h2=norm, sup_ext=1.0,
                    min_value=min_value, neg_mass=max(0.0, -min_value),
                    decay_fit=1.0, decay_pred=1.0, residual=1e-9,
                    converged=converged)


def test_summarize_threshold_logic(grid128, geometry128):
    rows = [fake_row(4.0, 1.3, -0.5), fake_row(2.0, 1.2, -0.2),
            fake_row(1.0, 1.1, 0.0), fake_row(0.5, 1.05, 0.0),
            fake_row(0.0, 1.0, 0.0)]
    profiles = {r.a: np.full(grid128.n, max(r.norm_h2, 1.0)) for r in rows}
    for r in rows:
        profiles[r.a][5] = r.min_value if r.min_value < 0 else profiles[r.a][5]
    s = _summarize(rows, profiles, grid128, geometry128)
    assert s["threshold_index"] == 2
    assert s["a3_estimate"] == 1.0
    assert s["a2_estimate"] == 2.0
    assert s["beta1"] > 0
    assert s["n_converged"] == 5


def test_summarize_dirty_split_is_none(grid128, geometry128):
    rows = [fake_row(4.0, 1.0, 0.0), fake_row(2.0, 1.0, -0.5),
            fake_row(1.0, 1.0, 0.0), fake_row(0.0, 1.0, 0.0)]
    profiles = {r.a: np.ones(grid128.n) for r in rows}
    s = _summarize(rows, profiles, grid128, geometry128)
    assert s["threshold_index"] is None
    # a3 exists anyway: below a=1 everything is clean
    assert s["a3_estimate"] == 1.0


def test_emit_empty_sweep(tmp_path, grid128, geometry128):
    rep = SweepReport(rows=[], summary=_summarize([], {}, grid128, geometry128),
                      config_echo={}, profiles={}, grid_r=grid128.r)
    paths = emit(rep, str(tmp_path / "out"))
    csv = open(paths[0]).read()
    assert csv == CSV_HEADER + "\n"
    blob = json.load(open(paths[1]))
    assert blob["summary"]["a2_estimate"] is None
    assert blob["summary"]["a3_estimate"] is None
    assert blob["summary"]["beta1"] is None


@pytest.fixture(scope="module")
def small_report(tmp_path_factory):
    cfg = parse_config(write(tmp_path_factory.mktemp("cfg"), SMALL))
    return sweep_cli.run_sweep(cfg)


def test_run_sweep_row_structure(small_report):
    rows = small_report.rows
    assert len(rows) == 3
    assert rows[-1].a == 0.0
    assert all(x.a > y.a for x, y in zip(rows, rows[1:]))
    assert all(r.converged for r in rows)
    # levels clear the rim
    assert all(r.level >= small_report.summary["beta"] - 1e-6 for r in rows)


def test_run_sweep_summary_sanity(small_report):
    s = small_report.summary
    assert s["n_rows"] == 3
    assert s["beta1"] > 0
    dists = [d for _, d in s["limit_sup_distance"]]
    assert all(x > y for x, y in zip(dists, dists[1:]))


def test_emit_roundtrip(tmp_path, small_report):
    paths = emit(small_report, str(tmp_path / "out"))
    lines = open(paths[0]).read().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + len(small_report.rows)
    first = lines[1].split(",")
    assert float(first[0]) == small_report.rows[0].a
    assert first[-1] in ("true", "false")
    blob = json.load(open(paths[1]))
    assert blob["config"]["grid"]["n"] == 128
    assert blob["summary"]["n_rows"] == 3
    # one profile per row
    assert len(paths) == 2 + len(small_report.rows)


def test_sweep_deterministic(tmp_path):
    cfg = parse_config(write(tmp_path, SMALL))
    r1 = sweep_cli.run_sweep(cfg)
    r2 = sweep_cli.run_sweep(cfg)
    d1 = emit(r1, str(tmp_path / "o1"))
    d2 = emit(r2, str(tmp_path / "o2"))
    assert open(d1[0]).read() == open(d2[0]).read()
    assert open(d1[1]).read() == open(d2[1]).read()


def test_main_config_error(tmp_path, capsys):
    rc = main(["--config", write(tmp_path, "dim = 4\n"), "--out", str(tmp_path / "o")])
    assert rc == 2
    assert "config error" in capsys.readouterr().err


def test_main_missing_file(tmp_path, capsys):
    rc = main(["--config", str(tmp_path / "nope.ini"), "--out", str(tmp_path / "o")])
    assert rc == 2


def test_main_single_a_zero(tmp_path, capsys):
    out = tmp_path / "out"
    rc = main(["--config", write(tmp_path, SMALL), "--out", str(out),
               "--single-a", "0"])
    assert rc == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert len(lines) == 2
    assert lines[1].endswith("true")


def test_main_check_hypotheses_only(tmp_path, capsys):
    out = tmp_path / "out"
    rc = main(["--config", write(tmp_path, SMALL), "--out", str(out),
               "--check-hypotheses"])
    assert rc == 0
    printed = capsys.readouterr().out
    assert "g2(delta=1)" in printed
    assert "g2(delta=10)" in printed
    blob = json.load(open(out / "checks.json"))
    assert len(blob) == 7
    assert all(v["passed"] for v in blob.values())
