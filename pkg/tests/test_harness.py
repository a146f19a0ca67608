import json

import numpy as np
import pytest

from symbolmg.harness import (HEADER, ExperimentSpec, builtin_registry, emit, figure_experiment,
                              format_table, get_experiment, run_experiment, run_one)
from symbolmg.harness.cli import main
from symbolmg.harness.config import load_config, merge
from symbolmg.structmat import toeplitz_size_offset
from symbolmg.symbol import projector_symbol

# protocol fragments each registry entry must reproduce
PROTOCOL = {
    "EX1": "circulant (2-2cos x)(2+2cos x), g=3, n=3^4..3^7, TGM/V/W with nu=1,2, tol 1e-7",
    "EX2": "Toeplitz (2-2cos x)(2+2cos x), n=3^a-3, TGM/V/W with nu=1,2, tol 1e-7",
    "EX3": "circulant (2-2cos x)(2+2cos x)^2, tol 1e-3",
    "EX4": "Toeplitz (2-2cos x)(2+2cos x)^2, n=3^a-3, tol 1e-3",
    "EX5": "Toeplitz 6-4cos2x-2cos4x, damped Jacobi 1 and 2, random initial guess in [0,1], coarsest < 6",
    "EX6": "Toeplitz 2-2cos(x-pi/3), random true solution, n=3^a-1",
    "EX7": "Toeplitz x^2, n=3^a-1",
}


def test_registry_contents(capsys):
    reg = builtin_registry()
    assert [s.id for s in reg] == [f"EX{i}" for i in range(1, 8)]
    for exp in reg:
        print(f"{exp.id}: {PROTOCOL[exp.id]}\n    -> {exp}")
    out = capsys.readouterr().out
    assert out.count("->") == 7
    assert get_experiment("EX1").sizes == (81, 243, 729, 2187)
    assert get_experiment("EX2").sizes == (78, 240, 726, 2184)
    assert get_experiment("EX6").sizes == (80, 242, 728, 2186)
    assert get_experiment("EX7").sizes == (80, 242, 728, 2186)
    assert get_experiment("EX3").tol == 1e-3 and get_experiment("EX4").tol == 1e-3
    ex5 = get_experiment("EX5")
    assert ex5.pre == ("jacobi", 1.0) and ex5.post == ("jacobi", 2.0)
    assert ex5.coarsest_threshold == 6 and ex5.initial_guess == "random"
    assert get_experiment("EX6").solution == "random"
    assert np.allclose(get_experiment("EX5").symbol()(0.3),
                       6 - 4 * np.cos(0.6) - 2 * np.cos(1.2))


@pytest.mark.parametrize("exp", builtin_registry(), ids=lambda s: s.id)
def test_registry_sizes_obey_size_rule(exp):
    zeros = exp.zero_list()
    if exp.kind == "toeplitz":
        xi = toeplitz_size_offset(exp.g, projector_symbol(zeros, exp.g).degree)
        for n in exp.sizes:
            alpha = round(np.log(n + xi) / np.log(exp.g))
            assert exp.g ** alpha - xi == n
    for n in exp.sizes:
        assert exp.hierarchy(n, "V").levels[-1].n <= exp.coarsest_threshold


def test_ex1_cardinality_and_counts():
    rows = run_experiment(get_experiment("EX1"))
    assert len(rows) == 24
    assert rows[0].iterations == 11  # n=81, TGM, nu=1
    assert all(r.iterations <= 500 for r in rows)


def test_documented_single_runs():
    assert run_one(get_experiment("EX2"), 78, "TGM", 2, 2).iterations == 14
    row = run_one(get_experiment("EX7"), 2186, "V", 2, 2)
    assert abs(row.iterations - 11) <= 1


def test_determinism():
    exp = get_experiment("EX5").replace(sizes=(78,))
    a, b = run_experiment(exp), run_experiment(exp)
    assert format_table(a) == format_table(b)
    other = run_experiment(exp.replace(seed=7))
    assert [r.final_rel_res for r in other] != [r.final_rel_res for r in a]


def test_failures_are_recorded_per_row():
    exp = get_experiment("EX1").replace(sizes=(100, 81), cycles=(("V", 1, 1),))
    rows = run_experiment(exp)
    assert rows[0].error and not rows[0].converged
    assert not rows[1].error and rows[1].converged


def test_emit(tmp_path):
    paths = emit([], tmp_path / "empty")
    assert paths[0].read_text().splitlines() == [",".join(HEADER)]
    rows = run_experiment(figure_experiment("circulant", iterations=5).replace(sizes=(81,)))
    paths = emit(rows, tmp_path / "out")
    lines = paths[0].read_text().splitlines()
    assert lines[0] == ",".join(HEADER) and len(lines) == 1 + len(rows)
    for path, row in zip(paths[1:], rows):
        values = path.read_text().splitlines()
        assert len(values) == row.iterations + 1
        assert len(values[1].split("e")[0].replace(".", "")) == 16
    with pytest.raises(ValueError):
        emit(rows, tmp_path / "x", fmt="xml")


def test_spec_from_dict_roundtrip():
    d = {"id": "MINE", "kind": "circulant", "f0": {"type": "product", "factors": [{"shift_pi": 0}]},
         "zeros": [{"at_pi": 0, "order": 2}], "sizes": [27, 81], "cycles": [["V", 1, 1]]}
    exp = ExperimentSpec.from_dict(d)
    rows = run_experiment(exp)
    assert len(rows) == 2 and all(r.converged for r in rows)
    with pytest.raises(ValueError):
        ExperimentSpec.from_dict({**d, "cycles": [["F", 1, 1]]})


def test_config_merge(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("experiment: EX1\nsizes: [81]\nmax-iter: 3\n")
    loaded = load_config(cfg)
    assert loaded == {"experiment": "EX1", "sizes": [81], "max_iter": 3}
    assert merge(loaded, {"max_iter": 9, "tol": None}) == {"experiment": "EX1", "sizes": [81],
                                                           "max_iter": 9}
    js = tmp_path / "c.json"
    js.write_text(json.dumps({"seed": 3}))
    assert load_config(js) == {"seed": 3}


def test_cli_run_with_config(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("experiment: EX2\nsizes: 240\ntol: 1.0e-3\n")
    out = tmp_path / "res"
    code = main(["--config", str(cfg), "run", "--experiment", "EX1", "--sizes", "81",
                 "--out", str(out)])
    assert code == 0
    lines = (out / "results.csv").read_text().splitlines()
    assert len(lines) == 7 and all(l.startswith("EX1,81,") for l in lines[1:])
    # the tolerance comes from the config file
    assert all(float(l.split(",")[7]) <= 1e-3 for l in lines[1:])
    assert len(list((out / "histories").iterdir())) == 6


def test_cli_check_and_bound(capsys):
    assert main(["check", "--suite", "lemma1"]) == 0
    assert "checks passed" in capsys.readouterr().out
    assert main(["bound", "--experiment", "EX1"]) == 0
    out = capsys.readouterr().out
    assert "alpha_post=0.5" in out and "rho=" in out
    assert main(["run", "--experiment", "EX99"]) == 2
