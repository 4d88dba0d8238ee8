import json

import pytest

from hamcongest.graph import from_edge_list, write_graph
from hamcongest.harness import (
    ExperimentConfig,
    main,
    make_graph,
    run_experiments,
    summarize_samples,
    validate_lemmas,
)


def test_config_errors_name_the_field():
    with pytest.raises(ValueError, match="generator"):
        ExperimentConfig(generator="nope").validate()
    with pytest.raises(ValueError, match="n_values"):
        ExperimentConfig(n_values=[2]).validate()
    with pytest.raises(ValueError, match="seeds"):
        ExperimentConfig(seeds=0).validate()
    with pytest.raises(ValueError, match="graph_file"):
        ExperimentConfig(generator="file").validate()


def test_two_cliques_grid(tmp_path):
    out = tmp_path / "stats.jsonl"
    recs = run_experiments(ExperimentConfig("two_cliques", [8, 16], 5, output=str(out)))
    assert len(recs) == 10 and all(r["success"] for r in recs)
    lines = out.read_text().splitlines()
    assert [json.loads(line) for line in lines] == recs


def test_file_based_k4(tmp_path):
    path = tmp_path / "k4.txt"
    write_graph(from_edge_list(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)]), path)
    recs = run_experiments(ExperimentConfig("file", seeds=1, graph_file=str(path)))
    assert len(recs) == 1 and recs[0]["success"] and recs[0]["iterations"] <= 2


def test_reproducible_bytes(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        run_experiments(ExperimentConfig("random_dirac", [12, 20], 3, output=str(out)))
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("gen", ["ore", "rk"])
def test_other_generators_succeed(gen):
    recs = run_experiments(ExperimentConfig(gen, [9, 14], 2))
    assert all(r["success"] for r in recs)
    assert {r["class"] for r in recs} == {gen}


def test_make_graph_rejects_file():
    with pytest.raises(ValueError):
        make_graph("file", 8, 0)


def test_cli_run_and_exit_codes(tmp_path, capsys):
    assert main(["run", "--gen", "two_cliques", "--n", "8", "--seeds", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 2 and json.loads(lines[0])["success"]
    assert main(["run", "--gen", "random_dirac", "--n", "64", "--seeds", "1", "--cap-factor", "0.01"]) == 1
    assert main(["run", "--gen", "ore", "--n", "2"]) == 2


def test_cli_classify_and_solve(tmp_path, capsys):
    path = tmp_path / "p4.txt"
    write_graph(from_edge_list(4, [(0, 1), (1, 2), (2, 3)]), path)
    assert main(["classify", "--file", str(path)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["is_rk"] and not rep["is_ore"]
    assert main(["solve", "--file", str(path)]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["class"] == "rk" and rec["cycle"] is None and len(rec["path"]) == 4


def test_lemma_report_flags_missing_samples():
    rep = validate_lemmas(samples=20, n_values=(24,))
    assert rep.complete and rep.samples == 20
    short = summarize_samples([], wanted=1000)
    assert not short.complete and not short.verdicts["good_hit_rate"]
