from __future__ import annotations

import json
from pathlib import Path

import pytest

from hofbauer_entropy.cli import main
from hofbauer_entropy.core.storage import read_csv

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


@pytest.fixture(autouse=True)
def _isolated_cwd(tmp_path, monkeypatch) -> None:
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("HOFBAUER_ENTROPY_OUTPUT_DIR", raising=False)


def _write_graph(path: Path, edges: list[list[str]]) -> Path:
    path.write_text(json.dumps({"vertices": sorted({v for e in edges for v in e}), "edges": edges}), encoding="utf-8")
    return path


def test_entropy_full_tent(tmp_path, capsys) -> None:
    code = main(["entropy", "--map", "builtin:tent:2", "--depth", "3", "--nmax", "8", "--out-dir", str(tmp_path)])

    assert code == 0
    out = capsys.readouterr().out
    assert "h=0.693147" in out
    assert "R=0.693147" in out

    (bounds,) = read_csv(tmp_path / "tent_2" / "bounds.csv")
    assert float(bounds["h_estimate"]) == pytest.approx(0.693147, abs=1e-6)
    assert float(bounds["yomdin_bound"]) == pytest.approx(1.0397, abs=1e-4)
    assert bounds["h_method"] == "lap"

    seq = read_csv(tmp_path / "tent_2" / "sequences.csv")
    assert {row["method"] for row in seq} == {"lap", "R", "hofbauer"}
    assert [row["n"] for row in seq if row["method"] == "hofbauer"] == ["1", "2", "3"]


def test_entropy_identity_is_zero(tmp_path, capsys) -> None:
    code = main(["entropy", "--map", "builtin:identity", "--depth", "2", "--nmax", "4", "--out-dir", str(tmp_path)])

    assert code == 0
    assert "h=0 R=0 bound=0" in capsys.readouterr().out


def test_entropy_from_config_file(tmp_path) -> None:
    code = main(["entropy", "--config", str(CONFIGS / "entropy.yaml"), "--depth", "4", "--nmax", "10", "--out-dir", str(tmp_path)])

    assert code == 0
    assert (tmp_path / "tent_1.5" / "bounds.csv").exists()


def test_entropy_is_deterministic(tmp_path) -> None:
    for name in ("a", "b"):
        assert main(["entropy", "--map", "builtin:tent:9/5", "--depth", "4", "--nmax", "8", "--out-dir", str(tmp_path / name)]) == 0

    for file in ("bounds.csv", "sequences.csv"):
        first = (tmp_path / "a" / "tent_9_5" / file).read_bytes()
        assert first == (tmp_path / "b" / "tent_9_5" / file).read_bytes()


def test_entropy_config_errors_exit_2(tmp_path) -> None:
    assert main(["entropy", "--map", str(tmp_path / "missing.yaml"), "--out-dir", str(tmp_path)]) == 2
    assert main(["entropy", "--out-dir", str(tmp_path)]) == 2
    assert main(["entropy", "--map", "builtin:tent:2", "--depth", "0", "--out-dir", str(tmp_path)]) == 2


def test_diagram_writes_json(tmp_path, capsys) -> None:
    code = main(["diagram", "--map", "builtin:tent:1.5", "--depth", "2", "--K", "2", "--stats", "--out-dir", str(tmp_path)])

    assert code == 0
    payload = json.loads((tmp_path / "tent_1.5" / "diagram_N2.json").read_text(encoding="utf-8"))
    assert len(payload["vertices"]) == 3
    assert len(payload["edges"]) == 5
    assert payload["meta"] == {"map": "tent:1.5", "N": 2}
    assert "vertices" in capsys.readouterr().out


def test_markov_counts_golden_mean(tmp_path, capsys) -> None:
    code = main(["markov", "counts", "--graph", str(CONFIGS / "golden_mean.json"), "--pmax", "4", "--M", "2", "--out-dir", str(tmp_path)])

    assert code == 0
    assert "1,2,3,5" in capsys.readouterr().out
    rows = read_csv(tmp_path / "golden_mean" / "counts_a.csv")
    assert [row["closed"] for row in rows] == ["1", "2", "3", "5"]
    assert [row["first_returns"] for row in rows] == ["1", "1", "0", "0"]
    assert [row["bounded"] for row in rows] == ["1", "2", "3", "5"]


def test_markov_entropy_complete_graph(tmp_path, capsys) -> None:
    code = main(["markov", "entropy", "--graph", str(CONFIGS / "complete3.json"), "--out-dir", str(tmp_path)])

    assert code == 0
    assert "h=1.09861228867" in capsys.readouterr().out


def test_markov_parry_and_bowen(tmp_path) -> None:
    graph = str(CONFIGS / "golden_mean.json")

    assert main(["markov", "parry", "--graph", graph, "--out-dir", str(tmp_path)]) == 0
    probs = {row["vertex"]: float(row["probability"]) for row in read_csv(tmp_path / "golden_mean" / "parry.csv")}
    assert probs["a"] == pytest.approx(0.7236, abs=1e-4)

    assert main(["markov", "bowen", "--graph", graph, "--p", "24", "--out-dir", str(tmp_path)]) == 0
    assert (tmp_path / "golden_mean" / "bowen_p24.csv").exists()


def test_markov_parry_on_disjoint_cycles_fails(tmp_path) -> None:
    graph = _write_graph(tmp_path / "two.json", [["a", "b"], ["b", "a"], ["x", "x"]])

    assert main(["markov", "parry", "--graph", str(graph), "--out-dir", str(tmp_path)]) == 1


def test_markov_convergence(tmp_path, capsys) -> None:
    tagged = tmp_path / "g1.json"
    tagged.write_text(
        json.dumps({"vertices": [{"id": "a", "tags": ["T"]}, {"id": "b"}], "edges": [["a", "b"], ["b", "a"]]}),
        encoding="utf-8",
    )
    graph = str(CONFIGS / "golden_mean.json")

    code = main(["markov", "convergence", "--graph", graph, "--sequence", str(tagged), "--tag", "T", "--M", "2", "--pmax", "8", "--out-dir", str(tmp_path)])

    assert code == 0
    assert "convergence: ok" in capsys.readouterr().out


def test_markov_needs_graph(tmp_path) -> None:
    assert main(["markov", "entropy", "--out-dir", str(tmp_path)]) == 2


def test_perturb_jump_table(tmp_path) -> None:
    code = main(["perturb", "--l-list", "3,10", "--out-dir", str(tmp_path)])

    assert code == 0
    rows = read_csv(tmp_path / "tangency" / "jump.csv")
    assert [row["l"] for row in rows] == ["3", "10"]
    assert [row["status"] for row in rows] == ["skipped", "ok"]
    assert rows[1]["N"] == "2"


def test_perturb_rejects_bad_parameters(tmp_path) -> None:
    assert main(["perturb", "--l-list", "", "--out-dir", str(tmp_path)]) == 2
    assert main(["perturb", "--delta", "0.5", "--out-dir", str(tmp_path)]) == 2


def test_perturb_without_tangency_fails(tmp_path) -> None:
    assert main(["perturb", "--map", "builtin:tent:2", "--l-list", "10", "--out-dir", str(tmp_path)]) == 1


def test_perturb_no_jump(tmp_path) -> None:
    code = main(["perturb", "--no-jump", "--samples", "3", "--seed", "1", "--nmax", "8", "--out-dir", str(tmp_path)])

    assert code == 0
    rows = read_csv(tmp_path / "tent_2" / "no_jump_seed1.csv")
    assert len(rows) == 3
    assert all(float(row["entropy_lap"]) <= 0.6931 + 0.05 for row in rows)
