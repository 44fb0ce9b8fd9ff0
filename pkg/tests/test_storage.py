from __future__ import annotations

import json
import threading
from fractions import Fraction

import pytest

from hofbauer_entropy.core.run import error_text, run_sweep, safe_path_component
from hofbauer_entropy.core.storage import format_value, read_csv, read_json_or_yaml, write_csv_atomic, write_json_atomic


def test_format_value() -> None:
    assert format_value(None) == ""
    assert format_value(True) == "true"
    assert format_value(Fraction(1, 3)) == "0.333333333333"
    assert format_value(0.1 + 0.2) == "0.3"
    assert format_value(float("inf")) == "inf"
    assert format_value(float("nan")) == "nan"
    assert format_value(17) == "17"
    assert format_value("ok") == "ok"


def test_write_csv_atomic_round_trip(tmp_path) -> None:
    path = tmp_path / "nested" / "rows.csv"

    n = write_csv_atomic(path, ["l", "value", "note"], [(1, 0.5, None), (2, Fraction(1, 4), "x")])

    assert n == 2
    assert read_csv(path) == [
        {"l": "1", "value": "0.5", "note": ""},
        {"l": "2", "value": "0.25", "note": "x"},
    ]
    assert [p.name for p in path.parent.iterdir()] == ["rows.csv"]


def test_write_json_atomic_renders_fractions(tmp_path) -> None:
    path = tmp_path / "d.json"

    write_json_atomic(path, {"interval": [Fraction(3, 8), Fraction(1)], "h": 0.1 + 0.2})

    raw = json.loads(path.read_text(encoding="utf-8"))
    assert raw == {"interval": ["3/8", 1], "h": 0.3}
    assert read_json_or_yaml(path) == raw


def test_read_json_or_yaml_missing(tmp_path) -> None:
    with pytest.raises(FileNotFoundError):
        read_json_or_yaml(tmp_path / "absent.yaml")


def test_run_sweep_keeps_order_and_isolates_errors() -> None:
    def work(x: int) -> int:
        if x == 3:
            raise RuntimeError("boom")
        return x * x

    for concurrency in (1, 4):
        out = run_sweep(list(range(6)), work, on_error=lambda x, e: -1, concurrency=concurrency, progress=False)
        assert out == [0, 1, 4, -1, 16, 25]


def test_run_sweep_uses_threads() -> None:
    seen: set[int] = set()
    lock = threading.Lock()

    def work(x: int) -> int:
        with lock:
            seen.add(threading.get_ident())
        return x

    assert run_sweep([1, 2, 3], work, on_error=lambda x, e: 0, concurrency=2, progress=False) == [1, 2, 3]
    assert seen


def test_run_sweep_rejects_bad_concurrency() -> None:
    with pytest.raises(ValueError):
        run_sweep([1], lambda x: x, on_error=lambda x, e: x, concurrency=0)


def test_error_text_and_safe_path_component() -> None:
    assert error_text(ValueError("bad")) == "ValueError: bad"
    assert safe_path_component("builtin:tent:9/5") == "builtin_tent_9_5"
    assert safe_path_component("...") == "map"
