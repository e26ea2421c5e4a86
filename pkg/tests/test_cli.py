import io
import json
import os
import sys
from pathlib import Path

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from twistrack.cli import run

TABLE_PATH = Path(__file__).resolve().parents[1] / "table1.json"


def _run(*argv: str) -> tuple[int, dict]:
    stream = io.StringIO()
    code = run(list(argv), stream)
    lines = stream.getvalue().splitlines()
    return code, json.loads(lines[-1]) if lines else {}


def test_classify_command_writes_a_record() -> None:
    code, record = _run("classify", "--n", "6", "--q", "7", "--lambda", "3", "--eps", "1")

    assert code == 0
    assert record["command"] == "classify"
    assert record["outcome"] == "PossibleException"
    assert record["inputs"]["lam"] == [3]
    assert record["modulus"] is not None
    assert record["timing_ms"] >= 0


def test_classify_with_x_info() -> None:
    code, record = _run(
        "classify", "--n", "4", "--q", "11", "--lambda", "1,1", "--eps", "0,0", "--x-info", "identity"
    )

    assert code == 0
    assert record["witness"]["justification"] == "5.10"


def test_weyl_command() -> None:
    code, record = _run("weyl", "--n", "4", "--j", "1")

    assert code == 0
    assert record["outcome"] == "ok"
    assert record["witness"]["class_count"] == 5
    assert len(record["witness"]["classes"]) == 5


def test_mat_command() -> None:
    code, record = _run("mat", "--q", "7", "--matrix", "0,1;6,0", "--op", "order")

    assert code == 0
    assert record["witness"]["order"] == 2


def test_orbit_command() -> None:
    code, record = _run("orbit", "--q", "3", "--x", "1,0,0;0,1,0;0,0,1")

    assert code == 0
    assert record["witness"]["size"] == 234


def test_service_errors_exit_with_one() -> None:
    code, record = _run("verify", "h2", "--q", "7")

    assert code == 1
    assert record["outcome"] == "error: PreconditionViolated"
    assert record["command"] == "verify h2"


def test_invalid_input_exits_with_two() -> None:
    code, record = _run("classify", "--n", "6", "--q", "7", "--lambda", "3", "--eps", "2")

    assert code == 2
    assert record["outcome"] == "error: InvalidInput"


def test_usage_errors_exit_with_two() -> None:
    assert run(["no-such-command"], io.StringIO()) == 2
    assert run(["classify", "--n", "6"], io.StringIO()) == 2


def test_sweep_against_the_table() -> None:
    code, record = _run("sweep", "--n-max", "8", "--q-max", "13", "--golden", str(TABLE_PATH), "--monotonicity")

    assert code == 0
    assert record["outcome"] == "match"
    assert record["witness"]["monotonicity_violations"] == []


def test_records_append_to_out_file(tmp_path) -> None:
    out = tmp_path / "records.jsonl"

    run(["--out", str(out), "weyl", "--n", "3"])
    run(["--out", str(out), "verify", "main", "--n", "6", "--q", "7"])

    lines = [json.loads(line) for line in out.read_text().splitlines()]
    assert [line["command"] for line in lines] == ["weyl", "verify main"]
    assert lines[1]["outcome"] == "holds"


def test_config_file_and_flags(tmp_path) -> None:
    config = tmp_path / "twistrack.env"
    config.write_text("TWISTRACK_WORKERS=2\norbit_cap = 50\n")

    code, record = _run("--config", str(config), "--orbit-cap", "10", "orbit", "--q", "3", "--x", "1,0,0;0,1,0;0,0,1")

    assert code == 1
    assert record["outcome"] == "error: BudgetExceeded"


def test_invalid_settings_exit_with_two() -> None:
    assert run(["--workers", "0", "weyl", "--n", "3"], io.StringIO()) == 2
