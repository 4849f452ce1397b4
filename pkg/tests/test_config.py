from pathlib import Path

import pytest

from polydyn.config import Config


def write_settings(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "polydyn.env"
    path.write_text(text)
    return path


def test_defaults_without_file():
    config = Config.from_file()
    assert config == Config()
    assert config.q_max == 64
    assert config.graph_depth == 8
    assert config.log_path is None


def test_values_from_file(tmp_path):
    config = Config.from_file(
        write_settings(
            tmp_path,
            "POLYDYN_Q_MAX=16\nPOLYDYN_MSET_GRID=32\nPOLYDYN_LOG_PATH=logs\n",
        )
    )
    assert config.q_max == 16
    assert config.mset_grid == 32
    assert config.max_bits == 1_000_000
    assert config.log_path == Path("logs")


def test_empty_value_keeps_default(tmp_path):
    assert Config.from_file(write_settings(tmp_path, "POLYDYN_MAX_STEPS=\n")).max_steps == 4096


def test_process_environment_is_ignored(tmp_path, monkeypatch):
    monkeypatch.setenv("POLYDYN_GRAPH_DEPTH", "3")
    assert Config.from_file(write_settings(tmp_path, "")).graph_depth == 8


@pytest.mark.parametrize(
    "text,message",
    [
        ("POLYDYN_MAX_BITS=many\n", "must be an integer"),
        ("POLYDYN_GRAPH_DEPTH=0\n", "must be positive"),
        ("POLYDYN_RENDER_BUDGET=-5\n", "must be positive"),
    ],
)
def test_invalid_values(tmp_path, text, message):
    with pytest.raises(ValueError, match=message):
        Config.from_file(write_settings(tmp_path, text))


def test_missing_file(tmp_path):
    with pytest.raises(ValueError, match="Settings file not found"):
        Config.from_file(tmp_path / "absent.env")
