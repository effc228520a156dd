from __future__ import annotations

import pytest


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: runs for more than a few seconds")


@pytest.fixture(autouse=True)
def _output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("FRACFLOW_OUT", str(tmp_path / "out"))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = next((m for k, m in sys.modules.items() if k.endswith("test_acceptance")), None)
    if mod is not None and mod.LINES:
        terminalreporter.section("acceptance matrix")
        for line in mod.LINES:
            terminalreporter.write_line(line)
