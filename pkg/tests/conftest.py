from __future__ import annotations

import pytest

from taxisentinel import compile_ruleset, data_path, load_graph


@pytest.fixture(scope="session")
def rules():
    return compile_ruleset()


@pytest.fixture(scope="session")
def haneda_graph():
    return load_graph(data_path("fixtures/haneda_graph.json"))


@pytest.fixture(scope="session")
def katl_graph():
    return load_graph(data_path("fixtures/katl_graph.json"))
