# Fixtures comuns: logs e artefatos em diretório temporário, árvores pequenas.

from __future__ import annotations

import pytest

from src.trees.core import HyperbolicTree


@pytest.fixture(autouse=True)
def _isolated_env(tmp_path, monkeypatch):
    monkeypatch.setenv("HYPERTREE_LOG_DIR", str(tmp_path / "logs"))
    monkeypatch.setenv("HYPERTREE_OUTPUT_DIR", str(tmp_path / "runs"))
    monkeypatch.delenv("HYPERTREE_PAIR_BUDGET", raising=False)
    monkeypatch.delenv("HYPERTREE_THREADS", raising=False)


@pytest.fixture
def binary_tree_2() -> HyperbolicTree:
    return HyperbolicTree(depth=2, branching=2)


@pytest.fixture
def binary_tree_3() -> HyperbolicTree:
    return HyperbolicTree(depth=3, branching=2)
