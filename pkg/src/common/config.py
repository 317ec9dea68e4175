"""
Configuração por ambiente (.env via python-dotenv).

Variáveis reconhecidas (ver .env.example):
  HYPERTREE_OUTPUT_DIR   diretório padrão dos artefatos de execução (default: runs/)
  HYPERTREE_LOG_DIR      diretório do logs/erros.log (default: logs/)
  HYPERTREE_PAIR_BUDGET  máximo de pares para varredura exaustiva (default: 10^7)
  HYPERTREE_THREADS      limite de workers (default: 1)

Os valores são lidos a cada chamada: testes e a CLI podem trocar o ambiente
sem recarregar o módulo.
"""

from __future__ import annotations

import os
from pathlib import Path

from dotenv import load_dotenv

from .errors import ConfigError

load_dotenv()

DEFAULT_PAIR_BUDGET = 10_000_000


def _root() -> Path:
    return Path(__file__).resolve().parent.parent.parent


def _int_env(name: str, default: int) -> int:
    raw = os.environ.get(name, "").strip()
    if not raw:
        return default
    try:
        value = int(float(raw))
    except ValueError:
        raise ConfigError(f"Variável {name} inválida: {raw!r} (esperado inteiro).") from None
    if value < 1:
        raise ConfigError(f"Variável {name} deve ser ≥ 1 (recebido {value}).")
    return value


def output_dir() -> Path:
    raw = os.environ.get("HYPERTREE_OUTPUT_DIR", "").strip()
    return Path(raw) if raw else _root() / "runs"


def log_dir() -> Path:
    raw = os.environ.get("HYPERTREE_LOG_DIR", "").strip()
    return Path(raw) if raw else _root() / "logs"


def pair_budget() -> int:
    return _int_env("HYPERTREE_PAIR_BUDGET", DEFAULT_PAIR_BUDGET)


def default_threads() -> int:
    return _int_env("HYPERTREE_THREADS", 1)
