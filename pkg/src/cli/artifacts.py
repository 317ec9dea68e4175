"""
Artefatos de uma execução: JSON/CSV/Parquet no diretório de saída, SHA-256 de
cada arquivo e manifesto gravado por último.

Falha: error.json ({"error", "message", "exit_code", "command"}) e marcador
FAILED no diretório; um FAILED antigo é removido quando a execução termina bem.
Relatórios não levam data/hora (reexecuções idênticas geram bytes idênticos).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import pandas as pd

from .. import __version__
from ..common.errors import ConfigError, LabError

TOOL = "hyperbolic-tree-lab"
MANIFEST = "manifest.json"
ERROR = "error.json"
FAILED = "FAILED"


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    args: dict[str, Any]
    seed: int | None = None
    version: str = __version__

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        return cls(
            command=data["command"],
            args=dict(data.get("args", {})),
            seed=data.get("seed"),
            version=data.get("version", __version__),
        )


def _plain(value: Any) -> Any:
    """Converte para tipos JSON; ∞ vira "inf" (JSON estrito)."""
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        return _plain(value.item())
    return value


def dumps(data: Any) -> str:
    return json.dumps(_plain(data), ensure_ascii=False, indent=2) + "\n"


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def classify_error(e: BaseException) -> tuple[int, str]:
    """Traduz exceção em (código de saída, mensagem):
    - erros do laboratório: código da classe (2 config, 3 invariante, 4 capacidade)
    - memória: 4
    - outros: 1 (com o tipo quando a mensagem é vazia).
    """
    if isinstance(e, LabError):
        return e.exit_code, str(e) or type(e).__name__
    if isinstance(e, MemoryError):
        return 4, "Erro de memória: instância grande demais para a matriz densa."
    if isinstance(e, FileNotFoundError):
        return 2, f"Arquivo inexistente: {e.filename or e}"
    s = str(e).strip()
    return 1, s or type(e).__name__


@dataclass
class ArtifactWriter:
    out_dir: Path
    artifacts: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.out_dir = Path(self.out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def _record(self, path: Path) -> Path:
        self.artifacts[path.relative_to(self.out_dir).as_posix()] = sha256_file(path)
        return path

    def write_json(self, name: str, data: Any) -> Path:
        path = self.path(name)
        path.write_text(dumps(data), encoding="utf-8", newline="\n")
        return self._record(path)

    def write_text(self, name: str, text: str) -> Path:
        path = self.path(name)
        path.write_text(text, encoding="utf-8", newline="\n")
        return self._record(path)

    def write_csv(self, name: str, frame: pd.DataFrame) -> Path:
        path = self.path(name)
        frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
        return self._record(path)

    def write_parquet(self, name: str, frame: pd.DataFrame) -> Path:
        path = self.path(name)
        frame.to_parquet(path, engine="pyarrow", index=False)
        return self._record(path)

    def record(self, path: Path) -> Path:
        """Registra um arquivo gravado por outra rotina (ex.: dump_map)."""
        return self._record(Path(path))

    def write_manifest(self, config: ExperimentConfig) -> Path:
        manifest = {
            "tool": TOOL,
            "version": config.version,
            "config": config.to_dict(),
            "artifacts": dict(sorted(self.artifacts.items())),
        }
        path = self.path(MANIFEST)
        path.write_text(dumps(manifest), encoding="utf-8", newline="\n")
        stale = self.path(FAILED)
        if stale.exists():
            stale.unlink()
        stale_error = self.path(ERROR)
        if stale_error.exists():
            stale_error.unlink()
        return path

    def fail(self, command: str, e: BaseException) -> tuple[int, str]:
        code, message = classify_error(e)
        payload = {"error": type(e).__name__, "message": message, "exit_code": code, "command": command}
        self.path(ERROR).write_text(dumps(payload), encoding="utf-8", newline="\n")
        self.path(FAILED).write_text(f"{command}: {message}\n", encoding="utf-8", newline="\n")
        return code, message


def read_manifest(path: Path) -> dict:
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST
    data = json.loads(path.read_text(encoding="utf-8"))
    if data.get("tool") != TOOL or "config" not in data:
        raise ConfigError(f"{path} não é um manifesto de {TOOL}.")
    return data
