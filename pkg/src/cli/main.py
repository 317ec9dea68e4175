"""
Ponto de entrada: python -m src.cli.main <comando> [opções]  (ou tree-lab).

Cada execução grava seus artefatos em --out (padrão: HYPERTREE_OUTPUT_DIR/<comando>)
e termina com manifest.json. Códigos de saída: 0 sucesso, 2 configuração,
3 invariante/cota violada, 4 capacidade esgotada, 1 outros.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from .. import __version__
from ..common import config
from ..common.errors import ConfigError, InvariantViolation
from ..common.log_util import log
from .artifacts import ArtifactWriter, ExperimentConfig, dumps, read_manifest
from .commands import COMMANDS, register, resolve

QUEM = "Python"
ONDE = "cli"

_INTERNAL = ("command", "out")


class LabArgumentParser(argparse.ArgumentParser):
    """Erros de esquema (tipo inválido, opção ausente, comando desconhecido) viram ConfigError."""

    def error(self, message: str):  # type: ignore[override]
        raise ConfigError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = LabArgumentParser(prog="tree-lab", description="Laboratório de mergulhos de árvores hiperbólicas.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    register(sub)
    for action in sub.choices.values():
        action.add_argument("--out", default=None, help="diretório de saída dos artefatos")
    return parser


def _execute(command: str, args: dict, writer: ArtifactWriter) -> str:
    if command == "rerun":
        return _rerun(args, writer)
    summary = COMMANDS[command](args, writer)
    writer.write_manifest(ExperimentConfig(command=command, args=args, seed=args.get("seed")))
    return summary


def _rerun(args: dict, writer: ArtifactWriter) -> str:
    manifest = read_manifest(Path(args["manifest"]))
    original = ExperimentConfig.from_dict(manifest["config"])
    if original.command not in COMMANDS:
        raise ConfigError(f"Comando {original.command!r} do manifesto não pode ser reexecutado.")
    COMMANDS[original.command](dict(original.args), writer)
    writer.write_manifest(original)

    expected = manifest.get("artifacts", {})
    mismatches = sorted(
        name for name in set(expected) | set(writer.artifacts) if expected.get(name) != writer.artifacts.get(name)
    )
    writer.path("rerun.json").write_text(
        dumps({"manifest": str(args["manifest"]), "command": original.command, "mismatches": mismatches}),
        encoding="utf-8",
        newline="\n",
    )
    if mismatches:
        raise InvariantViolation(f"Reexecução divergente em {len(mismatches)} artefato(s): {', '.join(mismatches)}.")
    return f"Reexecução de {original.command}: {len(expected)} artefato(s) idênticos."


def _target(argv: Sequence[str]) -> tuple[str, Path]:
    """Comando e --out lidos direto de argv, para registrar falhas de esquema."""
    command = next((t for t in argv if t in COMMANDS or t == "rerun"), "tree-lab")
    out = None
    for i, token in enumerate(argv):
        if token == "--out" and i + 1 < len(argv):
            out = argv[i + 1]
        elif token.startswith("--out="):
            out = token.split("=", 1)[1]
    return command, Path(out) if out else config.output_dir() / command


def _fail(command: str, out: Path, e: BaseException) -> int:
    code, message = ArtifactWriter(out).fail(command, e)
    log(QUEM, ONDE, f"ERRO {command}: {message[:300]}")
    print(f"ERRO ({code}): {message}; ver {out / 'error.json'}", file=sys.stderr, flush=True)
    return code


def run(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except ConfigError as e:
        return _fail(*_target(argv), e)
    command = ns.command
    args = {k: v for k, v in vars(ns).items() if k not in _INTERNAL}
    out = Path(ns.out) if ns.out else config.output_dir() / command
    writer = ArtifactWriter(out)
    try:
        args = resolve(command, args)
        summary = _execute(command, args, writer)
    except Exception as e:
        return _fail(command, out, e)
    print(summary, flush=True)
    print(f"Concluído: artefatos em {out}", flush=True)
    log(QUEM, ONDE, f"Concluído: {command} → {out}")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
