"""
EmbeddingMap: imagem de cada nó como linha densa sobre uma lista de chaves de
coordenadas, mais o espaço alvo e a proveniência (construção + parâmetros).

Persistência:
  <nome>.csv   formato longo, colunas node,key,value (uma linha por entrada
               armazenada; nó como inteiros separados por "/", chave como array
               JSON). Nós de imagem nula aparecem uma vez com key e value vazios.
  <nome>.json  proveniência, ordem das chaves e especificação do espaço alvo.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import pandas as pd

from ..common.errors import ConfigError
from ..spaces.norms import SpaceModel, space_from_spec
from ..spaces.vectors import Key, Vector, decode_key, encode_key, from_row
from ..trees.core import ROOT, Node, node_from_str, node_to_str


@dataclass(frozen=True, eq=False)
class EmbeddingMap:
    nodes: tuple[Node, ...]
    keys: tuple[Key, ...]
    matrix: np.ndarray
    target: SpaceModel
    provenance: dict[str, Any] = field(default_factory=dict)
    pinned: bool = True

    def __post_init__(self) -> None:
        if self.matrix.shape != (len(self.nodes), len(self.keys)):
            raise ConfigError(
                f"Matriz {self.matrix.shape} incompatível com {len(self.nodes)} nós × {len(self.keys)} chaves."
            )
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.nodes)})

    @property
    def construction(self) -> str:
        return str(self.provenance.get("construction", "custom"))

    def index(self, s: Node) -> int:
        try:
            return self._index[s]  # type: ignore[attr-defined]
        except KeyError:
            raise ConfigError(f"Nó {s} fora do mapa {self.construction}.") from None

    def evaluate(self, s: Node) -> Vector:
        return from_row(self.matrix[self.index(s)], self.keys)

    def image(self) -> dict[Node, Vector]:
        return {s: from_row(row, self.keys) for s, row in zip(self.nodes, self.matrix)}


def evaluate(embedding: EmbeddingMap, s: Node) -> Vector:
    return embedding.evaluate(s)


def map_from_images(
    nodes: Sequence[Node],
    images: dict[Node, Vector],
    target: SpaceModel,
    provenance: dict[str, Any] | None = None,
    pinned: bool = False,
) -> EmbeddingMap:
    """Monta um mapa a partir de imagens esparsas (chaves na ordem de primeira aparição)."""
    keys: dict[Key, int] = {}
    for s in nodes:
        for k in images.get(s, Vector()):
            keys.setdefault(k, len(keys))
    matrix = np.zeros((len(nodes), len(keys)))
    for i, s in enumerate(nodes):
        for k, v in images.get(s, Vector()).items():
            matrix[i, keys[k]] = v
    return EmbeddingMap(tuple(nodes), tuple(keys), matrix, target, dict(provenance or {}), pinned)


def check_pinned(embedding: EmbeddingMap) -> None:
    if embedding.pinned and ROOT in embedding.nodes and embedding.evaluate(ROOT):
        raise ConfigError(f"Mapa {embedding.construction} declara F(∅) = 0 mas a imagem da raiz não é nula.")


def map_to_frame(embedding: EmbeddingMap) -> pd.DataFrame:
    rows: list[tuple[str, str, float | str]] = []
    encoded = [encode_key(k) for k in embedding.keys]
    for s, row in zip(embedding.nodes, embedding.matrix):
        name = node_to_str(s)
        nz = np.flatnonzero(row)
        if nz.size == 0:
            rows.append((name, "", ""))
        rows.extend((name, encoded[j], float(row[j])) for j in nz)
    return pd.DataFrame(rows, columns=["node", "key", "value"])


def dump_map(embedding: EmbeddingMap, out_dir: Path, name: str = "embedding") -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{name}.csv"
    json_path = out_dir / f"{name}.json"
    map_to_frame(embedding).to_csv(csv_path, index=False, float_format="%.17g")
    sidecar = {
        "provenance": embedding.provenance,
        "pinned": embedding.pinned,
        "keys": [encode_key(k) for k in embedding.keys],
        "target": embedding.target.to_spec(),
    }
    json_path.write_text(json.dumps(sidecar, ensure_ascii=False, indent=2, sort_keys=True), encoding="utf-8")
    return csv_path, json_path


def load_map(csv_path: Path, json_path: Path) -> EmbeddingMap:
    sidecar = json.loads(Path(json_path).read_text(encoding="utf-8"))
    keys = tuple(decode_key(k) for k in sidecar["keys"])
    key_index = {encode_key(k): j for j, k in enumerate(keys)}
    df = pd.read_csv(
        csv_path,
        dtype={"node": str, "key": str},
        keep_default_na=False,
        float_precision="round_trip",
    )
    nodes: dict[Node, int] = {}
    for name in df["node"]:
        nodes.setdefault(node_from_str(name), len(nodes))
    matrix = np.zeros((len(nodes), len(keys)))
    stored = df[df["key"] != ""]
    for name, key, value in zip(stored["node"], stored["key"], stored["value"]):
        if key not in key_index:
            raise ConfigError(f"Chave {key} do CSV ausente do sidecar {json_path}.")
        matrix[nodes[node_from_str(name)], key_index[key]] = float(value)
    return EmbeddingMap(
        nodes=tuple(nodes),
        keys=keys,
        matrix=matrix,
        target=space_from_spec(sidecar["target"]),
        provenance=sidecar.get("provenance", {}),
        pinned=bool(sidecar.get("pinned", False)),
    )
