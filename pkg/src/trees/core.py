"""
Árvores T_N^b: sequências finitas de inteiros positivos de comprimento ≤ N,
com entradas em {1..b}, e a métrica hiperbólica ρ(s,t) = |s| + |t| − 2|gca(s,t)|.

Um nó é uma tupla de inteiros ≥ 1; a raiz ∅ é a tupla vazia. A árvore diádica
B_N usa o alfabeto {−1, 1}, armazenado como {1, 2} (ver from_signs/to_signs).

Ordem canônica (enumerate_nodes): por nível, irmãos em ordem crescente da última
entrada. Todas as construções com semente consomem essa ordem; branches() segue
a mesma ordem (ordem lexicográfica dos nós terminais).

root_branching permite que a raiz tenha outro número de sucessores: é o caso
das árvores de segmentos da construção segmentada, cuja primeira entrada é o
índice de um ramo da árvore acumulada anterior.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

from ..common.errors import ConfigError

Node = tuple[int, ...]
ROOT: Node = ()

TreeKind = Literal["integer", "dyadic"]


def as_node(seq: Iterable[int]) -> Node:
    """Converte uma sequência em nó, validando entradas ≥ 1."""
    node = tuple(int(x) for x in seq)
    for x in node:
        if x < 1:
            raise ConfigError(f"Entrada de nó inválida: {x} (esperado inteiro ≥ 1) em {node}.")
    return node


def parent(s: Node) -> Node:
    """s⁻: predecessor imediato. A raiz não tem predecessor."""
    if not s:
        raise ConfigError("A raiz ∅ não tem predecessor.")
    return s[:-1]


def restrict(s: Node, k: int) -> Node:
    """s|_k: prefixo de comprimento k (k ≤ |s|)."""
    if k < 0 or k > len(s):
        raise ConfigError(f"Restrição s|_{k} inválida para |s| = {len(s)}.")
    return s[:k]


def concat(s: Node, t: Node) -> Node:
    return s + t


def is_ancestor(s: Node, t: Node) -> bool:
    """s ≤ t (s é prefixo de t; inclui s = t)."""
    return len(s) <= len(t) and t[: len(s)] == s


def gca(s: Node, t: Node) -> Node:
    """Maior ancestral comum: prefixo comum mais longo."""
    k = 0
    for a, b in zip(s, t):
        if a != b:
            break
        k += 1
    return s[:k]


def rho(s: Node, t: Node) -> int:
    return len(s) + len(t) - 2 * len(gca(s, t))


def from_signs(signs: Sequence[int]) -> Node:
    """Bijeção do alfabeto diádico {−1, 1} para {1, 2}."""
    out = []
    for x in signs:
        if x == -1:
            out.append(1)
        elif x == 1:
            out.append(2)
        else:
            raise ConfigError(f"Sinal inválido na árvore diádica: {x} (esperado −1 ou 1).")
    return tuple(out)


def to_signs(s: Node) -> tuple[int, ...]:
    for x in s:
        if x not in (1, 2):
            raise ConfigError(f"Nó {s} não pertence à árvore diádica.")
    return tuple(-1 if x == 1 else 1 for x in s)


@dataclass(frozen=True)
class HyperbolicTree:
    depth: int
    branching: int
    kind: TreeKind = "integer"
    root_branching: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("integer", "dyadic"):
            raise ConfigError(f"Tipo de árvore desconhecido: {self.kind!r}.")
        if self.kind == "dyadic":
            object.__setattr__(self, "branching", 2)
        if int(self.depth) != self.depth or self.depth < 0:
            raise ConfigError(f"Profundidade inválida: {self.depth} (esperado inteiro ≥ 0).")
        if int(self.branching) != self.branching or self.branching < 1:
            raise ConfigError(f"Ramificação inválida: {self.branching} (esperado inteiro ≥ 1).")
        if self.root_branching is not None and self.root_branching < 1:
            raise ConfigError(f"Ramificação da raiz inválida: {self.root_branching}.")

    def successor_count(self, s: Node) -> int:
        if len(s) >= self.depth:
            return 0
        if not s and self.root_branching is not None:
            return self.root_branching
        return self.branching

    def successors(self, s: Node) -> list[Node]:
        return [s + (c,) for c in range(1, self.successor_count(s) + 1)]

    def contains(self, s: Node) -> bool:
        if len(s) > self.depth:
            return False
        for i, x in enumerate(s):
            limit = self.root_branching if (i == 0 and self.root_branching is not None) else self.branching
            if x < 1 or x > limit:
                return False
        return True

    def node_count(self) -> int:
        first = self.root_branching if self.root_branching is not None else self.branching
        if self.depth == 0:
            return 1
        b = self.branching
        below = self.depth if b == 1 else (b**self.depth - 1) // (b - 1)
        return 1 + first * below

    def terminal_count(self) -> int:
        if self.depth == 0:
            return 1
        first = self.root_branching if self.root_branching is not None else self.branching
        return first * self.branching ** (self.depth - 1)

    def to_spec(self) -> dict:
        spec: dict = {"kind": self.kind, "depth": self.depth, "branching": self.branching}
        if self.root_branching is not None:
            spec["root_branching"] = self.root_branching
        return spec

    @classmethod
    def from_spec(cls, spec: dict) -> "HyperbolicTree":
        try:
            return cls(
                depth=int(spec["depth"]),
                branching=int(spec.get("branching", 2)),
                kind=spec.get("kind", "integer"),
                root_branching=spec.get("root_branching"),
            )
        except KeyError as e:
            raise ConfigError(f"Especificação de árvore sem campo {e}.") from None


def enumerate_nodes(tree: HyperbolicTree) -> list[Node]:
    """Ordem por níveis; ancestrais antes de descendentes; irmãos pela última entrada."""
    out: list[Node] = [ROOT]
    level = [ROOT]
    for _ in range(tree.depth):
        level = [child for s in level for child in tree.successors(s)]
        out.extend(level)
    return out


def terminal_nodes(tree: HyperbolicTree) -> list[Node]:
    level = [ROOT]
    for _ in range(tree.depth):
        level = [child for s in level for child in tree.successors(s)]
    return level


def branches(tree: HyperbolicTree) -> list[list[Node]]:
    """Um ramo por nó terminal: a cadeia maximal ∅ < t|_1 < ... < t."""
    return [[t[:k] for k in range(len(t) + 1)] for t in terminal_nodes(tree)]


def branch_index(tree: HyperbolicTree, terminal: Node) -> int:
    """Posição (a partir de 1) do nó terminal na ordem de branches()."""
    if len(terminal) != tree.depth or not tree.contains(terminal):
        raise ConfigError(f"{terminal} não é nó terminal da árvore {tree.to_spec()}.")
    index = 0
    for x in terminal:
        index = index * tree.branching + (x - 1)
    # o dígito da raiz tem peso b^(N-1), qualquer que seja root_branching
    return index + 1


def first_branch_index(tree: HyperbolicTree, s: Node) -> int:
    """Índice do primeiro ramo que contém s (s completado com 1's)."""
    if not tree.contains(s):
        raise ConfigError(f"Nó {s} fora da árvore {tree.to_spec()}.")
    return branch_index(tree, s + (1,) * (tree.depth - len(s)))


def is_full_subtree(nodes: Iterable[Node], tree: HyperbolicTree, min_successors: int) -> bool:
    """Versão finita de subárvore cheia: contém ∅, é fechada por predecessores e
    cada membro não terminal tem pelo menos b′ sucessores no conjunto."""
    if min_successors < 1 or min_successors > tree.branching:
        raise ConfigError(f"b′ = {min_successors} fora de [1, {tree.branching}].")
    members = set(nodes)
    if ROOT not in members:
        return False
    children: dict[Node, int] = {}
    for s in members:
        if not tree.contains(s):
            return False
        if s:
            if s[:-1] not in members:
                return False
            children[s[:-1]] = children.get(s[:-1], 0) + 1
    return all(children.get(s, 0) >= min_successors for s in members if len(s) < tree.depth)


def partial_sums(K: int, n: int) -> list[int]:
    """N_0, ..., N_n com N_i = Σ_{k ≤ i} K^k."""
    out, acc = [], 0
    for k in range(n + 1):
        acc += K**k
        out.append(acc)
    return out


def segment_level(length: int, K: int) -> int:
    """n com N_{n−1} < length ≤ N_n (N_{−1} = 0). Comprimento 0 devolve 0."""
    n, acc = 0, 1
    while length > acc:
        n += 1
        acc += K**n
    return n


def segment_decompose(s: Node, K: int) -> list[Node]:
    """Decompõe s = s_0⌢...⌢s_n com |s_j| = K^j (j < n) e 1 ≤ |s_n| ≤ K^n."""
    if int(K) != K or K < 2:
        raise ConfigError(f"K inválido: {K} (esperado inteiro ≥ 2).")
    if not s:
        raise ConfigError("segment_decompose não se aplica à raiz ∅.")
    out: list[Node] = []
    pos, j = 0, 0
    while pos < len(s):
        size = K**j
        out.append(s[pos : pos + size])
        pos += size
        j += 1
    return out


def distance_matrix(nodes: Sequence[Node]) -> np.ndarray:
    """Matriz densa de ρ via incidência de ancestrais (|gca| = ancestrais não raiz em comum)."""
    n = len(nodes)
    prefix_col: dict[Node, int] = {}
    rows: list[int] = []
    cols: list[int] = []
    for i, s in enumerate(nodes):
        for h in range(1, len(s) + 1):
            col = prefix_col.setdefault(s[:h], len(prefix_col))
            rows.append(i)
            cols.append(col)
    incidence = np.zeros((n, max(len(prefix_col), 1)), dtype=np.float32)
    if rows:
        incidence[rows, cols] = 1.0
    common = np.rint(incidence @ incidence.T).astype(np.int64)
    depth = np.array([len(s) for s in nodes], dtype=np.int64)
    return depth[:, None] + depth[None, :] - 2 * common


def node_to_str(s: Node) -> str:
    return "/".join(str(x) for x in s)


def node_from_str(text: str) -> Node:
    text = str(text).strip()
    if not text:
        return ROOT
    return as_node(int(x) for x in text.split("/"))
