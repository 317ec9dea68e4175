"""
Comandos da CLI. Cada comando recebe os argumentos resolvidos (um dict de
tipos JSON, o mesmo ecoado no manifesto) e um ArtifactWriter, e devolve um
resumo curto para a tela.

Argumentos de lista (grades, cronogramas, profundidades) e expoentes p chegam
como texto ("1,2,4", "inf") e são convertidos aqui, para que o manifesto
reexecute exatamente a mesma chamada.
"""

from __future__ import annotations

import argparse
import json
import math
from pathlib import Path
from typing import Any, Callable

import numpy as np
import pandas as pd

from ..analysis.certificate import certificate
from ..analysis.coarse import coarse_moduli
from ..analysis.concentration import MODELS, concentration_search, james_sum, kr_contradiction, model_space
from ..analysis.distortion import TOLERANCE, distortion
from ..analysis.filtration import counting_bounds, filtration_decompose, midpoint_windows
from ..analysis.pairs import case_summary, case_summary_markdown, classifier_for, pair_frame
from ..common import config
from ..common.errors import ConfigError, InvariantViolation
from ..embeddings.cases import ENVELOPE, case_constants
from ..embeddings.constructions import CONSTRUCTION_BOUNDS, embed_dual, embed_glued, embed_glued_dual, embed_l1
from ..embeddings.maps import EmbeddingMap, dump_map, load_map
from ..embeddings.segmented import embed_segmented
from ..optimizer.growth import growth_experiment
from ..optimizer.optimize import OptimizerConfig, metric_space, optimize, tree_metric_space
from ..spaces.norms import Lp
from ..systems.biorth import BiorthSystem, canonical_system, perturbed_system, system_to_dict
from ..systems.leveled import (
    GLUING,
    SEGMENTED,
    LeveledSystems,
    leveled_systems,
    leveled_to_dict,
    load_any_system,
    required_levels,
    segment_levels,
)
from ..trees.core import HyperbolicTree, enumerate_nodes, node_to_str
from .artifacts import ArtifactWriter

Args = dict[str, Any]
Handler = Callable[[Args, ArtifactWriter], str]

CONSTRUCTIONS = ("l1", "dual", "glued", "glued-dual", "segmented")
MAP_NAME = "embedding"


# --- conversões --------------------------------------------------------------


def parse_p(text: str | float) -> float:
    raw = str(text).strip().lower()
    try:
        return math.inf if raw in ("inf", "infinity", "∞") else float(raw)
    except ValueError:
        raise ConfigError(f"Expoente inválido: {text!r}.") from None


def parse_floats(text: str, name: str) -> list[float]:
    try:
        values = [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"Lista {name} inválida: {text!r}.") from None
    if not values:
        raise ConfigError(f"Lista {name} vazia.")
    return values


def parse_ints(text: str, name: str) -> list[int]:
    values = parse_floats(text, name)
    if any(int(v) != v for v in values):
        raise ConfigError(f"Lista {name} deve conter inteiros: {text!r}.")
    return [int(v) for v in values]


def parse_schedule(text: str | None) -> list[float] | None | str:
    """"default" → None (cronograma padrão), "zero" → "zero", senão lista de δ."""
    if text is None or str(text).strip().lower() == "default":
        return None
    if str(text).strip().lower() == "zero":
        return "zero"
    return parse_floats(text, "schedule")


def _leveled(kind: str, depth: int, args: Args) -> LeveledSystems:
    K = int(args.get("K", 2))
    levels = required_levels(depth) if kind == GLUING else segment_levels(depth, K)
    if args.get("levels") is not None:
        levels = int(args["levels"])
    schedule = parse_schedule(args.get("schedule"))
    seed = args.get("seed")
    if schedule == "zero":
        schedule, seed = [0.0] * (levels + 1), None
    return leveled_systems(
        levels, kind, schedule, seed, branching=int(args.get("branching", 2)), depth=depth, K=K
    )


def _single(depth: int, args: Args) -> BiorthSystem:
    tree = HyperbolicTree(depth=depth, branching=int(args.get("branching", 2)), kind=args.get("kind_tree", "integer"))
    delta = float(args.get("delta") or 0.0)
    if delta == 0:
        return canonical_system(tree)
    return perturbed_system(tree, delta, int(args.get("seed") or 0))


def _load_system(path: str) -> BiorthSystem | LeveledSystems:
    return load_any_system(json.loads(Path(path).read_text(encoding="utf-8")))


def _load_map(path: str) -> EmbeddingMap:
    base = Path(path)
    if base.is_dir():
        return load_map(base / f"{MAP_NAME}.csv", base / f"{MAP_NAME}.json")
    if base.suffix in (".csv", ".json"):
        return load_map(base.with_suffix(".csv"), base.with_suffix(".json"))
    raise ConfigError(f"Mapa não encontrado em {path} (esperado diretório com {MAP_NAME}.csv/.json).")


def _numeric(report: dict, mode: str = "exhaustive", seed: int | None = None) -> dict:
    return {**report, "mode": report.get("mode", mode), "seed": report.get("seed", seed), "tolerance": TOLERANCE}


# --- comandos ----------------------------------------------------------------


def cmd_gen_tree(args: Args, writer: ArtifactWriter) -> str:
    tree = HyperbolicTree(depth=int(args["depth"]), branching=int(args["branching"]), kind=args["kind"])
    nodes = enumerate_nodes(tree)
    writer.write_json(
        "tree.json",
        {
            "tree": tree.to_spec(),
            "node_count": tree.node_count(),
            "terminal_count": tree.terminal_count(),
            "nodes": [node_to_str(s) for s in nodes],
        },
    )
    return f"Árvore {tree.kind} N={tree.depth}, b={tree.branching}: {len(nodes)} nós."


def cmd_gen_system(args: Args, writer: ArtifactWriter) -> str:
    kind = args["kind"]
    depth = int(args["depth"])
    if kind == "single":
        system = _single(depth, args)
        writer.write_json("system.json", system_to_dict(system))
        return f"Sistema simples em T_{depth}: {len(system.nodes)} vetores, δ={system.delta}."
    family = _leveled(kind, depth, args)
    writer.write_json("system.json", leveled_to_dict(family))
    return f"Família {kind}: {family.max_level + 1} níveis, {len(family.keys)} chaves."


def cmd_embed(args: Args, writer: ArtifactWriter) -> str:
    construction = args["construction"]
    depth = args.get("depth")
    loaded = _load_system(args["system"]) if args.get("system") else None

    if construction in ("l1", "dual"):
        if loaded is None:
            if depth is None:
                raise ConfigError("embed exige --depth ou --system.")
            loaded = _single(int(depth), args)
        if not isinstance(loaded, BiorthSystem):
            raise ConfigError(f"Construção {construction} exige sistema simples.")
        embedding = embed_l1(loaded) if construction == "l1" else embed_dual(loaded)
    else:
        kind = SEGMENTED if construction == "segmented" else GLUING
        if loaded is not None and (not isinstance(loaded, LeveledSystems) or loaded.kind != kind):
            raise ConfigError(f"Construção {construction} exige família do tipo {kind}.")
        if depth is None:
            depth = loaded.depth if loaded is not None else None
        if depth is None:
            raise ConfigError("embed exige --depth para construções por níveis.")
        levels = loaded if loaded is not None else _leveled(kind, int(depth), args)
        if construction == "glued":
            embedding = embed_glued(levels, int(depth))
        elif construction == "glued-dual":
            embedding = embed_glued_dual(levels, int(depth))
        else:
            eta = args.get("eta")
            eta_value = None if eta in (None, "schedule") else parse_floats(eta, "eta")
            if eta_value is not None and len(eta_value) == 1:
                eta_value = eta_value[0]
            embedding = embed_segmented(
                levels, int(depth), eta_value, args.get("seed"), float(args.get("epsilon", 1e-6))
            )

    csv_path, json_path = dump_map(embedding, writer.out_dir, MAP_NAME)
    writer.record(csv_path)
    writer.record(json_path)
    return f"Mapa {embedding.construction}: {len(embedding.nodes)} nós, {len(embedding.keys)} chaves."


def _bounds_for(embedding: EmbeddingMap, labels: list[str], envelope: float) -> dict[str, float] | None:
    construction = embedding.construction
    if construction == "segmented":
        return None
    inverse = CONSTRUCTION_BOUNDS.get(construction, (math.inf, envelope))[1]
    return {label: inverse for label in labels}


def _case_tables(embedding: EmbeddingMap, envelope: float) -> tuple[pd.DataFrame, pd.DataFrame, pd.DataFrame]:
    frame = pair_frame(embedding, classifier_for(embedding))
    labels = sorted(frame["case"].unique().tolist())
    constants = case_constants(frame, envelope, _bounds_for(embedding, labels, envelope))
    return frame, case_summary(frame), constants


def _constants_json(constants: pd.DataFrame) -> dict:
    return {
        "cases": constants.to_dict(orient="records"),
        "alpha": constants.attrs.get("alpha"),
        "M": constants.attrs.get("M"),
    }


def cmd_distortion(args: Args, writer: ArtifactWriter) -> str:
    embedding = _load_map(args["map"])
    report = distortion(embedding, int(args["budget"]), int(args["seed"]))
    writer.write_json("distortion.json", {"construction": embedding.construction, **report.to_dict()})

    envelope = float(args.get("envelope", ENVELOPE))
    constants = None
    if args.get("pairs"):
        frame, summary, constants = _case_tables(embedding, envelope)
        writer.write_parquet("pairs.parquet", frame)
        writer.write_json("cases.json", _constants_json(constants))
        writer.write_text("cases.md", case_summary_markdown(summary, constants, embedding.construction))

    if args.get("check_bounds"):
        construction = embedding.construction
        if construction not in CONSTRUCTION_BOUNDS:
            raise ConfigError(f"Sem cotas conhecidas para a construção {construction!r}.")
        lip_bound, inverse_bound = CONSTRUCTION_BOUNDS[construction]
        checks = [
            ("lipschitz", report.lip <= lip_bound + TOLERANCE, f"{report.lip:.12g} ≤ {lip_bound:g}"),
            (
                "co-lipschitz",
                report.colip_inverse <= inverse_bound + TOLERANCE,
                f"{report.colip_inverse:.12g} ≤ {inverse_bound:g}",
            ),
        ]
        if construction == "segmented":
            if constants is None:
                _, _, constants = _case_tables(embedding, envelope)
            for row in constants.itertuples(index=False):
                checks.append(
                    (f"caso {row.case}", bool(row.ok), f"razão mínima {row.min_ratio:.6g} ≥ 1/{row.bound:g}")
                )
        writer.write_json("bounds.json", [{"check": n, "ok": ok, "detail": d} for n, ok, d in checks])
        failed = [f"{n}: {d}" for n, ok, d in checks if not ok]
        if failed:
            raise InvariantViolation(f"Cotas de {construction} violadas: " + "; ".join(failed))
    return f"Distorção {report.distortion:.12g} (lip {report.lip:.6g}, inverso {report.colip_inverse:.6g}, {report.mode})."


def cmd_coarse_moduli(args: Args, writer: ArtifactWriter) -> str:
    embedding = _load_map(args["map"])
    moduli = coarse_moduli(embedding, parse_floats(args["t_grid"], "t"), parse_floats(args["theta_grid"], "θ"))
    writer.write_json("coarse.json", _numeric(moduli.to_dict()))
    writer.write_csv("omega.csv", moduli.omega)
    writer.write_csv("lipschitz.csv", moduli.lipschitz)
    return f"L_∞ estimado {moduli.l_infinity:.6g} (mínimo sobre a grade de θ)."


def cmd_filtration(args: Args, writer: ArtifactWriter) -> str:
    embedding = _load_map(args["map"])
    table = filtration_decompose(embedding, int(args["a"]), args["mode"])
    if args.get("p") is not None:
        p = parse_p(args["p"])
    elif isinstance(embedding.target, Lp):
        p = embedding.target.p
    else:
        raise ConfigError("Alvo sem expoente p declarado; informe --p.")
    report = counting_bounds(table, float(args["C"]), p)
    writer.write_json(
        "filtration.json",
        _numeric(
            {
                "a": table.a,
                "mode": table.mode,
                "N": table.N,
                "bands": table.bands,
                "rest_norm": table.rest_norm(),
                "reconstruction_error": table.reconstruction_error(),
                "counting": report.to_dict(),
            },
            mode="exhaustive",
        ),
    )
    writer.write_csv("norms.csv", table.norms_frame())
    writer.write_csv("w.csv", table.branch_frame())
    writer.write_csv("midpoints.csv", midpoint_windows(table))
    side = report.failed_side or "nenhum"
    return f"Filtração N={table.N}, {table.bands} bandas; lado violado do contrato: {side}."


def cmd_certify(args: Args, writer: ArtifactWriter) -> str:
    cert = certificate(
        float(args["C"]),
        parse_p(args["p"]),
        None if args.get("a") is None else int(args["a"]),
        None if args.get("m") is None else int(args["m"]),
    )
    writer.write_json("certificate.json", cert.to_dict())
    n_text = str(cert.N) if cert.N is not None else f"10^{cert.log10_N:.1f}"
    return f"a={cert.a}, m={cert.m}, N={n_text}, contradição={cert.contradiction}."


def cmd_concentration(args: Args, writer: ArtifactWriter) -> str:
    model = args["model"]
    space = model_space(model)
    theta = MODELS[model][1] if args.get("theta") is None else float(args["theta"])
    k, C, p = int(args["k"]), float(args["C"]), parse_p(args["p"])
    result = concentration_search(
        lambda A: james_sum(model, A),
        int(args["n"]),
        k,
        C,
        p,
        space,
        budget=int(args["budget"]),
        seed=int(args["seed"]),
        restarts=int(args["restarts"]),
    )
    writer.write_json(
        "concentration.json",
        _numeric(
            {"model": model, "search": result.to_dict(), "inequality": kr_contradiction(theta, k, C, p)},
            mode="heuristic",
            seed=int(args["seed"]),
        ),
    )
    return f"Diâmetro {result.best_diameter:.6g} contra cota {result.kr_bound:.6g} (atingida: {result.met})."


def _optimizer_config(args: Args) -> OptimizerConfig:
    return OptimizerConfig(
        iterations=int(args["iterations"]),
        restarts=int(args["restarts"]),
        beta0=float(args["beta0"]),
        tau=float(args["tau"]),
        seed=int(args["seed"]),
        threads=int(args["threads"]),
    )


def _read_distances(path: str):
    frame = pd.read_csv(path, index_col=0, float_precision="round_trip")
    return metric_space(frame.to_numpy(dtype=np.float64), [str(c) for c in frame.columns])


def cmd_optimize(args: Args, writer: ArtifactWriter) -> str:
    if args.get("distances"):
        space = _read_distances(args["distances"])
    elif args.get("depth") is not None:
        space = tree_metric_space(HyperbolicTree(depth=int(args["depth"]), branching=int(args["branching"])))
    else:
        raise ConfigError("optimize exige --depth ou --distances.")
    d = len(space.labels) if str(args["d"]) == "nodes" else int(args["d"])
    run = optimize(space, parse_p(args["p"]), d, _optimizer_config(args))
    writer.write_json("run.json", _numeric(run.to_dict(), mode="exhaustive", seed=run.seed))
    writer.write_csv("trace.csv", run.trace)
    writer.write_csv("positions.csv", run.positions_frame())
    return f"Melhor distorção encontrada {run.distortion:.6g} (cota superior; reinício {run.restart})."


def cmd_growth(args: Args, writer: ArtifactWriter) -> str:
    d = None if str(args["d"]) == "nodes" else int(args["d"])
    frame, _ = growth_experiment(
        parse_ints(args["depths"], "depths"), int(args["branching"]), parse_p(args["p"]), d, _optimizer_config(args)
    )
    writer.write_csv("growth.csv", frame)
    writer.write_parquet("growth.parquet", frame)
    writer.write_json(
        "growth.json",
        _numeric({"rows": frame.to_dict(orient="records"), "upper_bound_only": True}, seed=int(args["seed"])),
    )
    values = ", ".join(f"{v:.4g}" for v in frame["distortion"])
    return f"Distorções por N: {values}."


COMMANDS: dict[str, Handler] = {
    "gen-tree": cmd_gen_tree,
    "gen-system": cmd_gen_system,
    "embed": cmd_embed,
    "distortion": cmd_distortion,
    "coarse-moduli": cmd_coarse_moduli,
    "filtration": cmd_filtration,
    "certify": cmd_certify,
    "concentration": cmd_concentration,
    "optimize": cmd_optimize,
    "growth": cmd_growth,
}


# --- parser ------------------------------------------------------------------


def _optimizer_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p", default="2")
    p.add_argument("--d", default="2", help='dimensão do alvo ou "nodes"')
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--beta0", type=float, default=8.0)
    p.add_argument("--tau", type=float, default=200.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)


def _system_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--branching", type=int, default=2)
    p.add_argument("--kind-tree", dest="kind_tree", choices=["integer", "dyadic"], default="integer")
    p.add_argument("--delta", type=float, default=0.0, help="δ do sistema simples (0 = canônico)")
    p.add_argument("--levels", type=int, default=None)
    p.add_argument("--K", type=int, default=2)
    p.add_argument("--schedule", default="default", help='"default", "zero" ou lista δ_0,δ_1,...')
    p.add_argument("--seed", type=int, default=0)


def register(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("gen-tree", help="gera T_N^b (ou a árvore diádica)")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--branching", type=int, default=2)
    p.add_argument("--kind", choices=["integer", "dyadic"], default="integer")

    p = sub.add_parser("gen-system", help="gera sistema quase biortogonal (simples ou por níveis)")
    p.add_argument("--kind", choices=["single", GLUING, SEGMENTED], default="single")
    _system_flags(p)

    p = sub.add_parser("embed", help="aplica uma construção de mergulho")
    p.add_argument("--construction", choices=CONSTRUCTIONS, required=True)
    p.add_argument("--system", default=None, help="system.json de gen-system")
    _system_flags(p)
    p.add_argument("--eta", default="schedule", help='"schedule" ou lista η (segmentada)')
    p.add_argument("--epsilon", type=float, default=1e-6)

    p = sub.add_parser("distortion", help="mede a distorção de um mapa")
    p.add_argument("--map", required=True, help="diretório de saída de embed")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--check-bounds", dest="check_bounds", action="store_true")
    p.add_argument("--pairs", action="store_true")
    p.add_argument("--envelope", type=float, default=ENVELOPE)

    p = sub.add_parser("coarse-moduli", help="ω_f, L_θ e estimativa de L_∞")
    p.add_argument("--map", required=True)
    p.add_argument("--t-grid", dest="t_grid", default="1,2,4,8,16")
    p.add_argument("--theta-grid", dest="theta_grid", default="1,2,4,8")

    p = sub.add_parser("filtration", help="decomposição w_jk e cotas de contagem")
    p.add_argument("--map", required=True)
    p.add_argument("--a", type=int, default=2)
    p.add_argument("--mode", choices=["truncate", "average"], default="truncate")
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--p", default=None)

    p = sub.add_parser("certify", help="parâmetros (a, m, N) de não mergulho")
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--a", type=int, default=None)
    p.add_argument("--m", type=int, default=None)

    p = sub.add_parser("concentration", help="busca heurística de concentração em k-subconjuntos")
    p.add_argument("--model", choices=sorted(MODELS), default="l1")
    p.add_argument("--n", type=int, default=40)
    p.add_argument("--k", type=int, default=9)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--p", default="2")
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--budget", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=3)

    p = sub.add_parser("optimize", help="minimiza a distorção em ℓp^d")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--branching", type=int, default=2)
    p.add_argument("--distances", default=None, help="CSV quadrado com rótulos na primeira linha e coluna")
    _optimizer_flags(p)

    p = sub.add_parser("growth", help="melhor distorção de T_N^b em ℓp^d por N")
    p.add_argument("--depths", default="2,4,6")
    p.add_argument("--branching", type=int, default=2)
    _optimizer_flags(p)
    p.set_defaults(d="8")

    p = sub.add_parser("rerun", help="reexecuta um manifesto e compara checksums")
    p.add_argument("--manifest", required=True)


def resolve(command: str, args: Args) -> Args:
    """Completa padrões que dependem do ambiente (orçamento, threads)."""
    args = dict(args)
    if command == "distortion" and args.get("budget") is None:
        args["budget"] = config.pair_budget()
    if command in ("optimize", "growth") and args.get("threads") is None:
        args["threads"] = config.default_threads()
    return args
