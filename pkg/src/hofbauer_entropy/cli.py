from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Any

from rich.console import Console
from rich.table import Table

from hofbauer_entropy.analysis import BoundsParams, bounds_report, entropy_hofbauer
from hofbauer_entropy.core.config import RunConfig, build_run_config, load_graph_file, load_map
from hofbauer_entropy.core.dotenv import load_dotenv_if_present
from hofbauer_entropy.core.errors import ConfigError, HofbauerEntropyError
from hofbauer_entropy.core.log import configure_logging
from hofbauer_entropy.core.records import (
    BoundsRecord,
    JumpRecord,
    NoJumpRecord,
    SequenceRecord,
    record_columns,
    record_to_row,
)
from hofbauer_entropy.core.run import error_text, run_sweep, safe_path_component
from hofbauer_entropy.core.storage import format_value, write_csv_atomic, write_json_atomic
from hofbauer_entropy.graphs import (
    OrientedGraph,
    bounded_counts,
    bowen_empirical,
    check_convergence,
    closed_counts,
    cyclic_components,
    entropy_of_graph,
    first_return_counts,
    gurevic_entropy,
    markov_entropy,
    parry_measure,
    total_variation,
)
from hofbauer_entropy.hofbauer import build_diagram, depth_histogram, diagram_to_payload, tag_histogram, tag_vertices
from hofbauer_entropy.maps import natural_partition
from hofbauer_entropy.perturb import find_tangency, jump_experiment, no_jump_experiment

MARKOV_ACTIONS = ("entropy", "parry", "bowen", "counts", "convergence")


def _progress() -> bool:
    return sys.stderr.isatty()


def _map_dir(cfg: RunConfig, name: str) -> Path:
    return cfg.output_dir / safe_path_component(name)


def _cmd_entropy(args: argparse.Namespace) -> int:
    console = Console()
    cfg = build_run_config("entropy", args)
    fmap = load_map(cfg.map_spec or "", r=cfg.r, mode=cfg.mode)
    r = cfg.r if cfg.r is not None else fmap.smoothness_order

    params = BoundsParams(n_max=cfg.n_max, N=cfg.N, p_max=cfg.p_max, Q_max=cfg.Q_max, method=cfg.method)
    report = bounds_report(fmap, r, params)

    sequences: list[SequenceRecord] = []
    for est in report.estimates:
        if est.method == "lap":
            sequences.extend(SequenceRecord("lap", n, v) for n, v in est.sequence)
    sequences.extend(SequenceRecord("R", n, v) for n, v in report.R_sequence)

    failed = report.h_estimate is None or report.R_estimate is None
    if cfg.method in {"hofbauer", "all"}:
        part = natural_partition(fmap)

        def _h(N: int) -> float | None:
            return entropy_hofbauer(fmap, part, N, cfg.p_max).value

        def _h_failed(N: int, exc: Exception) -> float | None:
            return None

        hs = run_sweep(
            list(range(1, cfg.N + 1)), _h, on_error=_h_failed, concurrency=cfg.concurrency, desc="D_N", progress=_progress()
        )
        running: float | None = None
        for N, h in enumerate(hs, start=1):
            if h is None:
                failed = True
                sequences.append(SequenceRecord("hofbauer", N, None))
                continue
            running = h if running is None else max(running, h)
            sequences.append(SequenceRecord("hofbauer", N, running))

    record = BoundsRecord(
        map=fmap.name,
        r=r,
        h_estimate=report.h_estimate,
        h_method=report.h_method,
        R_estimate=report.R_estimate,
        yomdin_bound=report.yomdin_bound,
        max_bound=report.max_bound,
        beta_estimate=report.beta_estimate,
        lambda_p=";".join(format_value(v) for v in report.lambda_p),
        flags=";".join(report.flags),
    )
    out = _map_dir(cfg, fmap.name)
    write_csv_atomic(out / "bounds.csv", record_columns(BoundsRecord), [record_to_row(record)])
    write_csv_atomic(out / "sequences.csv", record_columns(SequenceRecord), [record_to_row(s) for s in sequences])

    for flag in report.flags:
        console.print(f"[yellow]flag:[/yellow] {flag}")
    console.print(
        f"h={format_value(report.h_estimate)} R={format_value(report.R_estimate)} bound={format_value(report.max_bound)}"
    )
    console.print(f"Wrote {out / 'bounds.csv'} and {out / 'sequences.csv'}")
    return 1 if failed else 0


def _cmd_diagram(args: argparse.Namespace) -> int:
    console = Console()
    cfg = build_run_config("diagram", args)
    fmap = load_map(cfg.map_spec or "", r=cfg.r, mode=cfg.mode)
    diagram = build_diagram(fmap, natural_partition(fmap), cfg.N)

    payload = diagram_to_payload(diagram)
    tags = tag_vertices(diagram, cfg.N, cfg.K)
    for item in payload["vertices"]:
        if tags.get(item["id"]):
            item["tags"] = list(tags[item["id"]])
    out = _map_dir(cfg, fmap.name) / f"diagram_N{cfg.N}.json"
    write_json_atomic(out, payload)

    if args.stats:
        table = Table(title=f"D_{cfg.N} of {fmap.name}")
        table.add_column("quantity")
        table.add_column("value", justify="right")
        table.add_row("vertices", str(len(diagram.vertices)))
        table.add_row("edges", str(len(diagram.edges)))
        for depth, count in depth_histogram(diagram).items():
            table.add_row(f"depth {depth}", str(count))
        for K, count in tag_histogram(diagram, list(range(1, cfg.K + 1))).items():
            table.add_row(f"E_{cfg.N}_{K}", str(count))
        console.print(table)

    console.print(f"Wrote {len(diagram.vertices)} vertices, {len(diagram.edges)} edges to {out}")
    return 0


def _default_vertex(g: OrientedGraph) -> str:
    comps = cyclic_components(g)
    if comps:
        return max(comps, key=len)[0]
    if not g.vertices:
        raise ConfigError("graph has no vertices")
    return g.vertices[0]


def _cmd_markov(args: argparse.Namespace) -> int:
    console = Console()
    cfg = build_run_config("markov", args)
    if not cfg.graph_path:
        raise ConfigError("markov needs --graph")
    g = load_graph_file(Path(cfg.graph_path))
    out = cfg.output_dir / safe_path_component(Path(cfg.graph_path).stem)
    action = args.action

    if action == "entropy":
        h = entropy_of_graph(g)
        rows: list[list[Any]] = [["spectral", h.value]]
        u = cfg.vertex or _default_vertex(g)
        if h.has_cycle:
            ge = gurevic_entropy(g, u, cfg.p_max)
            rows.append(["gurevic", ge.estimate])
            rows.extend([f"gurevic_p{p}", v] for p, v in ge.sequence)
        path = out / "entropy.csv"
        write_csv_atomic(path, ["quantity", "value"], rows)
        console.print(f"h={format_value(h.value)}")
    elif action == "parry":
        mu = parry_measure(g)
        path = out / "parry.csv"
        write_csv_atomic(path, ["vertex", "probability"], [[v, mu.vertex_probs[v]] for v in g.vertices])
        console.print(f"eigenvalue={format_value(mu.eigenvalue)} entropy={format_value(markov_entropy(mu))}")
    elif action == "bowen":
        p = args.p or cfg.p_max
        empirical = bowen_empirical(g, p, base=cfg.vertex)
        mu = parry_measure(g)
        path = out / f"bowen_p{p}.csv"
        write_csv_atomic(
            path, ["vertex", "empirical", "parry"], [[v, empirical[v], mu.vertex_probs[v]] for v in g.vertices]
        )
        console.print(f"total_variation={format_value(total_variation(empirical, dict(mu.vertex_probs)))}")
    elif action == "counts":
        u = cfg.vertex or _default_vertex(g)
        closed = closed_counts(g, u, cfg.p_max)
        first = first_return_counts(g, u, cfg.p_max)
        bounded = bounded_counts(g, u, cfg.p_max, args.M)
        path = out / f"counts_{safe_path_component(u)}.csv"
        write_csv_atomic(
            path,
            ["p", "closed", "first_returns", "bounded"],
            [[p, closed[p], first[p - 1], bounded[p] if args.M is not None else None] for p in range(1, cfg.p_max + 1)],
        )
        console.print(",".join(str(c) for c in closed[1:]))
    else:
        sequence = [load_graph_file(Path(s)) for s in args.sequence or []]
        if not sequence:
            raise ConfigError("convergence needs at least one --sequence graph")
        tag = args.tag or f"E_{cfg.N}_{cfg.K}"
        report = check_convergence(sequence, g, tag=tag, M=cfg.M, p_max=cfg.p_max)
        path = out / "convergence.csv"
        write_csv_atomic(
            path,
            ["index", "vertex", "target", "p", "bounded_count", "limit_count"],
            [[v.index, v.vertex, v.target, v.p, v.bounded_count, v.limit_count] for v in report.violations],
        )
        verdict = "ok" if report.ok else f"{len(report.violations)} violation(s)"
        console.print(f"convergence: {verdict} ({report.checked} tagged vertices, tag {tag})")

    console.print(f"Wrote {path}")
    return 0


def _cmd_perturb(args: argparse.Namespace) -> int:
    console = Console()
    cfg = build_run_config("perturb", args)

    if args.no_jump:
        fmap = load_map(cfg.map_spec or "builtin:tent:2", r=cfg.r, mode=cfg.mode)
        r = cfg.r if cfg.r is not None else fmap.smoothness_order
        samples = no_jump_experiment(
            fmap, r, cfg.samples, cfg.seed, cfg.max_cr, n_max=cfg.n_max, concurrency=cfg.concurrency, progress=_progress()
        )
        path = _map_dir(cfg, fmap.name) / f"no_jump_seed{cfg.seed}.csv"
        write_csv_atomic(path, record_columns(NoJumpRecord), [record_to_row(x) for x in samples])
        worst = max((x.entropy_lap for x in samples if x.entropy_lap is not None), default=math.nan)
        console.print(f"max entropy_lap={format_value(worst)} over {len(samples)} samples")
        statuses = [x.status for x in samples]
    else:
        fmap = load_map(cfg.map_spec or "builtin:tangency", r=cfg.r, mode=cfg.mode)
        r = cfg.r if cfg.r is not None else fmap.smoothness_order
        tangency = find_tangency(fmap, r=r)
        if tangency is None:
            raise HofbauerEntropyError(f"no homoclinic tangency of order {r} found for {fmap.name}")
        rows = jump_experiment(
            fmap, tangency, r, cfg.l_list, cfg.delta, C=cfg.C, concurrency=cfg.concurrency, progress=_progress()
        )
        path = _map_dir(cfg, fmap.name) / "jump.csv"
        write_csv_atomic(path, record_columns(JumpRecord), [record_to_row(x) for x in rows])
        for x in rows:
            console.print(
                f"l={x.l} N={format_value(x.N)} certified={format_value(x.certified_entropy)} "
                f"chain={format_value(x.theoretical_chain)} status={x.status}"
            )
        statuses = [x.status for x in rows]

    console.print(f"Wrote {len(statuses)} rows to {path}")
    return 1 if "error" in statuses else 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, help="YAML file with run config fields; flags override it")
    p.add_argument("--out-dir", dest="output_dir", default=None, help="Output directory (default: $HOFBAUER_ENTROPY_OUTPUT_DIR or .output)")
    p.add_argument("--mode", default=None, choices=["exact", "float"])


def _add_map(p: argparse.ArgumentParser, *, required: bool) -> None:
    p.add_argument(
        "--map",
        dest="map_spec",
        default=None,
        required=required,
        help="builtin:<tent|logistic|identity|tangency>[:param] or a map description file",
    )
    p.add_argument("--r", type=float, default=None, help="Smoothness order r >= 1")


def main(argv: list[str] | None = None) -> int:
    load_dotenv_if_present()

    parser = argparse.ArgumentParser(prog="hofbauer-entropy")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_entropy = sub.add_parser("entropy", help="Entropy estimates and the Yomdin / max(h, R/r) bounds")
    _add_map(p_entropy, required=False)
    p_entropy.add_argument("--method", default=None, choices=["lap", "hofbauer", "all"])
    p_entropy.add_argument("--depth", dest="N", type=int, default=None, help="Diagram depth N")
    p_entropy.add_argument("--pmax", dest="p_max", type=int, default=None)
    p_entropy.add_argument("--nmax", dest="n_max", type=int, default=None, help="Iterates for lap counts and R(f)")
    p_entropy.add_argument("--Q-max", dest="Q_max", type=int, default=None)
    p_entropy.add_argument("--concurrency", type=int, default=None)
    _add_common(p_entropy)
    p_entropy.set_defaults(func=_cmd_entropy)

    p_diagram = sub.add_parser("diagram", help="Build the truncated Hofbauer diagram D_N")
    _add_map(p_diagram, required=False)
    p_diagram.add_argument("--depth", dest="N", type=int, default=None)
    p_diagram.add_argument("--K", type=int, default=None, help="Tag vertices of E_{N,K}")
    p_diagram.add_argument("--stats", action="store_true", help="Print vertex, edge and tag counts")
    _add_common(p_diagram)
    p_diagram.set_defaults(func=_cmd_diagram)

    p_markov = sub.add_parser("markov", help="Path counts, entropies and measures on a graph file")
    p_markov.add_argument("action", choices=MARKOV_ACTIONS)
    p_markov.add_argument("--graph", dest="graph_path", default=None)
    p_markov.add_argument("--vertex", default=None)
    p_markov.add_argument("--pmax", dest="p_max", type=int, default=None)
    p_markov.add_argument("--p", type=int, default=None, help="Path length for bowen (default: --pmax)")
    p_markov.add_argument("--M", type=int, default=None, help="Return bound for counts / convergence")
    p_markov.add_argument("--K", type=int, default=None)
    p_markov.add_argument("--depth", dest="N", type=int, default=None)
    p_markov.add_argument("--tag", default=None, help="Tag checked by convergence (default E_<depth>_<K>)")
    p_markov.add_argument("--sequence", nargs="*", default=None, help="Graph files G_n for convergence")
    _add_common(p_markov)
    p_markov.set_defaults(func=_cmd_markov)

    p_perturb = sub.add_parser("perturb", help="Entropy jump table at a homoclinic tangency")
    _add_map(p_perturb, required=False)
    p_perturb.add_argument("--l-list", dest="l_list", default=None, help="Comma-separated iterate lengths l")
    p_perturb.add_argument("--delta", type=float, default=None)
    p_perturb.add_argument("--C", type=float, default=None)
    p_perturb.add_argument("--no-jump", action="store_true", help="Random C^r-small bumps instead of the jump table")
    p_perturb.add_argument("--samples", type=int, default=None)
    p_perturb.add_argument("--seed", type=int, default=None)
    p_perturb.add_argument("--max-cr", dest="max_cr", type=float, default=None)
    p_perturb.add_argument("--nmax", dest="n_max", type=int, default=None)
    p_perturb.add_argument("--concurrency", type=int, default=None)
    _add_common(p_perturb)
    p_perturb.set_defaults(func=_cmd_perturb)

    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    err = Console(stderr=True)
    try:
        return int(args.func(args))
    except (ConfigError, FileNotFoundError) as e:
        err.print(f"[red]error:[/red] {e}")
        return 2
    except (HofbauerEntropyError, ValueError) as e:
        err.print(f"[red]error:[/red] {error_text(e)}")
        return 1
