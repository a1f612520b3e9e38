"""Experiment harness: graph generation, single runs, sweeps and plot-data aggregation.

Usage::

    constrained-qaoa generate --n 14 --edge-prob 0.2 --count 5 --seed 1 --out graphs/
    constrained-qaoa solve --algorithm dqva --graph graphs/graph_000.txt --budget 5 --m 3
    constrained-qaoa sweep experiments/fig2.ini --workers 4
    constrained-qaoa aggregate out/fig2/runs.csv --group-by edge_prob,p,lam

Sweep configs are INI files with ``[experiment]``, ``[graphs]``,
``[algorithm]`` and optional ``[optimizer]`` sections; list-valued keys take
comma-separated values and the sweep runs their Cartesian product.

Seeds derive from the single ``[experiment] seed`` root:

* graph ``i`` at edge probability index ``j``: ``SeedSequence([root, 0, j, i])``
* run seed for graph ``i`` (global index) and repetition ``r``:
  ``SeedSequence([root, 1, i, r])``; all algorithm settings on the same
  graph and repetition share it.

Exit status: 0 success, 1 configuration error, 2 some runs failed.
The default output directory comes from ``$CONSTRAINED_QAOA_OUT`` (else ``out``).
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import itertools
import json
import logging
import os
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .errors import ConstrainedQAOAError, ParameterError
from .graph import Graph, erdos_renyi, read_edgelist, write_edgelist
from .optimize import OptimizerConfig
from .solver import CSV_FIELDS, DqvaConfig, RunRecord, solve_dqva, solve_qao, solve_qaoa_plus

log = logging.getLogger("constrained_qaoa")

OUT_ENV = "CONSTRAINED_QAOA_OUT"
ALGORITHMS = ("qaoa_plus", "qao", "dqva")
RUN_FIELDS = CSV_FIELDS + ("edge_prob", "graph_index", "rep")
ROUND_FIELDS = ("run_id", "algorithm", "edge_prob", "budget", "seed", "round", "incumbent_weight", "e_max")


class ConfigError(ConstrainedQAOAError):
    pass


def _default_out() -> Path:
    return Path(os.environ.get(OUT_ENV, "out"))


@dataclass
class ExperimentConfig:
    experiment: str = "experiment"
    algorithm: str = "qaoa_plus"
    p: list[int] = field(default_factory=lambda: [1])
    lam: list[float] = field(default_factory=lambda: [2.0])
    vector_beta: list[bool] = field(default_factory=lambda: [True])
    initial: list[str] = field(default_factory=lambda: ["zero"])
    budget: list[int] = field(default_factory=lambda: [3])
    m: int = 3
    warm_starts: list[str] = field(default_factory=lambda: ["zero"])
    n: int = 8
    edge_prob: list[float] = field(default_factory=lambda: [0.2])
    count: int = 1
    connected: bool = False
    graph_file: str = ""
    repetitions: int = 1
    seed: int = 0
    mode: str = "exact"
    shots: int = 0
    output_dir: str = ""
    method: str = "nelder-mead"
    max_evals: int = 0
    random_starts: int = 3
    restarts: int = 1

    SECTIONS = {
        "experiment": ("experiment", "seed", "repetitions", "mode", "shots", "output_dir"),
        "graphs": ("n", "edge_prob", "count", "connected", "graph_file"),
        "algorithm": ("algorithm", "p", "lam", "vector_beta", "initial", "budget", "m", "warm_starts"),
        "optimizer": ("method", "max_evals", "random_starts", "restarts"),
    }
    # The INI key for the algorithm name and experiment id.
    ALIASES = {("algorithm", "algorithm"): "name", ("experiment", "experiment"): "id"}

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.repetitions < 1 or self.count < 1 or self.m < 1:
            raise ConfigError("repetitions, count and m must be >= 1")
        if self.mode not in ("exact", "sampled"):
            raise ConfigError(f"mode must be exact or sampled, got {self.mode!r}")
        if self.mode == "sampled" and self.shots < 1:
            raise ConfigError("sampled mode needs shots >= 1")
        if any(not 0 <= q <= 1 for q in self.edge_prob):
            raise ConfigError("edge probabilities must lie in [0, 1]")

    @classmethod
    def from_ini(cls, text: str) -> "ExperimentConfig":
        parser = configparser.ConfigParser()
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from exc
        types = {f.name: f.type for f in fields(cls)}
        known = {s: set(cls.ALIASES.get((s, k), k) for k in keys) for s, keys in cls.SECTIONS.items()}
        kwargs = {}
        for section in parser.sections():
            if section not in cls.SECTIONS:
                raise ConfigError(f"unknown section [{section}]")
            for key, raw in parser[section].items():
                if key not in known[section]:
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
                name = next(k for k in cls.SECTIONS[section] if cls.ALIASES.get((section, k), k) == key)
                kwargs[name] = _parse(types[name], raw, f"[{section}] {key}")
        try:
            return cls(**kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def to_ini(self) -> str:
        parser = configparser.ConfigParser()
        for section, keys in self.SECTIONS.items():
            parser[section] = {self.ALIASES.get((section, k), k): _format(getattr(self, k)) for k in keys}
        buf = io.StringIO()
        parser.write(buf)
        return buf.getvalue()

    def optimizer_config(self, seed: int) -> OptimizerConfig:
        return OptimizerConfig(method=self.method, max_evals=self.max_evals or None, seed=seed,
                               random_starts=self.random_starts, restarts=self.restarts)


def _parse(type_name, raw: str, where: str):
    raw = raw.strip()
    try:
        if type_name.startswith("list"):
            inner = type_name[5:-1]
            return [_parse(inner, part, where) for part in raw.split(",") if part.strip()]
        if type_name == "bool":
            low = raw.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return low in ("true", "1", "yes")
        if type_name == "int":
            return int(raw)
        if type_name == "float":
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse {raw!r} as {type_name}") from exc


def _format(value) -> str:
    if isinstance(value, list):
        return ", ".join(_format(v) for v in value)
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _derive(*entropy) -> int:
    return int(np.random.SeedSequence(list(entropy)).generate_state(1)[0])


@dataclass(frozen=True)
class _Task:
    run_id: str
    algorithm: str
    graph: Graph
    graph_seed: int | None
    edge_prob: float | str
    graph_index: int
    rep: int
    seed: int
    knobs: dict
    cfg: ExperimentConfig


def _graphs(cfg: ExperimentConfig):
    if cfg.graph_file:
        yield 0, "", None, read_edgelist(cfg.graph_file)
        return
    for j, prob in enumerate(cfg.edge_prob):
        for i in range(cfg.count):
            gseed = _derive(cfg.seed, 0, j, i)
            yield j * cfg.count + i, prob, gseed, erdos_renyi(cfg.n, prob, gseed, connected=cfg.connected)


def _knob_grid(cfg: ExperimentConfig) -> list[dict]:
    if cfg.algorithm == "qaoa_plus":
        return [{"p": p, "lam": lam} for p, lam in itertools.product(cfg.p, cfg.lam)]
    if cfg.algorithm == "qao":
        return [{"p": p, "vector_beta": vb, "initial": ini}
                for p, vb, ini in itertools.product(cfg.p, cfg.vector_beta, cfg.initial)]
    return [{"budget": b} for b in cfg.budget]


def _tasks(cfg: ExperimentConfig) -> list[_Task]:
    tasks = []
    for gi, prob, gseed, g in _graphs(cfg):
        for rep in range(cfg.repetitions):
            seed = _derive(cfg.seed, 1, gi, rep)
            for knobs in _knob_grid(cfg):
                run_id = f"{cfg.experiment}-{len(tasks):05d}"
                tasks.append(_Task(run_id, cfg.algorithm, g, gseed, prob, gi, rep, seed, knobs, cfg))
    return tasks


def _execute(task: _Task) -> RunRecord:
    cfg = task.cfg
    opt = cfg.optimizer_config(task.seed)
    shots = cfg.shots or None
    k = task.knobs
    if task.algorithm == "qaoa_plus":
        rec = solve_qaoa_plus(task.graph, k["p"], k["lam"], opt, cfg.mode, shots, task.seed)
    elif task.algorithm == "qao":
        rec = solve_qao(task.graph, k["p"], k["vector_beta"], k["initial"], opt, cfg.mode, shots, task.seed)
    else:
        dcfg = DqvaConfig(mixer_budget=k["budget"], m=cfg.m, warm_starts=tuple(cfg.warm_starts),
                          optimizer=opt, mode=cfg.mode, shots=shots, seed=task.seed)
        rec = solve_dqva(task.graph, dcfg)
    rec.run_id = task.run_id
    rec.graph_seed = task.graph_seed
    rec.config.update(edge_prob=task.edge_prob, graph_index=task.graph_index, rep=task.rep)
    return rec


def _safe_execute(task: _Task):
    try:
        return _execute(task)
    except ConstrainedQAOAError as exc:
        return exc


def record_row(rec: RunRecord) -> dict:
    row = rec.to_row()
    for key in ("edge_prob", "graph_index", "rep"):
        row[key] = rec.config.get(key, "")
    return row


def round_rows(rec: RunRecord) -> list[dict]:
    """Incumbent weight at the end of every outer round 0..m (carried forward when a run stops early)."""
    m = int(rec.config.get("m", 0))
    best = {}
    for entry in rec.trace:
        best[entry["round"]] = max(best.get(entry["round"], 0), entry["incumbent_weight"])
    rows, current = [], 0
    for r in range(m + 1):
        current = max(current, best.get(r, current))
        rows.append({"run_id": rec.run_id, "algorithm": rec.algorithm,
                     "edge_prob": rec.config.get("edge_prob", ""),
                     "budget": rec.config.get("mixer_budget", ""), "seed": rec.config.get("seed", ""),
                     "round": r, "incumbent_weight": current, "e_max": rec.e_max})
    return rows


def _write_csv(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(header), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def run_experiment(cfg: ExperimentConfig, workers: int = 1, out_dir: Path | None = None):
    """Run every (graph, repetition, knob) cell and write runs/rounds/summary files.

    Returns ``(records, failures)``; failed runs are logged and skipped.
    """
    out = Path(out_dir or cfg.output_dir or _default_out() / cfg.experiment)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.ini").write_text(cfg.to_ini())
    tasks = _tasks(cfg)
    log.info("experiment %s: %d runs -> %s", cfg.experiment, len(tasks), out)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_safe_execute, tasks))
    else:
        results = [_safe_execute(t) for t in tasks]
    records, failures = [], []
    for task, res in zip(tasks, results):
        if isinstance(res, Exception):
            log.error("run %s failed: %s", task.run_id, res)
            failures.append((task.run_id, str(res)))
        else:
            records.append(res)
    _write_csv(out / "runs.csv", RUN_FIELDS, [record_row(r) for r in records])
    with (out / "runs.jsonl").open("w") as fh:
        for r in records:
            fh.write(r.to_json() + "\n")
    if cfg.algorithm == "dqva":
        _write_csv(out / "rounds.csv", ROUND_FIELDS, [row for r in records for row in round_rows(r)])
    if records:
        keys = ["algorithm", "edge_prob"] + {"qaoa_plus": ["p", "lam"], "qao": ["p", "vector_beta", "initial"],
                                             "dqva": ["budget"]}[cfg.algorithm]
        table = emit_plot_data([record_row(r) for r in records], keys,
                               ["approximation_ratio", "sp_opt", "sp_subopt", "best_weight"])
        _write_csv(out / "summary.csv", list(table[0].keys()), table)
    return records, failures


def emit_plot_data(rows, group_keys, metrics=("approximation_ratio",)) -> list[dict]:
    """Long-format aggregate: one row per (group, metric) with mean, std (sample), count and run ids."""
    rows = list(rows)
    if not rows:
        raise ParameterError("cannot aggregate an empty record set")
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        missing = [k for k in group_keys if k not in row]
        if missing:
            raise ParameterError(f"rows lack group columns {missing}")
        groups.setdefault(tuple(str(row[k]) for k in group_keys), []).append(row)
    table = []
    for key in sorted(groups, key=_sort_key):
        members = groups[key]
        for metric in metrics:
            values = [float(r[metric]) for r in members if r.get(metric, "") not in ("", None)]
            if not values:
                continue
            table.append({
                **dict(zip(group_keys, key)),
                "metric": metric,
                "mean": repr(statistics.fmean(values)),
                "std": repr(statistics.stdev(values) if len(values) > 1 else 0.0),
                "count": len(values),
                "run_ids": ";".join(sorted({str(r.get("run_id", "")) for r in members})),
            })
    return table


def _sort_key(key):
    out = []
    for part in key:
        try:
            out.append((0, float(part), ""))
        except ValueError:
            out.append((1, 0.0, part))
    return out


# -- command line -------------------------------------------------------------

def _cmd_generate(args) -> int:
    out = Path(args.out or _default_out() / "graphs")
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        gseed = _derive(args.seed, 0, 0, i)
        g = erdos_renyi(args.n, args.edge_prob, gseed, connected=args.connected)
        path = out / f"graph_{i:03d}.txt"
        write_edgelist(g, path)
        print(f"{path}\tseed={gseed}\t{g.describe()}")
    return 0


def _cmd_solve(args) -> int:
    if args.graph:
        g, gseed = read_edgelist(args.graph), None
    else:
        gseed = args.graph_seed
        g = erdos_renyi(args.n, args.edge_prob, gseed, connected=args.connected)
    opt = OptimizerConfig(method=args.method, max_evals=args.max_evals, seed=args.seed,
                          random_starts=args.random_starts, restarts=args.restarts)
    shots = args.shots
    if args.algorithm == "qaoa_plus":
        rec = solve_qaoa_plus(g, args.depth, args.lam, opt, args.mode, shots, args.seed)
    elif args.algorithm == "qao":
        rec = solve_qao(g, args.depth, args.vector_beta, args.initial, opt, args.mode, shots, args.seed)
    else:
        rec = solve_dqva(g, DqvaConfig(mixer_budget=args.budget, m=args.m, warm_starts=tuple(args.warm_start),
                                       optimizer=opt, mode=args.mode, shots=shots, seed=args.seed))
    rec.run_id = "solve-00000"
    rec.graph_seed = gseed
    print(json.dumps(rec.to_dict(), indent=2, sort_keys=True))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(out / "runs.csv", RUN_FIELDS, [record_row(rec)])
        (out / "runs.jsonl").write_text(rec.to_json() + "\n")
    return 0


def _cmd_sweep(args) -> int:
    cfg = ExperimentConfig.from_ini(Path(args.config).read_text())
    records, failures = run_experiment(cfg, args.workers, Path(args.out) if args.out else None)
    print(f"{len(records)} runs written, {len(failures)} failed")
    return 2 if failures else 0


def _cmd_aggregate(args) -> int:
    with open(args.table, newline="") as fh:
        rows = list(csv.DictReader(fh))
    table = emit_plot_data(rows, args.group_by.split(","), args.metrics.split(","))
    if args.out:
        _write_csv(Path(args.out), list(table[0].keys()), table)
    else:
        writer = csv.DictWriter(sys.stdout, fieldnames=list(table[0].keys()), lineterminator="\n")
        writer.writeheader()
        writer.writerows(table)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="constrained-qaoa", description=__doc__.split("\n")[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write Erdos-Renyi graphs as edge lists")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--edge-prob", type=float, required=True)
    gen.add_argument("--count", type=int, default=1)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--connected", action="store_true")
    gen.add_argument("--out")
    gen.set_defaults(func=_cmd_generate)

    solve = sub.add_parser("solve", help="run one algorithm on one graph and print the record as JSON")
    solve.add_argument("--algorithm", choices=ALGORITHMS, required=True)
    solve.add_argument("--graph", help="edge-list file; otherwise a G(n, P) sample")
    solve.add_argument("--n", type=int, default=8)
    solve.add_argument("--edge-prob", type=float, default=0.2)
    solve.add_argument("--graph-seed", type=int, default=0)
    solve.add_argument("--connected", action="store_true")
    solve.add_argument("--depth", type=int, default=1)
    solve.add_argument("--lam", type=float, default=2.0)
    solve.add_argument("--vector-beta", action="store_true")
    solve.add_argument("--initial", default="zero")
    solve.add_argument("--budget", type=int, default=3)
    solve.add_argument("--m", type=int, default=3)
    solve.add_argument("--warm-start", action="append", default=None,
                       help="zero, greedy or a bitstring; repeatable (default: zero and greedy)")
    solve.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    solve.add_argument("--shots", type=int)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--method", choices=("nelder-mead", "coordinate-descent"), default="nelder-mead")
    solve.add_argument("--max-evals", type=int)
    solve.add_argument("--random-starts", type=int, default=3)
    solve.add_argument("--restarts", type=int, default=1)
    solve.add_argument("--out", help="also write runs.csv / runs.jsonl here")
    solve.set_defaults(func=_cmd_solve)

    sweep = sub.add_parser("sweep", help="run an experiment described by an INI config")
    sweep.add_argument("config")
    sweep.add_argument("--workers", type=int, default=1)
    sweep.add_argument("--out")
    sweep.set_defaults(func=_cmd_sweep)

    agg = sub.add_parser("aggregate", help="group a runs/rounds CSV into mean/std/count plot data")
    agg.add_argument("table")
    agg.add_argument("--group-by", required=True, help="comma-separated column names")
    agg.add_argument("--metrics", default="approximation_ratio")
    agg.add_argument("--out")
    agg.set_defaults(func=_cmd_aggregate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "warm_start", 0) is None:
        args.warm_start = ["zero", "greedy"]
    try:
        return args.func(args)
    except (ConfigError, ParameterError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConstrainedQAOAError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
