"""Command-line entry point.

Subcommands: parse, eval, tour, score, pack, solve, bench, rank.
Exit codes: 0 ok, 1 usage error, 2 instance parse error, 3 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import glob as _glob
import json
import math
import sys
import time as _time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from random import Random

import numpy as np

from ttp.evaluate import Solution, build_prefix_cache, evaluate
from ttp.instance import Instance, ParseError, load_instance
from ttp.packing import PackingParams, default_beta, initial_picking_plan
from ttp.scoring import DEFAULT_ALPHA, build_score_table
from ttp.solver import RunRecord, SolverConfig, solve
from ttp.stats import ResultMatrix, average_ranking, chi2_critical, friedman_statistic
from ttp.tour import delaunay_candidates, nearest_neighbor_tour, two_opt_improve

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read_tour(path: str) -> list[int]:
    return [int(tok) for tok in Path(path).read_text().split()]


def _read_packing(path: str) -> list[int]:
    return [int(tok) for tok in Path(path).read_text().split()]


def _solver_config(args, inst: Instance) -> SolverConfig:
    beta = None if args.beta in (None, "auto") else float(args.beta)
    return SolverConfig(
        time_budget=args.time,
        alpha=args.alpha,
        beta=beta,
        seed=args.seed,
        use_sa=not getattr(args, "bitflip", False),
        tour_in=_read_tour(args.tour_in) if getattr(args, "tour_in", None) else None,
    )


def cmd_parse(args) -> int:
    inst = load_instance(args.instance)
    print(json.dumps({
        "name": inst.name,
        "n": inst.n,
        "m": inst.m,
        "capacity": inst.capacity,
        "v_min": inst.v_min,
        "v_max": inst.v_max,
        "renting_ratio": inst.renting_ratio,
        "edge_weight_type": inst.edge_weight_type.value,
        "total_item_weight": inst.total_item_weight,
    }))
    return EXIT_OK


def cmd_eval(args) -> int:
    inst = load_instance(args.instance)
    sol = Solution(_read_tour(args.tour), _read_packing(args.packing))
    sol.validate(inst)
    res = evaluate(inst, sol)
    print(json.dumps({
        "gain": res.gain,
        "travel_time": res.travel_time,
        "total_profit": res.total_profit,
        "final_weight": res.final_weight,
        "feasible": res.feasible,
    }))
    return EXIT_OK


def cmd_tour(args) -> int:
    inst = load_instance(args.instance)
    if args.tour_in:
        tour = _read_tour(args.tour_in)
    else:
        tour = nearest_neighbor_tour(inst)
    sol = Solution(tour, [0] * inst.m)
    sol.validate(inst)
    candidates = delaunay_candidates(inst)
    deadline = _time.monotonic() + args.time
    sol = two_opt_improve(inst, sol, None, candidates, deadline)
    text = " ".join(str(c) for c in sol.tour)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_score(args) -> int:
    inst = load_instance(args.instance)
    tour = _read_tour(args.tour) if args.tour else nearest_neighbor_tour(inst)
    sol = Solution(tour, [0] * inst.m)
    sol.validate(inst)
    cache = build_prefix_cache(inst, sol)
    table = build_score_table(inst, cache, args.alpha)
    rows = [
        {
            "item": j,
            "city": inst.items[j - 1].city,
            "profit": inst.items[j - 1].profit,
            "weight": inst.items[j - 1].weight,
            "score": table.scores[j - 1],
            "marginal_gain": table.marginal[j - 1],
        }
        for j in range(1, inst.m + 1)
    ]
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]) if rows else ["item"])
            writer.writeheader()
            writer.writerows(rows)
    else:
        print(json.dumps({
            "avg_score": table.avg_score,
            "max_score": table.max_score,
            "positive_count": table.positive_count,
            "ratio": table.ratio,
            "items": rows,
        }))
    return EXIT_OK


def cmd_pack(args) -> int:
    inst = load_instance(args.instance)
    tour = _read_tour(args.tour) if args.tour else nearest_neighbor_tour(inst)
    sol = Solution(tour, [0] * inst.m)
    sol.validate(inst)
    cache = build_prefix_cache(inst, sol)
    beta = default_beta(inst) if args.beta in (None, "auto") else float(args.beta)
    params = PackingParams(
        beta=beta,
        alpha=args.alpha,
        sa_t0=args.sa_t0,
        sa_cooling=args.sa_cooling,
        seed=args.seed,
    )
    packing = initial_picking_plan(inst, tour, cache, params)
    res = evaluate(inst, Solution(tour, packing))
    print(json.dumps({"packing": packing, "gain": res.gain, "feasible": res.feasible}))
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    record = solve(inst, _solver_config(args, inst))
    # reported best must round-trip through a fresh evaluation
    check = evaluate(inst, Solution(record.best_tour, record.best_packing))
    if not check.feasible or not math.isclose(check.gain, record.best_gain, rel_tol=1e-6, abs_tol=1e-6):
        print("internal error: best solution fails re-evaluation", file=sys.stderr)
        return EXIT_INTERNAL
    payload = record.to_dict()
    if args.json:
        Path(args.json).write_text(json.dumps(payload))
    print(json.dumps({"instance": record.instance, "gain": record.best_gain,
                      "wall_time": record.wall_time, "restarts": len(record.trace)}))
    return EXIT_OK


def _bench_task(task: tuple) -> dict:
    path, label, config_dict, run = task
    inst = load_instance(path)
    config = SolverConfig(**config_dict)
    record = solve(inst, config)
    out = record.to_dict()
    out["label"] = label
    out["run"] = run
    out["instance_path"] = str(path)
    return out


def cmd_bench(args) -> int:
    paths = sorted(_glob.glob(args.instances))
    if not paths:
        print(f"error: no instances match {args.instances!r}", file=sys.stderr)
        return EXIT_USAGE
    alphas = args.alpha or [DEFAULT_ALPHA]
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    tasks = []
    failed: list[str] = []
    for path in paths:
        try:
            load_instance(path)
        except (ParseError, OSError) as exc:
            failed.append(f"{path}: {exc}")
            continue
        for alpha in alphas:
            label = f"alpha{alpha:g}"
            for run in range(args.runs):
                cfg = SolverConfig(
                    time_budget=args.time,
                    alpha=alpha,
                    beta=None if args.beta in (None, "auto") else float(args.beta),
                    seed=args.seed + run,
                    max_restarts=args.max_restarts,
                )
                tasks.append((path, label, cfg.to_dict(), run))

    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_bench_task, tasks))
    else:
        results = [_bench_task(t) for t in tasks]

    records_path = outdir / "records.jsonl"
    with open(records_path, "w") as fh:
        for rec in results:
            fh.write(json.dumps(rec) + "\n")

    matrix = _matrix_from_records(results)
    _write_summary(outdir / "summary.csv", matrix)
    for line in failed:
        print(f"failed: {line}", file=sys.stderr)
    print(json.dumps({
        "records": str(records_path),
        "summary": str(outdir / "summary.csv"),
        "runs": len(results),
        "failed": len(failed),
    }))
    return EXIT_OK


def _matrix_from_records(records: list[dict]) -> ResultMatrix:
    instances = sorted({r["instance"] for r in records})
    methods = sorted({r["label"] for r in records})
    gains = [
        [
            [r["best_gain"] for r in records if r["instance"] == inst and r["label"] == lab]
            for lab in methods
        ]
        for inst in instances
    ]
    return ResultMatrix(instances=instances, methods=methods, gains=gains)


def _write_summary(path: Path, matrix: ResultMatrix) -> None:
    means = matrix.means()
    rsds = matrix.rsds()
    header = ["instance"]
    for m in matrix.methods:
        header += [f"{m}_mean", f"{m}_rsd"]
    rows = []
    for i, name in enumerate(matrix.instances):
        row = [name]
        for j in range(len(matrix.methods)):
            row += [f"{means[i, j]:.6g}", f"{rsds[i, j]:.4g}"]
        rows.append(row)
    footer = ["average_ranking"]
    ranks = average_ranking(means)
    for j in range(len(matrix.methods)):
        footer += [f"{ranks[j]:.4g}", ""]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
        writer.writerow(footer)
        if means.shape[0] >= 2 and means.shape[1] >= 2:
            f, rank_sums, df = friedman_statistic(means)
            stat_row = ["friedman_F", f"{f:.6g}", f"df={df}"]
            try:
                stat_row.append(f"chi2_crit={chi2_critical(df):g}")
            except ValueError:
                pass
            writer.writerow(stat_row)


def _load_means_csv(path: str) -> ResultMatrix:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        methods = [f[: -len("_mean")] for f in fields if f.endswith("_mean")]
        instances, gains = [], []
        for row in reader:
            if not row.get("instance") or row["instance"].startswith(("average_ranking", "friedman")):
                continue
            instances.append(row["instance"])
            gains.append([[float(row[f"{m}_mean"])] for m in methods])
    return ResultMatrix(instances=instances, methods=methods, gains=gains)


def cmd_rank(args) -> int:
    records: list[dict] = []
    matrices: list[ResultMatrix] = []
    for path in args.results:
        if path.endswith(".jsonl"):
            with open(path) as fh:
                records += [json.loads(line) for line in fh if line.strip()]
        else:
            matrices.append(_load_means_csv(path))
    if records:
        matrices.append(_matrix_from_records(records))
    if not matrices:
        print("error: no result files given", file=sys.stderr)
        return EXIT_USAGE
    if len(matrices) > 1:
        print("error: pass either run records or one summary CSV, not a mix", file=sys.stderr)
        return EXIT_USAGE
    matrix = matrices[0]
    out = Path(args.csv) if args.csv else None
    if out is None:
        means = matrix.means()
        ranks = average_ranking(means)
        payload = {"methods": matrix.methods, "average_ranking": list(ranks)}
        if means.shape[0] >= 2:
            f, rank_sums, df = friedman_statistic(means)
            payload |= {"friedman_F": f, "rank_sums": list(map(float, rank_sums)), "df": df}
        print(json.dumps(payload))
    else:
        _write_summary(out, matrix)
        print(json.dumps({"csv": str(out)}))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ttp", description="Travelling Thief Problem solver and benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, tour_opt=False):
        p.add_argument("instance")
        if tour_opt:
            p.add_argument("--tour", help="tour file (whitespace-separated permutation)")

    p = sub.add_parser("parse", help="validate an instance file")
    common(p)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("eval", help="evaluate a (tour, packing) pair")
    common(p)
    p.add_argument("--tour", required=True)
    p.add_argument("--packing", required=True, help="packing file (0/1 vector)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("tour", help="construct and 2-OPT-improve a tour")
    common(p)
    p.add_argument("--out")
    p.add_argument("--tour-in", dest="tour_in")
    p.add_argument("--time", type=float, default=10.0)
    p.set_defaults(func=cmd_tour)

    p = sub.add_parser("score", help="dump per-item scores for a tour")
    common(p, tour_opt=True)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("pack", help="build the initial picking plan")
    common(p, tour_opt=True)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--beta", default="auto")
    p.add_argument("--sa-t0", dest="sa_t0", type=float)
    p.add_argument("--sa-cooling", dest="sa_cooling", type=float, default=0.95)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_pack)

    p = sub.add_parser("solve", help="run the full solver")
    common(p)
    p.add_argument("--time", type=float, default=10.0)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--beta", default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bitflip", action="store_true", help="bit-flip hill climbing instead of SA")
    p.add_argument("--tour-in", dest="tour_in")
    p.add_argument("--json", help="write the full run record here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="batch benchmark over an instance glob")
    p.add_argument("instances", help="glob of instance files")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--time", type=float, default=10.0)
    p.add_argument("--alpha", type=float, action="append", help="repeat for one config per value")
    p.add_argument("--beta", default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-restarts", dest="max_restarts", type=int)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("rank", help="rank methods from run records or a summary CSV")
    p.add_argument("results", nargs="+")
    p.add_argument("--csv", help="write the ranking table here")
    p.set_defaults(func=cmd_rank)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValueError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AssertionError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
