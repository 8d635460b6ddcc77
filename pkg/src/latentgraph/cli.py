"""Command-line front end: simulation, estimation, evaluation, benchmarks.

Every command is deterministic given its flags. Exit code 0 means all
outputs were written with clean solver convergence flags; exit code 2
means outputs were written but some solver reported non-convergence.
"""

from __future__ import annotations

import argparse
import json
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .correlation import BINARY, CONTINUOUS, MixedDataset, estimate_latent_correlation
from .metrics import (
    edge_set,
    eigvec_fpr_tpr,
    graph_fpr_tpr,
    matrix_errors,
    naive_covariance,
    oracle_lambda,
    roc_curve,
)
from .precision import adaptive_glasso_lla, clime, clime_threshold, glasso, lambda_path
from .psd import project_psd_maxnorm
from .simulate import (
    ScenarioSpec,
    random_graph_truth,
    read_matrix_csv,
    sample_scenario,
    save_truth,
    spiked_truth,
    write_matrix_csv,
)
from .spca import sin_angle, two_stage_spca

EXIT_OK = 0
EXIT_CONVERGENCE = 2

GRAPH_METHODS = ("lglasso", "lgscad", "lclime", "naive")
SPCA_METHODS = ("lpca", "naivepca")


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("LATENTGRAPH_THREADS", "1")))
    except ValueError:
        return 1


def _write_dataset(path: Path, data: MixedDataset) -> None:
    header = ",".join(f"x{j}" for j in range(data.d))
    np.savetxt(path, data.values, delimiter=",", header=header, comments="", fmt="%.17g")


def _infer_types(values: np.ndarray) -> list[str]:
    types = []
    for j in range(values.shape[1]):
        col = values[:, j]
        types.append(BINARY if np.all((col == 0.0) | (col == 1.0)) else CONTINUOUS)
    return types


def _read_types(path: Path, d: int) -> list[str]:
    entries = [line.strip().lower() for line in path.read_text().splitlines() if line.strip()]
    if len(entries) != d:
        raise SystemExit(f"types file lists {len(entries)} columns, data has {d}")
    bad = set(entries) - {BINARY, CONTINUOUS}
    if bad:
        raise SystemExit(f"types file contains unknown entries: {sorted(bad)}")
    return entries


def _load_dataset(data_path: Path, types_path: Path | None) -> MixedDataset:
    values = read_matrix_csv(data_path)
    types = _read_types(types_path, values.shape[1]) if types_path else _infer_types(values)
    return MixedDataset(values=values, column_types=types)


def _write_edges(path: Path, omega: np.ndarray) -> None:
    edges = sorted(edge_set(omega))
    lines = ["i,j"] + [f"{i},{j}" for i, j in edges]
    path.write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# subcommands


def _cmd_simulate(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    if args.design == "spiked":
        truth = spiked_truth(args.d, seed=args.seed)
    else:
        truth = random_graph_truth(args.d, c1=args.c1, seed=args.seed)
    spec = ScenarioSpec(
        scenario=args.scenario, n=args.n, d=args.d, seed=args.seed, design=args.design
    )
    data = sample_scenario(truth, spec)
    save_truth(truth, outdir)
    _write_dataset(outdir / "data.csv", data)
    manifest = {
        "scenario": args.scenario,
        "design": args.design,
        "n": args.n,
        "d": args.d,
        "seed": args.seed,
        "coupling": truth.coupling,
        "n_edges": len(truth.edges),
        "column_types": data.column_types,
        **truth.info,
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return EXIT_OK


def _cmd_corr(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    data = _load_dataset(Path(args.data), Path(args.types) if args.types else None)
    r = estimate_latent_correlation(data)
    write_matrix_csv(outdir / "R.csv", r)
    status = EXIT_OK
    if args.psd:
        projection = project_psd_maxnorm(r)
        write_matrix_csv(outdir / "Rp.csv", projection.matrix)
        if not projection.converged:
            status = EXIT_CONVERGENCE
    return status


def _graph_input(args) -> tuple[np.ndarray, bool]:
    """(input matrix, clean-convergence flag) for the requested method."""
    r = read_matrix_csv(Path(args.corr))
    if args.method == "clime":
        return r, True
    if args.psd_corr:
        return read_matrix_csv(Path(args.psd_corr)), True
    projection = project_psd_maxnorm(r)
    return projection.matrix, projection.converged


def _cmd_graph(args) -> int:
    if (args.lam is None) == (args.path is None):
        raise SystemExit("specify exactly one of --lambda or --path")
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    mat, clean = _graph_input(args)

    def solve(lam: float):
        if args.method == "glasso":
            return glasso(mat, lam)
        if args.method == "clime":
            est = clime(mat, lam)
            if args.tau_thresh is not None:
                est = clime_threshold(est, args.tau_thresh)
            return est
        return adaptive_glasso_lla(mat, lam, a=args.a, n_lla_steps=args.lla_steps)

    if args.lam is not None:
        est = solve(args.lam)
        write_matrix_csv(outdir / "omega.csv", est.omega)
        _write_edges(outdir / "edges.csv", est.omega)
        clean = clean and est.converged
    else:
        method = "clime" if args.method == "clime" else "glasso"
        path = lambda_path(mat, args.path, method=method)
        if args.method == "scad":
            path = [
                adaptive_glasso_lla(mat, est.lam, a=args.a, init=est, n_lla_steps=args.lla_steps)
                for est in path
            ]
        index_lines = ["index,lambda,n_edges"]
        for i, est in enumerate(path):
            write_matrix_csv(outdir / f"omega_{i:03d}.csv", est.omega)
            _write_edges(outdir / f"edges_{i:03d}.csv", est.omega)
            index_lines.append(f"{i},{est.lam:.17g},{len(edge_set(est.omega))}")
            clean = clean and est.converged
        (outdir / "path_index.csv").write_text("\n".join(index_lines) + "\n")
        write_matrix_csv(outdir / "omega.csv", path[-1].omega)
        _write_edges(outdir / "edges.csv", path[-1].omega)
    return EXIT_OK if clean else EXIT_CONVERGENCE


def _cmd_spca(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    if args.corr:
        r = read_matrix_csv(Path(args.corr))
        n_for_lam = args.n
    else:
        data = _load_dataset(Path(args.data), Path(args.types) if args.types else None)
        r = estimate_latent_correlation(data)
        n_for_lam = data.n
    d = r.shape[0]
    lam = args.lam if args.lam is not None else float(np.sqrt(np.log(d) / max(2, n_for_lam or d)))
    est = two_stage_spca(r, args.k, lam)
    write_matrix_csv(outdir / "v.csv", est.v.reshape(-1, 1), prefix="v")
    (outdir / "support.txt").write_text(
        "\n".join(str(i) for i in sorted(est.support)) + "\n"
    )
    return EXIT_OK if est.converged else EXIT_CONVERGENCE


def _cmd_eval(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    if args.what == "graph":
        omega_true = read_matrix_csv(Path(args.truth))
        est = read_matrix_csv(Path(args.est))
        d = omega_true.shape[0]
        fpr, tpr = graph_fpr_tpr(edge_set(est), edge_set(omega_true), d)
        fro, spec, maxnorm = matrix_errors(est, omega_true)
        metrics = {
            "fpr": fpr,
            "tpr": tpr,
            "frobenius": fro,
            "spectral": spec,
            "maxnorm": maxnorm,
        }
    elif args.what == "spca":
        v_true = read_matrix_csv(Path(args.truth)).ravel()
        v_est = read_matrix_csv(Path(args.est)).ravel()
        d = v_true.size
        fpr, tpr = eigvec_fpr_tpr(v_est, v_true, d)
        angle = sin_angle(v_est / np.linalg.norm(v_est), v_true / np.linalg.norm(v_true))
        metrics = {"fpr": fpr, "tpr": tpr, "sin_angle": angle, "sin2_angle": angle**2}
    else:  # roc
        omega_true = read_matrix_csv(Path(args.truth))
        d = omega_true.shape[0]
        path_dir = Path(args.est)
        omegas = sorted(path_dir.glob("omega_*.csv"))
        if not omegas:
            raise SystemExit(f"no omega_*.csv files under {path_dir}")
        curve = roc_curve([read_matrix_csv(p) for p in omegas], edge_set(omega_true), d)
        metrics = {"roc": [[f, t] for f, t in curve]}
    (outdir / "metrics.json").write_text(json.dumps(metrics, indent=2) + "\n")
    return EXIT_OK


def _graph_replicate(truth, scenario, n, seed, methods, n_path):
    """One benchmark replicate: oracle-lambda errors per method."""
    spec = ScenarioSpec(scenario=scenario, n=n, d=truth.d, seed=seed, design=truth.design)
    data = sample_scenario(truth, spec)
    record = {"seed": int(seed), "methods": {}}
    clean = True
    r = None
    if any(m != "naive" for m in methods):
        r = estimate_latent_correlation(data)
    rp = None
    if "lglasso" in methods or "lgscad" in methods:
        projection = project_psd_maxnorm(r)
        rp = projection.matrix
        clean = clean and projection.converged

    paths = {}
    if "lglasso" in methods or "lgscad" in methods:
        paths["lglasso"] = lambda_path(rp, n_path, method="glasso")
    if "lgscad" in methods:
        paths["lgscad"] = [
            adaptive_glasso_lla(rp, est.lam, init=est) for est in paths["lglasso"]
        ]
    if "lclime" in methods:
        paths["lclime"] = lambda_path(r, n_path, method="clime")
    if "naive" in methods:
        paths["naive"] = lambda_path(naive_covariance(data.values), n_path, method="glasso")

    for method in methods:
        path = paths[method]
        clean = clean and all(est.converged for est in path)
        entry = {}
        for norm in ("frobenius", "spectral"):
            lam_star, best = oracle_lambda(path, truth.omega, norm=norm)
            errs = matrix_errors(best, truth.omega)
            entry[norm] = {
                "lambda": lam_star,
                "error": errs[0] if norm == "frobenius" else errs[1],
            }
        record["methods"][method] = entry
    return record, clean


def _spca_replicate(truth, scenario, n, seed, methods, k):
    spec = ScenarioSpec(scenario=scenario, n=n, d=truth.d, seed=seed, design=truth.design)
    data = sample_scenario(truth, spec)
    lam = float(np.sqrt(np.log(truth.d) / n))
    record = {"seed": int(seed), "methods": {}}
    clean = True
    for method in methods:
        mat = (
            estimate_latent_correlation(data)
            if method == "lpca"
            else naive_covariance(data.values)
        )
        est = two_stage_spca(mat, k, lam)
        clean = clean and est.converged
        angle = sin_angle(est.v, truth.v1)
        fpr, tpr = eigvec_fpr_tpr(est, truth.v1, truth.d)
        record["methods"][method] = {
            "sin2_angle": angle**2,
            "fpr": fpr,
            "tpr": tpr,
        }
    return record, clean


def _aggregate(records, methods, metric_paths):
    """mean/sd per method for each named metric path (list of keys)."""
    rows = []
    for method in methods:
        row = {"method": method}
        for name, keys in metric_paths.items():
            vals = []
            for rec in records:
                node = rec["methods"][method]
                for key in keys:
                    node = node[key]
                vals.append(float(node))
            row[f"{name}_mean"] = float(np.mean(vals))
            row[f"{name}_sd"] = float(np.std(vals, ddof=1)) if len(vals) > 1 else None
        rows.append(row)
    return rows


def _write_bench_csv(path: Path, rows) -> None:
    columns = list(rows[0].keys())
    lines = [",".join(columns)]
    for row in rows:
        cells = []
        for col in columns:
            val = row[col]
            if val is None:
                cells.append("")
            elif isinstance(val, float):
                cells.append(f"{val:.6g}")
            else:
                cells.append(str(val))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")


def _cmd_bench(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    valid = SPCA_METHODS if args.task == "spca" else GRAPH_METHODS
    unknown = [m for m in methods if m not in valid]
    if unknown:
        raise SystemExit(f"unknown methods for task {args.task}: {unknown}")

    if args.task == "spca":
        truth = spiked_truth(args.d, seed=args.seed)
    else:
        truth = random_graph_truth(args.d, c1=args.c1, seed=args.seed)
    rep_seeds = np.random.SeedSequence(args.seed).generate_state(args.reps)

    def run(seed):
        if args.task == "spca":
            return _spca_replicate(truth, args.scenario, args.n, seed, methods, args.k)
        return _graph_replicate(truth, args.scenario, args.n, seed, methods, args.path)

    workers = _thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, rep_seeds))
    else:
        results = [run(seed) for seed in rep_seeds]
    records = [rec for rec, _ in results]
    clean = all(ok for _, ok in results)

    if args.task == "spca":
        metric_paths = {"sin2": ["sin2_angle"]}
    else:
        metric_paths = {
            "frobenius": ["frobenius", "error"],
            "spectral": ["spectral", "error"],
        }
    rows = _aggregate(records, methods, metric_paths)
    _write_bench_csv(outdir / "bench.csv", rows)
    with (outdir / "metrics.json").open("w") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    return EXIT_OK if clean else EXIT_CONVERGENCE


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latentgraph",
        description="Latent correlation, graph, and sparse-PCA estimation "
        "for binary/mixed data",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a dataset plus its ground truth")
    p.add_argument("--scenario", required=True, choices=["a", "b", "c", "d"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--design", choices=["random_graph", "spiked"], default="random_graph")
    p.add_argument("--c1", type=float, default=3.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("corr", help="estimate the latent correlation matrix")
    p.add_argument("--data", required=True)
    p.add_argument("--types", help="file with one column type per line")
    p.add_argument("--psd", action="store_true", help="also write the PSD projection")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_corr)

    p = sub.add_parser("graph", help="estimate the latent precision matrix")
    p.add_argument("--corr", required=True, help="R.csv from the corr command")
    p.add_argument("--psd-corr", help="precomputed Rp.csv (glasso/scad input)")
    p.add_argument("--method", choices=["glasso", "clime", "scad"], default="glasso")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--path", type=int, help="number of lambda-path points")
    p.add_argument("--a", type=float, default=3.7)
    p.add_argument("--lla-steps", type=int, default=2)
    p.add_argument("--tau-thresh", type=float, help="CLIME hard threshold")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_graph)

    p = sub.add_parser("spca", help="estimate the sparse leading eigenvector")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--data")
    group.add_argument("--corr")
    p.add_argument("--types")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--n", type=int, help="sample size for the default lambda rule")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_spca)

    p = sub.add_parser("eval", help="compute metrics for saved estimates")
    p.add_argument("what", choices=["graph", "spca", "roc"])
    p.add_argument("--est", required=True, help="estimate file (or path dir for roc)")
    p.add_argument("--truth", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("bench", help="replicate benchmark with mean(sd) table")
    p.add_argument("--task", choices=["graph", "spca"], default="graph")
    p.add_argument("--scenario", required=True, choices=["a", "b", "c", "d"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--methods", default="lglasso,lgscad,naive")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--c1", type=float, default=3.0)
    p.add_argument("--path", type=int, default=25)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
