"""Command-line entry point: ``sgembed <command> ...``."""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .embedding import L1, RAW, embed_dataset, embedding_matrix
from .experiments import PipelineConfig, TAU_GRID, robustness_sweep, write_sweep_csv
from .hashing import PREFERENCE, HashFunction, collision_rate, graph_count_with_edges
from .io import DatasetError, EmbeddingFileError, load_embeddings, load_tu_dataset, save_embeddings
from .iso import OracleBoundError
from .kernels import cross_kernel, gram_matrix, rank_models, retrieval_rho
from .sampler import SamplerConfig, sample_complexity
from .svm import C_GRID, cross_validate

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_GUARD = 4

COLLIDE_MAX_T = 8


class UsageError(Exception):
    pass


class GuardError(Exception):
    pass


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(path: Path, command: str, config: dict, outputs: list[Path]) -> None:
    manifest = {
        "command": command,
        "version": __version__,
        "config": config,
        "outputs": {p.name: _sha256(p) for p in outputs},
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _manifest_path(out: Path) -> Path:
    return out.with_name(out.name + ".manifest.json")


def _emit(rows: list[list], out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(rows)
    else:
        csv.writer(sys.stdout, lineterminator="\n").writerows(rows)


def _sampler_from_args(args) -> tuple[SamplerConfig, dict]:
    have_bounds = args.epsilon is not None or args.delta is not None
    if args.M is not None and have_bounds:
        raise UsageError("--M and --epsilon/--delta are mutually exclusive")
    common = dict(T=args.t_max, alpha=args.alpha, seed=args.seed, label_mismatch_weight=args.label_weight)
    try:
        if args.M is not None:
            cfg = SamplerConfig(M=args.M, **common)
            desc = {"M": args.M}
        else:
            if args.epsilon is None or args.delta is None:
                raise UsageError("give either --M or both --epsilon and --delta")
            cfg = SamplerConfig.from_bounds(epsilon=args.epsilon, delta=args.delta, **common)
            desc = {"epsilon": args.epsilon, "delta": args.delta, "M": cfg.M}
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    desc.update(T=cfg.T, alpha=cfg.alpha, seed=cfg.seed, label_mismatch_weight=cfg.label_mismatch_weight)
    return cfg, desc


def _load_dataset(args):
    path = Path(args.dataset)
    name = args.name or path.name
    return load_tu_dataset(path, name)


def cmd_sample_size(args) -> int:
    if args.a is not None and args.t is not None:
        raise UsageError("--a and --t are mutually exclusive")
    if args.a is None and args.t is None:
        raise UsageError("one of --a or --t is required")
    try:
        a = args.a if args.a is not None else graph_count_with_edges(args.t)
        print(sample_complexity(a, args.epsilon, args.delta))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return EXIT_OK


def cmd_collide(args) -> int:
    if args.t_max < 1:
        raise UsageError("--t-max must be at least 1")
    if args.t_max > COLLIDE_MAX_T:
        raise GuardError(f"--t-max {args.t_max} exceeds the enumeration bound {COLLIDE_MAX_T}")
    fs = list(PREFERENCE) if args.hash == "all" else [HashFunction.parse(args.hash)]
    rows: list[list] = [["t", "hash", "a", "pairs", "collisions", "rate"]]
    for t in range(1, args.t_max + 1):
        for f in fs:
            s = collision_rate(t, f)
            rows.append([t, f.value, graph_count_with_edges(t), s.pairs, s.collisions, f"{s.rate:.4f}"])
    _emit(rows, args.out)
    return EXIT_OK


def cmd_embed(args) -> int:
    cfg, desc = _sampler_from_args(args)
    f = HashFunction.parse(args.hash)
    ds = _load_dataset(args)
    start = time.perf_counter()
    embs, vocab = embed_dataset(ds.graphs, cfg, f, args.labels, args.jobs)
    elapsed = time.perf_counter() - start
    print(
        f"embedded {len(ds)} graphs in {elapsed:.2f}s ({elapsed / max(len(ds), 1):.4f}s per graph), "
        f"{len(vocab)} codes",
        file=sys.stderr,
    )
    out = Path(args.out)
    save_embeddings(embs, vocab, out, ds.class_labels, ds.name)
    config = {"dataset": ds.name, "hash_function": f.value, "use_labels": args.labels, **desc}
    write_manifest(_manifest_path(out), "embed", config, [out])
    return EXIT_OK


def _orders(text: str | None):
    return None if not text else [int(x) for x in text.split(",")]


def cmd_cv(args) -> int:
    embs, _, classes, header = load_embeddings(args.embeddings)
    if any(c is None for c in classes):
        raise UsageError("embedding file lacks class labels")
    X = embedding_matrix(embs, _orders(args.orders), args.normalization)
    K = gram_matrix(X, args.kernel)
    res = cross_validate(K, classes, args.folds, args.C_grid, args.seed)
    rows = [["fold", "accuracy", "C"]]
    rows += [[k, f"{a:.6f}", f"{c:g}"] for k, (a, c) in enumerate(zip(res.fold_accuracies, res.chosen_C))]
    rows.append(["mean", f"{res.mean:.6f}", ""])
    rows.append(["std", f"{res.std:.6f}", ""])
    _emit(rows, args.out)
    print(f"{header.get('dataset') or args.embeddings}: accuracy {res}", file=sys.stderr)
    if args.out:
        config = {
            "embeddings": Path(args.embeddings).name,
            "embeddings_sha256": _sha256(Path(args.embeddings)),
            "kernel": args.kernel,
            "normalization": args.normalization,
            "orders": _orders(args.orders),
            "folds": args.folds,
            "C_grid": list(args.C_grid),
            "seed": args.seed,
        }
        write_manifest(_manifest_path(Path(args.out)), "cv", config, [Path(args.out)])
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg, desc = _sampler_from_args(args)
    ds = _load_dataset(args)
    pipe = PipelineConfig(
        cfg, HashFunction.parse(args.hash), args.labels, _orders(args.orders), args.normalization,
        args.kernel, args.folds, tuple(args.C_grid), args.cv_seed, args.jobs,
    )
    start = time.perf_counter()
    rows = robustness_sweep(ds, args.tau, pipe, args.perturb_seed)
    print(f"sweep over {len(rows)} ratios took {time.perf_counter() - start:.1f}s", file=sys.stderr)
    out = Path(args.out)
    write_sweep_csv(rows, out)
    config = {
        "dataset": ds.name, "hash_function": pipe.hash_function.value, "use_labels": args.labels,
        "tau": list(args.tau), "perturb_seed": args.perturb_seed, "kernel": args.kernel,
        "normalization": args.normalization, "orders": _orders(args.orders), "folds": args.folds,
        "C_grid": list(args.C_grid), "cv_seed": args.cv_seed, **desc,
    }
    write_manifest(_manifest_path(out), "sweep", config, [out])
    return EXIT_OK


def _read_rankings(path: str) -> dict[str, list[str]]:
    out = {}
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if row:
                out[row[0]] = row[1:]
    return out


def cmd_rho(args) -> int:
    rows: list[list] = [["query", "rho"]]
    if args.rankings or args.truth:
        if not (args.rankings and args.truth):
            raise UsageError("--rankings and --truth go together")
        ranked, truth = _read_rankings(args.rankings), _read_rankings(args.truth)
        if set(ranked) != set(truth):
            raise UsageError("ranking files list different queries")
        scores = [retrieval_rho(ranked[q], truth[q]) for q in ranked]
        rows += [[q, f"{s:.6f}"] for q, s in zip(ranked, scores)]
    elif args.query_embeddings and args.model_embeddings:
        q_embs, q_vocab, q_cls, _ = load_embeddings(args.query_embeddings)
        m_embs, m_vocab, m_cls, _ = load_embeddings(args.model_embeddings)
        if q_vocab.codes != m_vocab.codes:
            raise UsageError("query and model embeddings use different vocabularies")
        Q = embedding_matrix(q_embs, _orders(args.orders), args.normalization)
        Mx = embedding_matrix(m_embs, _orders(args.orders), args.normalization)
        scores = []
        for k, (q, c) in enumerate(zip(Q, q_cls)):
            ranked = rank_models(q, Mx, kernel=args.kernel)
            # truth: models of the query's class first, then the rest, each in file order
            truth = sorted(range(len(Mx)), key=lambda i: (m_cls[i] != c, i))
            s = retrieval_rho(ranked, truth)
            scores.append(s)
            rows.append([k, f"{s:.6f}"])
    else:
        raise UsageError("give --query-embeddings/--model-embeddings or --rankings/--truth")
    rows.append(["mean", f"{float(np.mean(scores)) if scores else 0.0:.6f}"])
    _emit(rows, args.out)
    return EXIT_OK


def _add_sampler_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", required=True, help="directory holding TU-format files")
    p.add_argument("--name", help="file prefix inside --dataset (default: directory name)")
    p.add_argument("--t-max", type=int, default=6)
    p.add_argument("--M", type=int, help="runs per graph")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--hash", default="betweenness")
    p.add_argument("--labels", action="store_true", help="append node and edge label multisets to codes")
    p.add_argument("--label-weight", type=float, default=1.0, help="walk weight for label-mismatched steps")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)


def _add_eval_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kernel", choices=["hi", "cosine"], default="hi")
    p.add_argument("--normalization", choices=[L1, RAW], default=L1)
    p.add_argument("--orders", help="comma-separated orders to combine (default: all)")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--C-grid", type=float, nargs="+", default=list(C_GRID))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sgembed", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample-size", help="runs needed for an (epsilon, delta) guarantee")
    p.add_argument("--a", type=int, help="number of graph classes")
    p.add_argument("--t", type=int, help="graphlet order; looks up the class count")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.set_defaults(func=cmd_sample_size)

    p = sub.add_parser("collide", help="collision table of the hash functions")
    p.add_argument("--t-max", type=int, default=7)
    p.add_argument("--hash", default="all")
    p.add_argument("--out")
    p.set_defaults(func=cmd_collide)

    p = sub.add_parser("embed", help="embed a dataset and write a JSON-lines file")
    _add_sampler_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("cv", help="cross-validated accuracy of stored embeddings")
    p.add_argument("--embeddings", required=True)
    _add_eval_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("sweep", help="accuracy under edge deletion and insertion")
    _add_sampler_args(p)
    _add_eval_args(p)
    p.add_argument("--tau", type=float, nargs="+", default=list(TAU_GRID))
    p.add_argument("--perturb-seed", type=int, default=0)
    p.add_argument("--cv-seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("rho", help="retrieval score between rankings")
    p.add_argument("--query-embeddings")
    p.add_argument("--model-embeddings")
    p.add_argument("--rankings", help="CSV: query id, then model ids best first")
    p.add_argument("--truth", help="CSV in the same layout holding ground-truth rankings")
    p.add_argument("--kernel", choices=["hi", "cosine"], default="cosine")
    p.add_argument("--normalization", choices=[L1, RAW], default=L1)
    p.add_argument("--orders")
    p.add_argument("--out")
    p.set_defaults(func=cmd_rho)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sgembed: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, DatasetError, EmbeddingFileError) as exc:
        print(f"sgembed: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (GuardError, OracleBoundError) as exc:
        print(f"sgembed: limit exceeded: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except ValueError as exc:
        print(f"sgembed: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
