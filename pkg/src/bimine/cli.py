"""Command-line front end: ``bimine <command> [flags]``.

Exit status is 0 on success, 2 on bad flags and 1 on any data error, with
a single-line diagnostic on stderr. Every output file is written to a
temporary sibling and renamed into place.
"""

from __future__ import annotations

import argparse
import csv
import gc
import io
import logging
import os
import sys
import tempfile
import time
from collections.abc import Callable, Sequence
from pathlib import Path

import numpy as np

from .basket import ConsistencyError, EmptyGraphError, Mode
from .detector import detect
from .graph import BipartiteGraph, IngestError, UnknownNodeError, read_edge_list, write_edge_list
from .metrics import LabeledRanking, auc, best_f1
from .mhibp import solve_mhibp
from .sforest import TreeParams, build_forest, forest_scores, read_kdataset
from .synth import CamKind, InjectionSpec, SpecError, add_camouflage, gen_background, inject_group

log = logging.getLogger("bimine")

BENCH_REPS = 3
DATA_ERRORS = (
    IngestError,
    UnknownNodeError,
    EmptyGraphError,
    ConsistencyError,
    SpecError,
    OSError,
    ValueError,
)


class UsageError(Exception):
    pass


# -- output helpers ----------------------------------------------------------


def write_atomic(path: str | Path, text: str) -> None:
    """Write ``text`` next to ``path`` and rename it over the target."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def emit(out: str | None, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        write_atomic(out, text)


def parse_fractions(spec: str) -> list[float]:
    """``"0.1..1.0"`` (tenths), ``"a..b:step"`` or a comma list."""
    try:
        if ".." in spec:
            lo_s, rest = spec.split("..", 1)
            hi_s, _, step_s = rest.partition(":")
            lo, hi = float(lo_s), float(hi_s)
            step = float(step_s) if step_s else 0.1
            if step <= 0 or lo > hi:
                raise ValueError
            n = int(round((hi - lo) / step))
            fracs = [round(lo + i * step, 10) for i in range(n + 1)]
        else:
            fracs = [float(x) for x in spec.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad --fractions {spec!r}") from None
    if not fracs or any(not 0.0 < f <= 1.0 for f in fracs):
        raise UsageError("fractions must lie in (0, 1]")
    return fracs


def read_labels(path: str | Path) -> dict[str, int]:
    """Two-column TSV ``label<TAB>0|1``; ``#`` lines are skipped."""
    out: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or parts[1] not in ("0", "1"):
                raise IngestError(f"{path}:{lineno}: expected 'label<TAB>0|1'")
            out[parts[0]] = int(parts[1])
    return out


def read_ranking(path: str | Path) -> dict[str, float]:
    out: dict[str, float] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise IngestError(f"{path}:{lineno}: expected 'label<TAB>score'")
            try:
                out[parts[0]] = float(parts[1])
            except ValueError:
                raise IngestError(f"{path}:{lineno}: bad score {parts[1]!r}") from None
    return out


def _require(args: argparse.Namespace, *names: str) -> None:
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"{args.command} requires --{name.replace('_', '-')}")


def _check_inputs(args: argparse.Namespace, *names: str) -> None:
    for name in names:
        p = getattr(args, name, None)
        if p is not None and not Path(p).is_file():
            raise IngestError(f"no such file: {p}")


# -- commands ----------------------------------------------------------------


def cmd_solve_mhibp(args: argparse.Namespace) -> None:
    _require(args, "edges")
    g = read_edge_list(args.edges)
    log.info("graph: %d sources, %d targets, %d edges", g.n_sources, g.n_targets, g.n_edges)
    result = solve_mhibp(g, args.mode, args.c)
    log.info("%d maximal half-isolated bicliques", len(result))
    emit(args.out, result.to_jsonl(g))


def cmd_detect(args: argparse.Namespace) -> None:
    _require(args, "edges")
    g = read_edge_list(args.edges)
    ranking = detect(g, args.mode, args.c, args.thickness, args.depth)
    emit(args.out, ranking.to_tsv())


def cmd_forest(args: argparse.Namespace) -> None:
    _require(args, "kdata")
    modes_path = args.modes or str(Path(args.kdata).with_suffix(".modes.json"))
    if not Path(modes_path).is_file():
        raise IngestError(f"no such mode sidecar: {modes_path}")
    data = read_kdataset(args.kdata, modes_path)
    forest = build_forest(data, args.c)
    params = None
    if args.thickness is not None or args.depth is not None:
        params = [TreeParams(args.thickness, args.depth)] * data.k
    emit(args.out, forest_scores(forest, params).to_tsv())


def cmd_inject(args: argparse.Namespace) -> None:
    _require(args, "seed", "n_fraud", "lam", "out")
    if args.edges is not None:
        base = read_edge_list(args.edges)
    elif args.background is not None:
        try:
            dims, p = args.background.split(":")
            ns, nt = (int(x) for x in dims.lower().split("x"))
            prob = float(p)
        except ValueError:
            raise UsageError("--background takes NSxNT:PROB, e.g. 2000x500:0.02") from None
        base = gen_background(ns, nt, prob, args.seed)
    else:
        raise UsageError("inject requires --edges or --background")
    spec = InjectionSpec(
        args.n_fraud, args.lam, args.rho, args.theta, CamKind(args.cam), args.seed + 1
    )
    lg = inject_group(base, spec)
    lg = add_camouflage(lg, spec.cam_kind, spec.theta, seed=args.seed + 2)
    buf = io.StringIO()
    write_edge_list(lg.graph, buf)
    labels_out = args.labels or str(Path(args.out).with_suffix(".labels.tsv"))
    y = lg.source_labels01().tolist()
    labels = "".join(f"{lab}\t{v}\n" for lab, v in zip(lg.graph.source_labels, y))
    write_atomic(args.out, buf.getvalue())
    write_atomic(labels_out, labels)
    log.info("wrote %s and %s", args.out, labels_out)


def cmd_eval(args: argparse.Namespace) -> None:
    _require(args, "ranking", "labels")
    scores = read_ranking(args.ranking)
    labels = read_labels(args.labels)
    missing = [k for k in labels if k not in scores]
    if missing:
        # unranked sources never reached a selected node
        log.info("%d labelled sources absent from ranking; scored 0", len(missing))
    keys = sorted(labels)
    lr = LabeledRanking([scores.get(k, 0.0) for k in keys], [labels[k] for k in keys])
    lines = []
    if lr.n_pos and lr.n_neg:
        lines.append(f"auc\t{auc(lr)!r}\n")
    if lr.n_pos:
        lines.append(f"best_f1\t{best_f1(lr)!r}\n")
    if not lines:
        raise IngestError("labels contain no positives")
    emit(args.out, "".join(lines))


def _subsample(g: BipartiteGraph, k: int, perm: np.ndarray) -> BipartiteGraph:
    idx = np.sort(perm[:k])
    return BipartiteGraph.from_arrays(
        g.n_sources, g.n_targets, g.edge_src[idx], g.edge_tgt[idx],
        g.source_labels, g.target_labels,
    )


def time_min(fn: Callable[[], object], reps: int = BENCH_REPS) -> float:
    """Minimum wall-clock seconds over ``reps`` calls, collector paused."""
    best = float("inf")
    for _ in range(reps):
        gc.collect()
        gc.disable()
        try:
            t0 = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t0)
        finally:
            gc.enable()
    return best


def bench_rows(
    g: BipartiteGraph, fractions: Sequence[float], mode: Mode | str, c: float, seed: int,
    reps: int = BENCH_REPS,
) -> list[tuple[int, float]]:
    """``(edge_count, seconds)`` for build+detect on random edge subsamples."""
    perm = np.random.default_rng(seed).permutation(g.n_edges)
    rows = []
    for frac in fractions:
        sub = _subsample(g, int(frac * g.n_edges), perm)
        secs = time_min(lambda: detect(sub, mode, c), reps)
        log.info("fraction %.3g: %d edges, %.1f ms", frac, sub.n_edges, secs * 1e3)
        rows.append((sub.n_edges, secs))
    return rows


def cmd_bench(args: argparse.Namespace) -> None:
    _require(args, "edges", "seed")
    if args.reps < BENCH_REPS:
        raise UsageError(f"--reps must be at least {BENCH_REPS}")
    g = read_edge_list(args.edges)
    rows = bench_rows(g, parse_fractions(args.fractions), args.mode, args.c, args.seed, args.reps)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["edge_count", "build_ms"])
    for k, secs in rows:
        w.writerow([k, f"{secs * 1e3:.3f}"])
    emit(args.out, buf.getvalue())


COMMANDS = {
    "solve-mhibp": cmd_solve_mhibp,
    "detect": cmd_detect,
    "forest": cmd_forest,
    "inject": cmd_inject,
    "eval": cmd_eval,
    "bench": cmd_bench,
}


# -- parsing -----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bimine", description="Suspiciousness trees over bipartite graphs.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--edges", help="edge list TSV: source<TAB>target")
    p.add_argument("--kdata", help="1+K CSV with a header row; first column is the id")
    p.add_argument("--modes", help="JSON object of column -> aobg|arbg (default: KDATA.modes.json)")
    p.add_argument("--labels", help="labels TSV: source<TAB>0|1 (inject: output path)")
    p.add_argument("--ranking", help="ranking TSV as written by detect/forest")
    p.add_argument("--mode", type=Mode.parse, default=Mode.AOBG, help="aobg (default) or arbg")
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--thickness", type=float)
    p.add_argument("--depth", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--fractions", default="0.1..1.0")
    p.add_argument("--reps", type=int, default=BENCH_REPS)
    p.add_argument("--background", help="inject: generate NSxNT:PROB instead of --edges")
    p.add_argument("--n-fraud", dest="n_fraud", type=int)
    p.add_argument("--lam", type=int)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--theta", type=int, default=0)
    p.add_argument("--cam", choices=[k.value for k in CamKind], default="none")
    return p


def _setup_logging() -> None:
    level = os.environ.get("BM_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("bimine: %(levelname)s: %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(levels.get(level, logging.ERROR))
    log.propagate = False


def main(argv: Sequence[str] | None = None) -> int:
    _setup_logging()
    try:
        args = build_parser().parse_args(argv)
        _check_inputs(args, "edges", "kdata", "ranking")
        if args.command == "eval":
            _check_inputs(args, "labels")
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"bimine: usage error: {exc}", file=sys.stderr)
        return 2
    except DATA_ERRORS as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"bimine: error: {msg}", file=sys.stderr)
        log.debug("traceback", exc_info=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
