"""kecd command line: detect, centrality, generate, sweep, bench.

Exit codes: 0 success, 1 runtime or solver failure, 2 input or config error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from scipy.stats import spearmanr

from . import config as config_mod
from .centrality import (
    eigenvector_centrality,
    katz_centrality,
    ke_points,
    normalize,
    spectral_radius,
)
from .cluster import assign_clusters, find_minima, prune_empty_sectors, sweep_cost
from .errors import ConvergenceError, DivergenceError, DomainError
from .graph import format_edge_list, read_edge_list, write_identifier_table
from .louvain import bench, bench_json
from .netgen import adhoc_modular, density_ratio
from .quality import score, sweep_experiment, write_sweep_csv

logger = logging.getLogger("kecd")

EXIT_OK, EXIT_RUNTIME, EXIT_INPUT = 0, 1, 2


class StageError(Exception):
    def __init__(self, stage, exc):
        self.stage = stage
        self.exc = exc
        super().__init__(f"{stage}: {exc}")

    @property
    def exit_code(self):
        return EXIT_INPUT if isinstance(self.exc, (DomainError, OSError)) else EXIT_RUNTIME


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except Exception as exc:
        raise StageError(name, exc) from exc


def _write(path: Path, writer) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer(fh)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _load_graph(path, cfg):
    return _stage("load", read_edge_list, path, weighted=cfg.weighted)


def _out_dir(cfg, path, multi) -> Path:
    out = Path(cfg.output_dir)
    if multi:
        out = out / Path(path).stem
    out.mkdir(parents=True, exist_ok=True)
    return out


def _require_inputs(cfg):
    if not cfg.input:
        raise DomainError("no input edge list given")


# ---- detect ---------------------------------------------------------------

def _detect_one(cfg, path, out: Path) -> None:
    written: list[str] = []
    manifest = {"command": "detect", "input": str(path), "complete": False,
                "stage": "load", "files": written, "error": None}

    def emit(name, writer):
        _write(out / name, writer)
        written.append(name)

    try:
        g = _load_graph(path, cfg)
        emit("identifiers.csv", lambda fh: write_identifier_table(g, fh))
        manifest["stage"] = "centrality"
        if g.m == 0:
            raise StageError("centrality", DomainError("graph has no edges"))
        plot = _stage("centrality", ke_points, g, cfg.katz(), cfg.tol, cfg.max_iter, cfg.per_component)
        emit("ke_plot.csv", plot.write_csv)
        manifest["stage"] = "sweep"
        cp = cfg.cluster()
        profile = _stage("sweep", sweep_cost, plot, cp)
        emit("sweep_profile.csv", profile.write_csv)
        manifest["stage"] = "cluster"
        boundaries = _stage("cluster", lambda: prune_empty_sectors(plot, find_minima(profile, cp), profile))
        part = _stage("cluster", assign_clusters, plot, boundaries)
        emit("partition.json", lambda fh: fh.write(_json(
            {"k": part.k, "boundaries_deg": boundaries, "labels": part.labels.tolist()})))
        manifest["stage"] = "score"
        report = _stage("score", score, g, part)
        emit("modularity.json", lambda fh: fh.write(_json(report.as_dict())))
        manifest["stage"] = "done"
        manifest["complete"] = True
        print(f"{path}: n={g.n} m={g.m} k={part.k} q={report.q:.4f} "
              f"q/q_max={report.q_normalized if report.q_normalized is None else round(report.q_normalized, 4)}")
    except StageError as exc:
        manifest["error"] = f"{exc.stage}: {exc.exc}"
        raise
    finally:
        _write(out / "MANIFEST.json", lambda fh: fh.write(_json(manifest)))


def cmd_detect(cfg) -> int:
    _require_inputs(cfg)
    multi = len(cfg.input) > 1
    for path in cfg.input:
        _detect_one(cfg, path, _out_dir(cfg, path, multi))
    return EXIT_OK


# ---- centrality -----------------------------------------------------------

def cmd_centrality(cfg) -> int:
    _require_inputs(cfg)
    multi = len(cfg.input) > 1
    for path in cfg.input:
        out = _out_dir(cfg, path, multi)
        g = _load_graph(path, cfg)
        if g.m == 0:
            raise StageError("centrality", DomainError("graph has no edges"))
        lam = _stage("spectral radius", spectral_radius, g, cfg.tol, cfg.max_iter)
        kp = cfg.katz()
        alpha = kp.resolve_alpha(lam)
        if alpha * lam >= 1.0:
            print(f"refusing alpha={alpha:g}: estimated lambda_1={lam:.10g}, "
                  f"alpha must be below {1.0 / lam:.10g}", file=sys.stderr)
            raise StageError("katz", DivergenceError(alpha, lam))
        evc = _stage("eigenvector", eigenvector_centrality, g, cfg.tol, cfg.max_iter, cfg.per_component)
        katz = _stage("katz", katz_centrality, g, kp, cfg.tol, cfg.max_iter, lam)
        evc_n, katz_n = normalize(evc), normalize(katz)

        def writer(fh):
            fh.write("node,evc,katz,evc_normalized,katz_normalized\n")
            cols = zip(evc.values.tolist(), katz.values.tolist(), evc_n.values.tolist(), katz_n.values.tolist())
            for i, row in enumerate(cols):
                fh.write(f"{i}," + ",".join(repr(v) for v in row) + "\n")

        _write(out / "centrality.csv", writer)
        _write(out / "identifiers.csv", lambda fh: write_identifier_table(g, fh))
        print(f"{path}: lambda_1={lam:.6g} alpha={katz.alpha:.6g} "
              f"evc iterations={evc.iterations_used} katz iterations={katz.iterations_used}")
    return EXIT_OK


# ---- generate -------------------------------------------------------------

def cmd_generate(cfg) -> int:
    spec = _stage("generate", cfg.adhoc)
    lg = _stage("generate", adhoc_modular, spec)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    g = lg.graph
    _write(out / "edges.txt", lambda fh: fh.write(format_edge_list(g)))

    def truth_writer(fh):
        fh.write("node,truth_community\n")
        for i, c in enumerate(lg.truth.labels.tolist()):
            fh.write(f"{g.ids[i]},{c}\n")

    _write(out / "truth.csv", truth_writer)
    report = score(g, lg.truth) if g.m else None
    try:
        ratio = density_ratio(lg)
    except DomainError:
        ratio = None
    sidecar = {
        "spec": {"model": spec.model, "n1": spec.n1, "n2": spec.n2, "param1": spec.param1,
                 "param2": spec.param2, "mu": spec.mu, "seed": spec.seed},
        "n": g.n,
        "m": g.m,
        "rho1": lg.rho1,
        "rho2": lg.rho2,
        "density_ratio": ratio,
        "q_truth": report.q if report else None,
        "q_max_truth": report.q_max if report else None,
        "q_normalized_truth": report.q_normalized if report else None,
    }
    _write(out / "generate.json", lambda fh: fh.write(_json(sidecar)))
    print(f"generated n={g.n} m={g.m} into {out}")
    return EXIT_OK


# ---- sweep ----------------------------------------------------------------

def cmd_sweep(cfg) -> int:
    grid = [(tuple(p), mu) for p in cfg.grid_params for mu in cfg.grid_mu]
    rows = _stage("sweep", sweep_experiment, cfg.model, grid, cfg.n1, cfg.n2, cfg.seeds,
                  cfg.katz(), cfg.tol, cfg.max_iter, cfg.workers)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write(out / "sweep.csv", lambda fh: write_sweep_csv(rows, fh, with_errors=True))
    succeeded = sum(1 for r in rows if not r.errors)
    print(f"{succeeded}/{len(rows)} cells succeeded")
    if cfg.spearman:
        good = [r for r in rows if r.seeds]
        rho = spearmanr([r.q_mean for r in good], [r.theta_mean for r in good])[0] if len(good) > 2 else float("nan")
        print(f"spearman(q_truth, theta) = {rho:.4f}")
    return EXIT_OK if succeeded >= 0.8 * len(rows) else EXIT_RUNTIME


# ---- bench ----------------------------------------------------------------

def cmd_bench(cfg) -> int:
    _require_inputs(cfg)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    status = EXIT_OK
    for path in cfg.input:
        g = _load_graph(path, cfg)
        results = bench(g, cfg.katz(), cfg.cluster(), cfg.tol, cfg.seed, cfg.max_iter, cfg.per_component)
        _write(out / f"bench_{Path(path).stem}.json", lambda fh: fh.write(bench_json(g, results)))
        if cfg.table:
            print(f"{path} (n={g.n}, m={g.m})")
            print(f"  {'method':8s} {'seconds':>10s} {'q':>8s} {'q_max':>8s} {'k':>5s}")
            for r in results:
                if r.error:
                    print(f"  {r.method:8s} failed: {r.error}")
                else:
                    print(f"  {r.method:8s} {r.wall_time:10.4f} {r.report.q:8.4f} {r.report.q_max:8.4f} {r.k:5d}")
        if all(r.error for r in results):
            for r in results:
                print(f"{path}: {r.method} failed: {r.error}", file=sys.stderr)
            status = EXIT_RUNTIME
    return status


COMMANDS = {
    "detect": cmd_detect,
    "centrality": cmd_centrality,
    "generate": cmd_generate,
    "sweep": cmd_sweep,
    "bench": cmd_bench,
}


def _pair(text):
    a, b = text.split(":")
    return [float(a), float(b)]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--dump-config", action="store_true", help="print the resolved config and exit")
    common.add_argument("-o", "--output-dir", dest="output_dir")
    common.add_argument("--alpha", type=float)
    common.add_argument("--alpha-fraction", dest="alpha_fraction", type=float)
    common.add_argument("--beta", type=float)
    common.add_argument("--tol", type=float)
    common.add_argument("--max-iter", dest="max_iter", type=int)
    common.add_argument("--w", "--d", dest="w", type=float, help="orthogonal-distance window")
    common.add_argument("--phi-step", dest="phi_step", type=float)
    common.add_argument("--smooth-window", dest="smooth_window", type=int)
    common.add_argument("--prominence", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--weighted", dest="weighted", action="store_const", const=True)
    common.add_argument("--unweighted", dest="weighted", action="store_const", const=False)
    common.add_argument("--per-component", dest="per_component", action="store_const", const=True)
    common.add_argument("--global-component", dest="per_component", action="store_const", const=False)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="kecd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("detect", "centrality", "bench"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("input", nargs="*")
        if name == "bench":
            p.add_argument("--table", action="store_const", const=True)
    for name in ("generate", "sweep"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--model", choices=["ER", "BA"])
        p.add_argument("--n1", type=int)
        p.add_argument("--n2", type=int)
        if name == "generate":
            p.add_argument("--param1", type=float)
            p.add_argument("--param2", type=float)
            p.add_argument("--mu", type=int)
        else:
            p.add_argument("--grid-params", dest="grid_params", type=lambda s: [_pair(t) for t in s.split(",")],
                           help="comma-separated param1:param2 pairs, e.g. 2:8,4:8")
            p.add_argument("--grid-mu", dest="grid_mu", type=lambda s: [int(t) for t in s.split(",")])
            p.add_argument("--seeds", type=int)
            p.add_argument("--workers", type=int)
            p.add_argument("--spearman", action="store_const", const=True)
    return parser


_NOT_CONFIG = {"command", "config", "dump_config", "verbose"}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {k: v for k, v in vars(args).items()
                 if k not in _NOT_CONFIG and v is not None and not (k == "input" and not v)}
    if overrides.get("param1") is not None and float(overrides["param1"]).is_integer():
        overrides["param1"] = int(overrides["param1"])
    if overrides.get("param2") is not None and float(overrides["param2"]).is_integer():
        overrides["param2"] = int(overrides["param2"])
    try:
        cfg = config_mod.load(args.config, overrides)
    except DomainError as exc:
        print(f"kecd {args.command}: config error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.dump_config:
        sys.stdout.write(cfg.to_json())
        return EXIT_OK
    try:
        return COMMANDS[args.command](cfg)
    except StageError as exc:
        print(f"kecd {args.command}: {exc.stage} failed: {exc.exc}", file=sys.stderr)
        if isinstance(exc.exc, ConvergenceError) and exc.exc.residual is not None:
            print(f"  last residual {exc.exc.residual:.3g}", file=sys.stderr)
        return exc.exit_code
    except DomainError as exc:
        print(f"kecd {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
