"""designwalk command line: gen, spectrum, design, walk, sample, sweep."""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from loguru import logger

from artifacts import read_permutation, read_vertex_weights, write_csv, write_json, write_text
from design import (
    DesignMeasure,
    decay_base,
    design_from_sign_pattern,
    orthogonality_depth,
    solve_design,
    verify_design,
)
from design_reduce import basic_signed_solution
from graph_core import Graph, emit_edge_list, load_edge_list
from graph_generators import FAMILIES, generate
from run_settings import load_settings
from sampling import (
    BATCH_COLUMNS,
    FUNCTION_KINDS,
    make_test_function,
    sample_batch,
    tailored_design_for,
)
from spectral import OperatorKind, OrderingPolicy, SpectralBasis, decompose, spectral_gap_report
from walk import TRACE_COLUMNS, BoundReport, verify_baseline, verify_theorem1

COMMANDS: tuple[str, ...] = ("gen", "spectrum", "design", "walk", "sample", "sweep")
METHOD_ALIASES = {"reduce": "reduce_uniform", "lp": "lp_vertex", "sign": "sign_pattern"}
SWEEP_COLUMNS: tuple[str, ...] = (
    "ell",
    "support_size",
    "base",
    "fitted_rate",
    "effective_depth",
    "bound_satisfied",
)

_ROOT = Path(__file__).resolve().parent
LOG_PATH = _ROOT / "designwalk.log"

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_ERROR = 2


class ConfigError(ValueError):
    """Inconsistent command-line configuration."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    graph_path: Path | None = None
    family: str | None = None
    family_params: dict[str, Any] = field(default_factory=dict)
    operator: OperatorKind = OperatorKind.WALK_MATRIX
    order: str = "abs"
    ell: int | None = None
    method: str = "reduce_uniform"
    steps: int = 50
    seed: int = 0
    out_dir: Path = Path("designwalk_out")
    mu0: str | None = None
    functions: int = 100
    function_kind: str = "random"
    band: int | None = None
    frequencies: tuple[int, ...] = ()
    jobs: int = 1
    settings: dict[str, Any] = field(default_factory=dict)

    @property
    def tol(self) -> float:
        return float(self.settings.get("verification_tol", 1e-9))

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if (self.graph_path is None) == (self.family is None):
            raise ConfigError("give exactly one of --graph or --family")
        if self.command in ("design", "sample") and self.ell is None and not self.frequencies:
            raise ConfigError(f"{self.command} requires --ell")
        if self.command == "walk":
            if self.mu0 in (None, "design") and self.ell is None and not self.frequencies:
                raise ConfigError("walk requires --ell (design start) or an explicit --mu0")
            if self.operator is not OperatorKind.WALK_MATRIX:
                raise ConfigError("walk requires --operator walk")
        if self.steps < 0:
            raise ConfigError(f"--steps must be nonnegative, got {self.steps}")
        if self.jobs < 1:
            raise ConfigError(f"--jobs must be positive, got {self.jobs}")


class _Parser(argparse.ArgumentParser):
    """Usage errors surface as ConfigError so they get the one-line diagnostic."""

    def error(self, message: str):  # type: ignore[override]
        raise ConfigError(message)


def _parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = _Parser(
        prog="designwalk",
        description="Graphical designs, random-walk mixing bounds, and graph quadrature.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--graph", type=Path, help="Edge-list file ('i j' per line).")
    parser.add_argument("--family", choices=FAMILIES, help="Named graph family.")
    parser.add_argument("--n", type=int, help="Vertex count (cycle, complete, circulant, ...).")
    parser.add_argument("--m", type=int, help="Part size for complete_bipartite.")
    parser.add_argument("--dim", type=int, help="Hypercube dimension.")
    parser.add_argument("--degree", type=int, help="Degree for random_regular.")
    parser.add_argument("--offsets", help="Circulant offsets, e.g. 1,2.")
    parser.add_argument("--operator", default="walk", help="walk (default) or laplacian.")
    parser.add_argument("--order", default="abs", help="abs (default) or custom:<perm-file>.")
    parser.add_argument("--ell", type=int, help="Design depth (1..n-1).")
    parser.add_argument(
        "--method", default="reduce", choices=sorted(METHOD_ALIASES), help="Design construction."
    )
    parser.add_argument("--steps", type=int, help="Walk steps K (default 50).")
    parser.add_argument("--seed", type=int, help="Seed for random graphs and test functions.")
    parser.add_argument(
        "--out",
        type=Path,
        default=Path(os.getenv("DESIGNWALK_OUT", "designwalk_out")),
        help="Output directory (default designwalk_out, or DESIGNWALK_OUT env).",
    )
    parser.add_argument(
        "--log",
        type=Path,
        default=Path(os.getenv("DESIGNWALK_LOG", str(LOG_PATH))),
        help="Log file (default designwalk.log next to Main.py, or DESIGNWALK_LOG env).",
    )
    parser.add_argument(
        "--mu0", help="dirac:<v> | uniform | file:<csv> | set:<v1,v2,...> | design."
    )
    parser.add_argument("--functions", type=int, help="Test functions for sample (default 100).")
    parser.add_argument("--kind", default="random", choices=FUNCTION_KINDS, help="Test functions.")
    parser.add_argument("--band", type=int, help="Band index L for low_pass / high_pass.")
    parser.add_argument("--frequencies", help="Tailor the design to these positions, e.g. 6,7,8.")
    parser.add_argument("--jobs", type=int, default=1, help="Worker threads for sweep / sample.")
    parser.add_argument("--settings", type=Path, help="JSON settings file overriding defaults.")
    parser.add_argument("--verbose", action="store_true", help="Also log to stderr.")
    return parser.parse_args(argv)


def _int_list(raw: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in raw.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"expected a comma-separated list of integers, got {raw!r}") from None


def config_from_args(args: argparse.Namespace) -> RunConfig:
    settings = load_settings(args.settings)
    params = {
        key: value
        for key, value in (
            ("n", args.n),
            ("m", args.m),
            ("dim", args.dim),
            ("degree", args.degree),
            ("offsets", args.offsets),
        )
        if value is not None
    }
    config = RunConfig(
        command=args.command,
        graph_path=args.graph,
        family=args.family,
        family_params=params,
        operator=OperatorKind.parse(args.operator),
        order=args.order,
        ell=args.ell,
        method=METHOD_ALIASES[args.method],
        steps=settings["steps"] if args.steps is None else args.steps,
        seed=settings["seed"] if args.seed is None else args.seed,
        out_dir=args.out,
        mu0=args.mu0,
        functions=settings["sampling_trials"] if args.functions is None else args.functions,
        function_kind=args.kind,
        band=args.band,
        frequencies=_int_list(args.frequencies) if args.frequencies else (),
        jobs=args.jobs,
        settings=settings,
    )
    config.validate()
    return config


def _load_graph(config: RunConfig) -> Graph:
    if config.graph_path is not None:
        text = config.graph_path.read_text(encoding="utf-8")
        return load_edge_list(text, require_regular=config.operator is OperatorKind.WALK_MATRIX)
    assert config.family is not None
    return generate(config.family, config.family_params, seed=config.seed)


def _ordering(config: RunConfig) -> OrderingPolicy:
    if config.order == "abs":
        return OrderingPolicy()
    if config.order.startswith("custom:"):
        return OrderingPolicy.custom(read_permutation(Path(config.order.split(":", 1)[1])))
    raise ConfigError(f"--order must be abs or custom:<file>, got {config.order!r}")


def _decompose(config: RunConfig, g: Graph) -> SpectralBasis:
    s = config.settings
    return decompose(
        g,
        config.operator,
        _ordering(config),
        threshold=s["jacobi_threshold"],
        max_sweeps=s["jacobi_max_sweeps"],
        group_tol=s["eigen_group_tol"],
    )


def _build_design(config: RunConfig, basis: SpectralBasis, ell: int | None = None) -> DesignMeasure:
    if config.frequencies and ell is None:
        return tailored_design_for(basis, config.frequencies, config.method, tol=config.tol)
    depth = config.ell if ell is None else ell
    assert depth is not None
    if config.method == "sign_pattern":
        if depth != 2:
            raise ConfigError("--method sign builds an ell=2 design only")
        return design_from_sign_pattern(basis)
    return solve_design(basis, depth, config.method)


def _initial_measure(
    config: RunConfig, basis: SpectralBasis
) -> tuple[np.ndarray, DesignMeasure | None]:
    n = basis.n
    spec = config.mu0 or "design"
    if spec == "design":
        design = _build_design(config, basis)
        return design.as_vector(), design
    if spec == "uniform":
        return np.full(n, 1.0 / n), None
    kind, _, arg = spec.partition(":")
    if kind == "dirac":
        try:
            v = int(arg)
        except ValueError:
            raise ConfigError(f"dirac needs a vertex id, got {arg!r}") from None
        if not 0 <= v < n:
            raise ConfigError(f"dirac vertex {v} outside 0..{n - 1}")
        mu = np.zeros(n)
        mu[v] = 1.0
        return mu, None
    if kind == "set":
        vertices = sorted(set(_int_list(arg)))
        if not vertices or vertices[0] < 0 or vertices[-1] >= n:
            raise ConfigError(f"set needs vertex ids in 0..{n - 1}, got {arg!r}")
        mu = np.zeros(n)
        mu[vertices] = 1.0 / len(vertices)
        return mu, None
    if kind == "file":
        return np.asarray(read_vertex_weights(Path(arg), n)), None
    raise ConfigError(f"unknown --mu0 {spec!r}")


def _cmd_gen(config: RunConfig, g: Graph) -> bool:
    write_text(config.out_dir / "graph.edgelist", emit_edge_list(g))
    logger.info(f"wrote edge list n={g.n} edges={len(g.edges)}")
    return True


def _cmd_spectrum(config: RunConfig, g: Graph) -> bool:
    basis = _decompose(config, g)
    gaps = spectral_gap_report(basis, tol=config.settings["eigen_group_tol"])
    passed = basis.residual <= config.settings["basis_tol"]
    doc = {"graph": {"n": g.n, "edges": len(g.edges), "degree": g.d}, **basis.to_document()}
    doc["passed"] = passed
    doc["gap_report"] = [entry.to_row() for entry in gaps]
    write_json(config.out_dir / "spectrum.json", doc)
    write_csv(
        config.out_dir / "gap_report.csv",
        ("ell", "base", "tie"),
        ((e.ell, e.base, e.tie) for e in gaps),
    )
    return passed


def _cmd_design(config: RunConfig, g: Graph) -> bool:
    basis = _decompose(config, g)
    design = _build_design(config, basis)
    check = verify_design(basis, design, tol=config.tol)
    doc: dict[str, Any] = {
        "design": design.to_document(check.effective_depth),
        "verification": check.to_document(),
    }
    if not config.frequencies and config.method != "sign_pattern":
        signed = basic_signed_solution(basis, design.ell)
        doc["signed_solution"] = {
            "support": [int(i) for i in np.flatnonzero(signed)],
            "negative_entries": int(np.sum(signed < 0.0)),
        }
    write_json(config.out_dir / "design.json", doc)
    logger.info(
        f"design ell={design.ell} support={len(design.support)} passed={check.passed} "
        f"effective_depth={check.effective_depth}"
    )
    return check.passed


def _cmd_walk(config: RunConfig, g: Graph) -> bool:
    basis = _decompose(config, g)
    mu0, design = _initial_measure(config, basis)
    report: BoundReport
    if design is not None:
        report = verify_theorem1(basis, design, config.steps, tol=config.tol)
    else:
        report = verify_baseline(basis, mu0, config.steps, tol=config.tol)
    doc = report.to_document()
    doc["mu0"] = config.mu0 or "design"
    doc["effective_depth"] = orthogonality_depth(basis, mu0, tol=config.tol)
    if design is not None:
        doc["design"] = design.to_document()
    write_csv(config.out_dir / "trace.csv", TRACE_COLUMNS, report.trace.rows())
    write_json(config.out_dir / "walk_report.json", doc)
    return report.passed


def _cmd_sample(config: RunConfig, g: Graph) -> bool:
    basis = _decompose(config, g)
    design = _build_design(config, basis)
    check = verify_design(basis, design, tol=config.tol)
    functions = [
        make_test_function(basis, config.function_kind, band=config.band, seed=config.seed + i)
        for i in range(config.functions)
    ]
    batch = sample_batch(basis, design, functions, tol=config.tol, jobs=config.jobs)
    doc = {"design": design.to_document(check.effective_depth), **batch.to_document()}
    write_json(config.out_dir / "sampling.json", doc)
    write_csv(config.out_dir / "sampling.csv", BATCH_COLUMNS, batch.rows())
    return check.passed and batch.passed


def _sweep_row(config: RunConfig, basis: SpectralBasis, ell: int) -> tuple[Any, ...]:
    # sign_pattern only exists at ell=2, so the sweep falls back to reduction.
    method = "reduce_uniform" if config.method == "sign_pattern" else config.method
    design = solve_design(basis, ell, method)
    check = verify_design(basis, design, tol=config.tol)
    size = len(design.support)
    if basis.operator is OperatorKind.WALK_MATRIX:
        report = verify_theorem1(basis, design, config.steps, tol=config.tol)
        return (ell, size, report.base, report.fitted_rate, check.effective_depth, report.passed)
    return (ell, size, decay_base(basis, design), None, check.effective_depth, check.passed)


def _cmd_sweep(config: RunConfig, g: Graph) -> bool:
    basis = _decompose(config, g)
    ells = range(1, basis.n)
    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            rows = list(pool.map(lambda ell: _sweep_row(config, basis, ell), ells))
    else:
        rows = [_sweep_row(config, basis, ell) for ell in ells]
    write_csv(config.out_dir / "sweep.csv", SWEEP_COLUMNS, rows)
    passed = all(row[-1] for row in rows)
    logger.info(f"sweep n={basis.n} ells=1..{basis.n - 1} passed={passed}")
    return passed


_HANDLERS = {
    "gen": _cmd_gen,
    "spectrum": _cmd_spectrum,
    "design": _cmd_design,
    "walk": _cmd_walk,
    "sample": _cmd_sample,
    "sweep": _cmd_sweep,
}


def run(config: RunConfig) -> int:
    """Execute one command; 0 if every verification passed, 1 otherwise."""
    config.out_dir.mkdir(parents=True, exist_ok=True)
    g = _load_graph(config)
    passed = _HANDLERS[config.command](config, g)
    return EXIT_OK if passed else EXIT_VERIFICATION


def _diagnostic(exc: BaseException) -> str:
    message = " ".join(str(exc).split()) or type(exc).__name__
    return f"designwalk: error={type(exc).__name__} message={json.dumps(message)}"


def main(argv: list[str] | None = None) -> int:
    logger.remove()
    sinks: list[int] = []
    status = EXIT_ERROR
    try:
        args = _parse_args(argv)
        args.log.parent.mkdir(parents=True, exist_ok=True)
        sinks.append(
            logger.add(
                args.log,
                level="DEBUG" if args.verbose else "INFO",
                format="{time:HH:mm:ss} - {level} - {message}",
                rotation="20 MB",
                retention=5,
            )
        )
        if args.verbose:
            sinks.append(logger.add(sys.stderr, level="DEBUG", format="{level} - {message}"))
        config = config_from_args(args)
        logger.info(f"designwalk {config.command} out={config.out_dir}")
        status = run(config)
    except Exception as exc:
        logger.exception("run failed")
        print(_diagnostic(exc), file=sys.stderr)
        status = EXIT_ERROR
    finally:
        if status == EXIT_VERIFICATION:
            logger.warning("verification failed")
        for sink in sinks:
            logger.remove(sink)
    return status


if __name__ == "__main__":
    sys.exit(main())
