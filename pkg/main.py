#!/usr/bin/env python3
"""
FeynLab command line
Graph integrals, anomaly functionals and verification suites for
topological-holomorphic Feynman graphs.
"""

import argparse
import sys
from pathlib import Path
from typing import Any, Dict, List, Tuple

from dotenv import load_dotenv

# Add src to path and import logger
sys.path.append(str(Path(__file__).resolve().parent / 'src'))
from utils.logger import logger  # noqa: E402

# Load environment variables
load_dotenv()

EXIT_OK = 0
EXIT_FAILED_CHECKS = 1
EXIT_BAD_INPUT = 2

Records = List[Dict[str, Any]]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="feynlab", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("--graph", dest="graph_path", help="graph JSON file or a library graph name")
    common.add_argument("--d", type=int, help="complex dimension d")
    common.add_argument("--dprime", dest="d_prime", type=int, help="real dimension d'")
    common.add_argument("--L", type=float, help="upper Schwinger cutoff (kernel time for kernel-eval)")
    common.add_argument("--eps-grid", dest="eps_grid", type=int, help="k_max of eps = L 4^-k")
    common.add_argument("--nodes", type=int, help="Gauss-Legendre nodes per axis")
    common.add_argument("--mc", type=int, help="Monte Carlo samples on sphere patches (0 = tensor rule)")
    common.add_argument("--seed", type=int)
    common.add_argument("--jobs", type=int)
    common.add_argument("--out", dest="out_path", help="output file (stdout when absent)")
    common.add_argument("--format", choices=["json", "csv", "plot-data"])
    common.add_argument("--wall-time", dest="wall_time", action="store_true", default=None,
                        help="include wall times (breaks byte-identical reruns)")

    sub.add_parser("graph-info", parents=[common], help="Betti number, spanning trees and Laman verdicts")
    sub.add_parser("integrate", parents=[common], help="W_eps^L over the eps grid and W_0^L")
    sub.add_parser("anomaly", parents=[common], help="anomaly functional O of a connected graph")
    verify = sub.add_parser("verify", parents=[common], help="run verification suites")
    verify.add_argument("--suite", default=None)
    kernel = sub.add_parser("kernel-eval", parents=[common], help="heat kernel and propagators at a point")
    kernel.add_argument("--point", help="comma-separated Euclidean point (Re z, Im z, ..., x, ...)")
    return parser


def resolve_config(args: argparse.Namespace):
    from utils.config import RunConfig
    overrides = {k: getattr(args, k, None) for k in
                 ("graph_path", "d", "d_prime", "L", "eps_grid", "jobs", "out_path", "format", "suite", "point",
                  "wall_time")}
    overrides["quadrature"] = {"nodes_per_axis": args.nodes, "mc_samples": args.mc, "seed": args.seed}
    return RunConfig.from_sources(args.command, args.config, overrides)


def load_input_graph(config):
    from data.graph_io import load_graph
    from data.graph_library import GRAPHS, get_graph
    from utils.errors import ConfigError
    if not config.graph_path:
        raise ConfigError("this command needs --graph")
    if not Path(config.graph_path).exists() and config.graph_path in GRAPHS:
        return get_graph(config.graph_path), config.graph_path
    graph, metadata = load_graph(config.graph_path)
    return graph, metadata["name"]


def signature_of(config):
    from graphs.decorated_graph import Signature
    from utils.errors import ConfigError
    if config.d is None or config.d_prime is None:
        raise ConfigError("this command needs --d and --dprime")
    return Signature(config.d, config.d_prime)


# commands


def cmd_graph_info(config) -> Tuple[Records, bool]:
    from engine.verify import SIGNATURES
    from graphs.combinatorics import spanning_trees
    from graphs.decorated_graph import betti_1
    from graphs.laman import is_laman, laman_slack, rank_vanishing_witness

    graph, name = load_input_graph(config)
    summary = {"graph": name, "vertices": graph.vertex_count, "edges": graph.edge_count,
               "betti_1": betti_1(graph), "spanning_trees": len(spanning_trees(graph))}
    records = []
    for sig in SIGNATURES:
        witness = rank_vanishing_witness(graph, sig)
        records.append({**summary, "d": sig.d, "d_prime": sig.d_prime, "laman": is_laman(graph, sig),
                        "laman_slack": laman_slack(graph, sig), "rank_vanishing": witness is not None,
                        "witness": list(witness or ())})
    return records, True


def cmd_integrate(config) -> Tuple[Records, bool]:
    from engine.integrals import w_0_L, w_eps_L
    from engine.problem import GraphIntegralProblem, TestSource

    graph, name = load_input_graph(config)
    sig = signature_of(config)
    problem = GraphIntegralProblem(graph, sig, TestSource.balanced(sig, graph), config.L)
    header = {"graph": name, "d": sig.d, "d_prime": sig.d_prime, "L": config.L,
              "problem_hash": problem.problem_hash()}
    records = []
    for k in range(1, config.eps_grid + 1):
        eps = config.L * 4.0 ** (-k)
        result = w_eps_L(problem.with_eps(eps), config.quadrature, config.jobs)
        records.append({**header, "eps": eps, **result.to_record(config.wall_time)})
    result = w_0_L(problem, config.quadrature, config.jobs)
    records.append({**header, "eps": 0.0, **result.to_record(config.wall_time)})
    return records, all(r["status"] == "ok" for r in records)


def cmd_anomaly(config) -> Tuple[Records, bool]:
    from engine.anomaly import anomaly_functional, anomaly_source, reflection_parity_check
    from engine.problem import GraphIntegralProblem

    graph, name = load_input_graph(config)
    sig = signature_of(config)
    problem = GraphIntegralProblem(graph, sig, anomaly_source(sig, graph), config.L)
    result = anomaly_functional(problem, config.quadrature, config.jobs)
    record = {"graph": name, "d": sig.d, "d_prime": sig.d_prime, **result.to_record(config.wall_time)}
    if sig.d_prime >= 1:
        parity = reflection_parity_check(problem, config.quadrature, config.jobs)
        record.update({"reflected_re": parity.reflected.value.real, "reflected_im": parity.reflected.value.imag,
                       "parity_passed": parity.passed})
    return [record], result.status == "ok"


def cmd_verify(config) -> Tuple[Records, bool]:
    from engine.verify import run_suite

    results = run_suite(config.suite, config.quadrature, config.jobs, config.quadrature.seed)
    return [r.to_record() for r in results], all(r.passed for r in results)


def cmd_kernel_eval(config) -> Tuple[Records, bool]:
    import numpy as np
    from forms.exterior import coordinate, evaluate
    from kernels.bochner_martinelli import bochner_martinelli_components, regularized_propagator_components
    from kernels.heat import SpacetimePoint, heat_kernel_value, position_symbols
    from kernels.propagator import point_propagator
    from utils.errors import ConfigError

    sig = signature_of(config)
    if not config.point:
        raise ConfigError("kernel-eval needs --point")
    try:
        values = [float(v) for v in config.point.split(",")]
    except ValueError as e:
        raise ConfigError(f"cannot parse --point {config.point!r}") from e
    if len(values) != sig.real_dimension:
        raise ConfigError(f"--point needs {sig.real_dimension} coordinates for {sig}, got {len(values)}")
    p = SpacetimePoint.from_euclidean(sig, values)
    t = config.L
    eps = t * 4.0 ** (-config.eps_grid)

    records: Records = [{"quantity": "H", "component": "", "re": heat_kernel_value(sig, t, p), "im": 0.0}]
    z, zbar, x = position_symbols(sig, 1)
    point = {coordinate("t", 0): t}
    point.update({s: v for s, v in zip(z, p.z)})
    point.update({s: np.conj(v) for s, v in zip(zbar, p.z)})
    point.update({s: v for s, v in zip(x, p.x)})
    for key, value in sorted(evaluate(point_propagator(sig), point).items()):
        records.append({"quantity": "P_t", "component": "".join(map(repr, key)), "re": value.real, "im": value.imag})
    for normalization in ("heat", "displayed"):
        for k, value in enumerate(bochner_martinelli_components(sig, p, normalization)):
            records.append({"quantity": f"BM[{normalization}]", "component": str(k), "re": value.real,
                            "im": value.imag})
    for k, value in enumerate(regularized_propagator_components(sig, eps, t, p, method="gamma")):
        records.append({"quantity": f"P_eps_L[eps={eps:g}]", "component": str(k), "re": value.real,
                        "im": value.imag})
    for i, record in enumerate(records):
        record["index"] = i
    return records, True


COMMAND_HANDLERS = {
    "graph-info": cmd_graph_info,
    "integrate": cmd_integrate,
    "anomaly": cmd_anomaly,
    "verify": cmd_verify,
    "kernel-eval": cmd_kernel_eval,
}

# (x, y, yerr) columns of the plot-data format
PLOT_AXES = {
    "integrate": ("eps", "value_re", "error"),
    "graph-info": ("d", "laman_slack", ""),
    "anomaly": ("d", "value_re", "error"),
    "verify": ("index", "measured", "tolerance"),
    "kernel-eval": ("index", "re", ""),
}


def emit(records: Records, config) -> bool:
    from data.results_store import store
    if config.format == "plot-data" and config.command == "verify":
        for i, record in enumerate(records):
            record["index"] = i
    axes = PLOT_AXES[config.command]
    if config.out_path:
        return store.save(records, config.out_path, config.format, config.wall_time, axes)
    sys.stdout.write(store.render(records, config.format, config.wall_time, axes))
    return True


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logger.user_action("command", args.command)

    from utils.errors import FeynLabError
    try:
        config = resolve_config(args)
        records, ok = COMMAND_HANDLERS[config.command](config)
    except FeynLabError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_BAD_INPUT
    if not emit(records, config):
        return EXIT_BAD_INPUT
    return EXIT_OK if ok else EXIT_FAILED_CHECKS


if __name__ == "__main__":
    sys.exit(main())
