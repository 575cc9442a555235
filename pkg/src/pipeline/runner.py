"""
Experiment pipeline: learn topologies, measure heterogeneity, simulate D-SGD
on every topology and write a comparison table.

Stages run in order; seeds within the simulation stage run on the worker
pool and every artifact is written by the main thread.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from ..errors import ConfigError
from ..heterogeneity import HeterogeneityReport, default_probes, label_skew_bound, measure_heterogeneity
from ..mixing import MixingMatrix, MixingSchedule, degrees, make_topology, mixing_parameter, read_topology
from ..mixing.io import array_to_csv
from ..problems import ProblemFile, ProblemSpec, build_problem, load_problem_file
from ..settings import settings
from ..simulation import (
    SimConfig,
    Stepsize,
    consensus_soft_check,
    iterations_to_epsilon,
    max_stable_stepsize,
    median_iterations,
    run_seeds,
    theorem1_constants,
    trace_to_csv,
)
from ..topo_opt import TopoObjective, g_value, learn_topologies
from ..topo_opt.io import trace_to_jsonl
from .artifacts import ArtifactWriter
from .config import ExperimentConfig, TopologySource
from .table import ComparisonRow, ComparisonTable

logger = logging.getLogger(__name__)


@dataclass
class PipelineResult:
    table: ComparisonTable
    output_dir: Path
    manifest_path: Path


@dataclass
class _Topology:
    name: str
    W: MixingMatrix
    artifact: str


def _resolve(path: str, base_dir: Optional[Path]) -> Path:
    resolved = Path(path)
    if base_dir is not None and not resolved.is_absolute():
        resolved = base_dir / resolved
    return resolved


def _load_problem(
    config: ExperimentConfig, base_dir: Optional[Path], writer: ArtifactWriter
) -> Tuple[ProblemFile, Optional[Path]]:
    if isinstance(config.problem, ProblemFile):
        writer.register_input_text("problem", config.problem.model_dump_json())
        return config.problem, base_dir
    path = _resolve(config.problem, base_dir)
    if not path.exists():
        raise FileNotFoundError(f"Problem file not found: {path}")
    writer.register_input("problem", path)
    return load_problem_file(path), path.parent


def _objective_lam(config: ExperimentConfig) -> Optional[float]:
    for source in config.topologies:
        if source.kind == "learn":
            return source.lam
    return None


def _build_topologies(
    source: TopologySource,
    spec: ProblemSpec,
    base_dir: Optional[Path],
    writer: ArtifactWriter,
) -> List[_Topology]:
    if source.kind == "generator":
        name = source.row_names()[0]
        return [_Topology(name, make_topology(source.generator, spec.n), f"topologies/{name}.csv")]

    if source.kind == "file":
        name = source.row_names()[0]
        path = _resolve(source.path, base_dir)
        if not path.exists():
            raise FileNotFoundError(f"Topology file not found: {path}")
        writer.register_input(f"topology:{name}", path)
        W = read_topology(path)
        if W.n != spec.n:
            raise ConfigError(f"topologies.{name}", f"matrix has n={W.n}, problem has n={spec.n}")
        return [_Topology(name, W, f"topologies/{name}.csv")]

    if spec.proportions is None:
        raise ConfigError("topologies", f"'learn' needs class proportions; problem kind is '{spec.kind}'")
    budgets = sorted(set(source.budgets))
    obj = TopoObjective(spec.proportions, source.lam)
    learned, trace = learn_topologies(obj, budgets)
    prefix = source.name or "fw"
    writer.write_text(f"topologies/{prefix}_trace.jsonl", trace_to_jsonl(trace))
    return [
        _Topology(name, learned[b], f"topologies/{name}.csv")
        for name, b in zip(source.row_names(), budgets)
    ]


def _stepsize(
    config: ExperimentConfig,
    spec: ProblemSpec,
    p: float,
    report: HeterogeneityReport,
    p_by_name: Dict[str, float],
) -> Optional[Stepsize]:
    params = config.simulation.stepsize
    if params.kind == "constant":
        return Stepsize.constant(params.eta)
    if params.kind == "stable":
        return Stepsize.constant(max_stable_stepsize(p_by_name[params.reference], spec.L))
    if p <= 0:
        return None
    if params.r0 is not None:
        r0 = params.r0
    else:
        diff = np.asarray(spec.theta0, dtype=float) - spec.theta_star
        r0 = float(diff @ diff)
    b, e, d = theorem1_constants(report.sigma_bar_sq_hat, report.H_hat, spec.L, p, spec.n)
    return Stepsize.tuned(r0, b, e, d)


def run_pipeline(
    config: ExperimentConfig,
    base_dir: Optional[Union[str, Path]] = None,
    output_dir: Optional[Union[str, Path]] = None,
) -> PipelineResult:
    """
    Run a full experiment and write its artifact tree.

    Layout under the output directory:
        topologies/<name>.csv, topologies/<prefix>_trace.jsonl
        reports/<name>.json
        traces/<name>/seed_<s>.csv
        table.csv, table.txt, manifest.json

    Args:
        config: Validated experiment config
        base_dir: Directory relative input paths are resolved against
        output_dir: Overrides config.output_dir

    Returns:
        PipelineResult

    Raises:
        ConfigError: If the config references something inconsistent
        FileNotFoundError: If an input file is missing
    """
    base = Path(base_dir) if base_dir is not None else None
    root = Path(output_dir) if output_dir is not None else Path(config.output_dir)
    writer = ArtifactWriter(root)
    sim = config.simulation
    est = config.estimation

    problem_file, problem_dir = _load_problem(config, base, writer)
    spec = build_problem(problem_file, problem_dir)
    logger.info(f"Pipeline '{config.name}': {spec.kind}, n={spec.n}, {len(config.row_names())} topologies")

    topologies: List[_Topology] = []
    for source in config.topologies:
        topologies.extend(_build_topologies(source, spec, base, writer))
    for topo in topologies:
        writer.write_text(topo.artifact, array_to_csv(topo.W.entries))
    logger.info(f"Topologies ready: {', '.join(t.name for t in topologies)}")

    lam = _objective_lam(config)
    objective = TopoObjective(spec.proportions, lam or settings.topology.lam) if spec.proportions is not None else None
    probes = default_probes(spec, count=est.probes)
    p_by_name = {t.name: mixing_parameter(t.W) for t in topologies}

    reports: Dict[str, HeterogeneityReport] = {}
    for topo in topologies:
        report = measure_heterogeneity(
            topo.W,
            spec,
            probes=probes,
            samples=est.samples,
            seed=config.seed,
            sigma_max_sq=est.sigma_max_sq,
            estimate_B=spec.proportions is not None,
        )
        reports[topo.name] = report
        document = {"heterogeneity": report.model_dump(mode="json")}
        if spec.proportions is not None and report.B_hat:
            bound = label_skew_bound(topo.W, spec.proportions, report.B_hat, report.sigma_max_sq_used)
            document["label_skew_bound"] = bound.model_dump(mode="json")
        writer.write_json(f"reports/{topo.name}.json", document)
    logger.info("Heterogeneity measured for all topologies")

    table = ComparisonTable(epsilon=sim.epsilon)
    cells: Dict[str, Dict[str, object]] = {}
    for topo in topologies:
        report = reports[topo.name]
        p = p_by_name[topo.name]
        report_path = f"reports/{topo.name}.json"
        step = _stepsize(config, spec, p, report, p_by_name)

        trace_paths: List[str] = []
        iterations: Optional[float] = None
        final_node_gap: Optional[float] = None
        eta = float("nan")
        if step is None:
            logger.warning(f"Skipping simulation on '{topo.name}': tuned stepsize needs p > 0")
        else:
            sim_config = SimConfig(
                T=sim.T,
                stepsize=step,
                schedule=MixingSchedule.fixed(topo.W),
                seed=sim.seeds[0],
                record_every=sim.record_every,
                mode=sim.mode,
                batch_size=sim.batch_size,
                p=p,
            )
            eta = sim_config.eta
            traces = run_seeds(spec, sim_config, list(sim.seeds))
            hits = []
            for seed, trace in zip(sim.seeds, traces):
                relative = f"traces/{topo.name}/seed_{seed}.csv"
                writer.write_text(relative, trace_to_csv(trace))
                trace_paths.append(relative)
                hits.append(iterations_to_epsilon(trace, sim.epsilon, metric="node_gap"))
                if p > 0:
                    consensus_soft_check(trace, spec.n, report.H_hat, p)
            iterations = median_iterations(hits)
            final_node_gap = float(np.median([t.final.node_gap for t in traces]))
            logger.info(f"Simulated '{topo.name}' over {len(traces)} seeds: eta={eta:.6g}")

        report_degrees = degrees(topo.W)
        table.add(
            ComparisonRow(
                topology=topo.name,
                p=p,
                d_in_max=report_degrees.d_in_max,
                d_out_max=report_degrees.d_out_max,
                g_value=g_value(topo.W, objective) if objective is not None else None,
                H_hat=report.H_hat,
                zeta_bar_sq_hat=report.zeta_bar_sq_hat,
                eta=eta,
                iterations_to_eps=iterations,
                final_node_gap=final_node_gap,
            )
        )
        cells[topo.name] = {
            "p": topo.artifact,
            "d_in_max": topo.artifact,
            "d_out_max": topo.artifact,
            "g_value": topo.artifact if objective is not None else None,
            "H_hat": report_path,
            "zeta_bar_sq_hat": report_path,
            "eta": report_path if config.simulation.stepsize.kind == "tuned" else "manifest.json",
            "iterations_to_eps": trace_paths,
            "final_node_gap": trace_paths,
        }

    writer.write_text("table.csv", table.to_csv())
    writer.write_text("table.txt", table.to_text())
    manifest = writer.write_manifest(config.model_dump(mode="json"), cells)
    logger.info(f"Pipeline '{config.name}' finished: {root}")
    return PipelineResult(table=table, output_dir=root, manifest_path=manifest)
