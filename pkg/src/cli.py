"""CLI interface for hetero-topo."""

import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Optional

import click
import numpy as np
from pydantic import ValidationError

from .errors import NUMERICAL_ERRORS, ConfigError, ScheduleExhausted
from .heterogeneity import (
    default_probes,
    estimate_H_detailed,
    estimate_sigma_sq,
    label_skew_bound,
    measure_heterogeneity,
)
from .mixing import (
    MixingSchedule,
    degrees,
    list_topologies,
    make_topology,
    mixing_parameter,
    read_schedule_dir,
    read_topology,
    write_matrix_csv,
    write_matrix_json,
)
from .pipeline import ArtifactWriter, dumps_json, load_config, preset_config, list_presets, run_pipeline
from .problems import ClassProportions, ProblemFile, build_problem, load_problem_file
from .settings import settings
from .simulation import (
    SimConfig,
    Stepsize,
    TraceCsvWriter,
    run_centralized,
    run_dsgd,
    theorem1_constants,
)
from .topo_opt import TopoObjective, frank_wolfe, theorem3_bound, write_fw_trace

logger = logging.getLogger(__name__)

EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_MISSING_FILE = 3
EXIT_NUMERICAL = 4


def exit_code_for(error: BaseException) -> int:
    """Map an exception to the process exit code."""
    if isinstance(error, (FileNotFoundError, IsADirectoryError, PermissionError)):
        return EXIT_MISSING_FILE
    if isinstance(error, NUMERICAL_ERRORS):
        return EXIT_NUMERICAL
    if isinstance(error, (ConfigError, ValidationError, ScheduleExhausted, ValueError)):
        return EXIT_CONFIG
    return EXIT_UNEXPECTED


@contextmanager
def _reported(action: str):
    """Turn domain errors into a stderr message and the matching exit code."""
    try:
        yield
    except click.exceptions.Exit:
        raise
    except Exception as e:
        code = exit_code_for(e)
        if code == EXIT_UNEXPECTED:
            logger.exception(f"{action} failed")
        click.echo(f"❌ {action} failed: {e}", err=True)
        sys.exit(code)


def _write_output(text: str, out: Optional[str]) -> None:
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        click.echo(f"✅ Wrote {path}", err=True)
    else:
        click.echo(text, nl=False)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging")
def cli(verbose):
    """hetero-topo - topology learning and D-SGD experiments under data heterogeneity."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else getattr(logging, settings.runtime.log_level, logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )


@cli.command()
@click.argument("kind", type=click.Choice([k for k in list_topologies() if k != "custom_weights"]))
@click.option("-n", "--nodes", "n", type=int, required=True, help="Number of nodes")
@click.option("-o", "--out", type=click.Path(dir_okay=False), required=True, help="Output file (.csv or .json)")
def topology(kind, n, out):
    """Write a canonical topology to a matrix file."""
    with _reported("Topology"):
        W = make_topology(kind, n)
        if Path(out).suffix.lower() == ".json":
            write_matrix_json(W, out)
        else:
            write_matrix_csv(W, out)
        click.echo(f"✅ {kind} (n={n}, p={mixing_parameter(W):.6g}) -> {out}")


@cli.command("learn-topo")
@click.option("--proportions", type=click.Path(dir_okay=False), help="Class proportions CSV (n x K)")
@click.option("--problem", type=click.Path(dir_okay=False), help="Label-skew problem spec JSON")
@click.option("--lambda", "lam", type=float, default=None, help="Bias/variance trade-off (defaults to settings)")
@click.option("--iters", type=int, default=None, help="Frank-Wolfe step budget")
@click.option("--gap-tol", type=float, default=None, help="Stop once the duality gap is below this")
@click.option("--seed", type=int, default=None, help="Proportions seed (overrides the problem file)")
@click.option("-o", "--out", type=click.Path(dir_okay=False), required=True, help="Learned matrix CSV")
@click.option("--trace", "trace_out", type=click.Path(dir_okay=False), help="Per-step trace (JSON lines)")
def learn_topo(proportions, problem, lam, iters, gap_tol, seed, out, trace_out):
    """Learn a sparse topology from class proportions by Frank-Wolfe."""
    with _reported("Topology learning"):
        if bool(proportions) == bool(problem):
            raise ConfigError("learn-topo", "give exactly one of --proportions or --problem")
        if proportions:
            Pi = ClassProportions.from_csv(proportions)
        else:
            problem_file = load_problem_file(problem)
            if seed is not None:
                problem_file = ProblemFile.model_validate({**problem_file.model_dump(), "seed": seed})
            spec = build_problem(problem_file, base_dir=Path(problem).parent)
            if spec.proportions is None:
                raise ConfigError(str(problem), f"problem kind '{spec.kind}' has no class proportions")
            Pi = spec.proportions

        obj = TopoObjective(Pi, settings.topology.lam if lam is None else lam)
        W, trace = frank_wolfe(obj, iters=iters, gap_tol=gap_tol)
        write_matrix_csv(W, out)
        if trace_out:
            write_fw_trace(trace, trace_out)

        report = degrees(W)
        click.echo(f"✅ Learned topology -> {out}")
        if trace.records:
            last = trace.records[-1]
            click.echo(f"   steps: {last.l} (stop: {trace.stop_reason})")
            click.echo(f"   g(W): {last.g_value:.6e}  bound: {theorem3_bound(obj, last.l):.6e}")
        click.echo(f"   d_in_max: {report.d_in_max}  d_out_max: {report.d_out_max}  p: {mixing_parameter(W):.6g}")


@cli.command()
@click.option("--topology", "topology_path", type=click.Path(dir_okay=False), required=True, help="Matrix CSV or JSON")
@click.option("--problem", type=click.Path(dir_okay=False), required=True, help="Problem spec JSON")
@click.option("--samples", type=int, default=None, help="Monte Carlo draws per node per probe")
@click.option("--probes", type=int, default=8, show_default=True, help="Probe points besides theta0 and theta*")
@click.option("--seed", type=int, default=0, show_default=True, help="Stream seed")
@click.option("--B", "B", type=float, default=None, help="Class heterogeneity constant for the label-skew bound")
@click.option("--sigma-max-sq", type=float, default=None, help="Override for sigma_max^2")
@click.option("-o", "--out", type=click.Path(dir_okay=False), help="Write the JSON report here instead of stdout")
def measure(topology_path, problem, samples, probes, seed, B, sigma_max_sq, out):
    """Measure heterogeneity of a topology on a problem (JSON report)."""
    with _reported("Measurement"):
        W = read_topology(topology_path)
        spec = build_problem(problem)
        if W.n != spec.n:
            raise ConfigError(str(topology_path), f"topology has n={W.n}, problem has n={spec.n}")

        report = measure_heterogeneity(
            W,
            spec,
            probes=default_probes(spec, count=probes),
            samples=samples,
            seed=seed,
            sigma_max_sq=sigma_max_sq,
            estimate_B=spec.proportions is not None and B is None,
        )
        document: Dict[str, Any] = {"heterogeneity": report.model_dump(mode="json")}
        B_used = B if B is not None else report.B_hat
        if spec.proportions is not None and B_used:
            bound = label_skew_bound(W, spec.proportions, B_used, report.sigma_max_sq_used)
            document["label_skew_bound"] = bound.model_dump(mode="json")
        _write_output(dumps_json(document), out)


def _tuned_stepsize(spec, schedule: MixingSchedule, seed: int) -> Stepsize:
    """Tuned stepsize from measured sigma_bar^2, H and the worst p of the schedule."""
    p = min(mixing_parameter(W) for W in schedule.matrices)
    probes = default_probes(spec)
    H = max(estimate_H_detailed(W, spec, probes, seed=seed).value for W in schedule.matrices)
    noise = estimate_sigma_sq(spec, probes, seed=seed)
    diff = np.asarray(spec.theta0, dtype=float) - spec.theta_star
    b, e, d = theorem1_constants(noise.sigma_bar_sq, H, spec.L, p, spec.n)
    logger.info(f"Tuned stepsize inputs: p={p:.6g}, H={H:.6g}, sigma_bar^2={noise.sigma_bar_sq:.6g}")
    return Stepsize.tuned(float(diff @ diff), b, e, d)


@cli.command()
@click.option("--problem", type=click.Path(dir_okay=False), required=True, help="Problem spec JSON")
@click.option("--topology", "topology_path", type=click.Path(dir_okay=False), help="Matrix CSV or JSON")
@click.option("--schedule-dir", type=click.Path(file_okay=False), help="Directory of matrices used cyclically")
@click.option("--T", "T", type=int, required=True, help="Iterations")
@click.option("--eta", type=float, default=None, help="Constant stepsize")
@click.option("--tuned", is_flag=True, help="Tune the stepsize from measured constants")
@click.option("--seed", type=int, default=0, show_default=True, help="Sample stream seed")
@click.option("--record-every", type=int, default=None, help="Record spacing")
@click.option("--mode", type=click.Choice(["stochastic", "full_batch"]), default="stochastic", show_default=True)
@click.option("--centralized", is_flag=True, help="Run centralized parallel SGD instead")
@click.option("-o", "--out", type=click.Path(dir_okay=False), required=True, help="Trace CSV")
@click.option("--manifest", type=click.Path(dir_okay=False), help="Run manifest JSON (defaults next to the trace)")
def simulate(problem, topology_path, schedule_dir, T, eta, tuned, seed, record_every, mode, centralized, out, manifest):
    """Simulate D-SGD and write its trace as CSV."""
    with _reported("Simulation"):
        if bool(topology_path) == bool(schedule_dir):
            raise ConfigError("simulate", "give exactly one of --topology or --schedule-dir")
        if (eta is None) == (not tuned):
            raise ConfigError("simulate", "give exactly one of --eta or --tuned")

        spec = build_problem(problem)
        if topology_path:
            schedule = MixingSchedule.fixed(read_topology(topology_path))
        else:
            schedule = read_schedule_dir(schedule_dir)

        stepsize = _tuned_stepsize(spec, schedule, seed) if tuned else Stepsize.constant(eta)
        config = SimConfig(
            T=T,
            stepsize=stepsize,
            schedule=schedule,
            seed=seed,
            record_every=record_every or settings.simulation.record_every,
            mode=mode,
        )
        runner = run_centralized if centralized else run_dsgd

        out_path = Path(out)
        writer = ArtifactWriter(out_path.parent)
        writer.register_input("problem", problem)
        if topology_path:
            writer.register_input("topology", topology_path)
        else:
            for path in sorted(Path(schedule_dir).iterdir()):
                if path.suffix.lower() in (".csv", ".json"):
                    writer.register_input(f"schedule:{path.name}", path)

        with TraceCsvWriter(out_path, spec.dim) as sink:
            trace = runner(spec, config, sink=sink)
        writer.register_output(out_path.name)

        manifest_path = Path(manifest) if manifest else out_path.with_suffix(".manifest.json")
        echo = {
            "problem": str(problem),
            "topology": str(topology_path) if topology_path else None,
            "schedule_dir": str(schedule_dir) if schedule_dir else None,
            "T": T,
            "eta": trace.eta,
            "tuned": tuned,
            "seed": seed,
            "record_every": config.record_every,
            "mode": mode,
            "algorithm": trace.algorithm,
        }
        writer.write_manifest(echo, name=str(manifest_path.resolve()))

        final = trace.final
        click.echo(f"✅ {trace.algorithm}: T={T}, eta={trace.eta:.6g} -> {out}")
        click.echo(f"   final gap: {final.f_bar_gap:.6e}  consensus: {final.consensus_sq:.6e}")


def _pipeline_overrides(seed, T, samples, seeds) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {}
    if seed is not None:
        overrides["seed"] = seed
    if T is not None:
        overrides["simulation.T"] = T
    if samples is not None:
        overrides["estimation.samples"] = samples
    if seeds:
        overrides["simulation.seeds"] = [int(s) for s in seeds.split(",")]
    return overrides


@cli.command()
@click.option("--preset", type=click.Choice(list_presets()), help="Built-in experiment")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="Experiment config JSON")
@click.option("--seed", type=int, default=None, help="Experiment seed (overrides the config)")
@click.option("--T", "T", type=int, default=None, help="Iterations per run (overrides the config)")
@click.option("--samples", type=int, default=None, help="Monte Carlo draws (overrides the config)")
@click.option("--seeds", type=str, default=None, help="Comma-separated simulation seeds (overrides the config)")
@click.option("--output-dir", type=click.Path(file_okay=False), default=None, help="Artifact directory")
def pipeline(preset, config_path, seed, T, samples, seeds, output_dir):
    """Learn, measure, simulate and compare topologies."""
    with _reported("Pipeline"):
        if bool(preset) == bool(config_path):
            raise ConfigError("pipeline", "give exactly one of --preset or --config")
        overrides = _pipeline_overrides(seed, T, samples, seeds)
        if preset:
            config = preset_config(preset, seed=seed or 0, overrides=overrides)
            base_dir = None
        else:
            path = Path(config_path)
            if not path.exists():
                raise FileNotFoundError(f"Config file not found: {path}")
            config = load_config(path, overrides=overrides)
            base_dir = path.parent

        result = run_pipeline(config, base_dir=base_dir, output_dir=output_dir)
        click.echo(result.table.to_text(), nl=False)
        click.echo(f"✅ Artifacts in {result.output_dir} (manifest: {result.manifest_path.name})")


if __name__ == "__main__":
    cli()
