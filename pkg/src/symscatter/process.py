import json
import logging
import sys
from typing import List, Optional

import click
import numpy as np
import typer
from typer import Argument, Option, Typer

from symscatter.constants import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    ExistenceStatus,
    FunctionalKind,
    SchemeKind,
)
from symscatter.errors import SymScatterError
from symscatter.linalg import shape_normalize
from symscatter.pairs import PairScheme
from symscatter.scatter.existence import ExistenceVerdict, check_existence
from symscatter.scatter.rho import ScatterFunctional, rho_nu
from symscatter.scatter.symmetrized import (
    average_estimates,
    cycle_samples,
    difference_sample,
    solve_cycles,
    symmetrized_scatter,
)
from symscatter.sim import extract, load, utils
from symscatter.sim.experiment import ExperimentConfig, run_experiment
from symscatter.ustats import decompose, named_kernel, predict_variance

logger = logging.getLogger(__name__)


def build_scheme(scheme: str, d: Optional[int], seed: int) -> PairScheme:
    """Maps the CLI scheme options to a PairScheme.

    Raises:
        click.BadParameter: on unknown schemes or a missing --d
    """
    try:
        kind = SchemeKind(scheme)
    except ValueError:
        raise click.BadParameter(
            f"{scheme!r} is not one of {[k.value for k in SchemeKind]}.", param_hint="--scheme"
        )
    if kind == SchemeKind.COMPLETE:
        return PairScheme.complete()
    if d is None:
        raise click.BadParameter(f"the {kind.value} scheme needs --d.", param_hint="--d")
    if kind == SchemeKind.BALANCED:
        return PairScheme.balanced(d)
    return PairScheme.randomized(d, seed)


def build_functional(functional: str, nu: float, q: int) -> ScatterFunctional:
    try:
        kind = FunctionalKind(functional)
    except ValueError:
        raise click.BadParameter(
            f"{functional!r} is not one of {[k.value for k in FunctionalKind]}.",
            param_hint="--functional",
        )
    if kind == FunctionalKind.TYLER:
        return ScatterFunctional.tyler()
    return ScatterFunctional.m_type(rho_nu(nu, q))


def _existence(data: np.ndarray, scheme: PairScheme, functional: ScatterFunctional) -> ExistenceVerdict:
    """Existence verdict of the samples the estimate is solved on.

    Randomized schemes are solved per cycle, so every cycle is checked and the first failing one is
    reported, with its witness members shifted to positions in the scheme's pair stream.
    """
    if scheme.kind != SchemeKind.RANDOMIZED:
        return check_existence(difference_sample(data, scheme), functional)
    n = data.shape[0]
    verdicts = [check_existence(sample, functional) for sample in cycle_samples(data, scheme.d, scheme.seed)]
    for status in (ExistenceStatus.FAIL, ExistenceStatus.HEURISTIC_PASS):
        for cycle, verdict in enumerate(verdicts):
            if verdict.status != status:
                continue
            if verdict.witness is not None:
                verdict.witness.members = [m + cycle * n for m in verdict.witness.members]
            return verdict
    return verdicts[0]


def _solve(
    data: np.ndarray, scheme: PairScheme, functional: ScatterFunctional, tol: float, max_iter: int
) -> dict:
    if scheme.kind != SchemeKind.RANDOMIZED:
        report = symmetrized_scatter(data, scheme, functional, tol=tol, max_iter=max_iter)
        return {
            "estimate": report.estimate,
            "iterations": report.iterations,
            "residual": report.residual,
            "converged": report.converged,
        }
    reports = solve_cycles(data, scheme.d, functional, tol=tol, seed=scheme.seed, max_iter=max_iter)
    return {
        "estimate": average_estimates(reports),
        "iterations": max(report.iterations for report in reports),
        "residual": max(report.residual for report in reports),
        "converged": all(report.converged for report in reports),
    }


def estimate_dataset(
    data: np.ndarray,
    scheme: PairScheme,
    functional: ScatterFunctional,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> dict:
    """Symmetrized scatter estimate of a dataset, with its shape and the existence verdict.

    A randomized scheme gives the average of the d per-cycle estimates; iterations and residual
    are then the largest over the cycles.

    Args:
        data (np.ndarray): (n, q) observations
        scheme (PairScheme): pairing design
        functional (ScatterFunctional): M-type or Tyler
        tol (float, optional): solver tolerance. Defaults to 1e-9.
        max_iter (int, optional): solver iteration cap. Defaults to 500.

    Returns:
        dict: JSON-ready result. Witness members are 1-based pair positions.
    """
    verdict = _existence(data, scheme, functional)
    result = {
        "n": data.shape[0],
        "q": data.shape[1],
        "functional": functional.kind.value,
        "scheme": scheme.label,
        "d": scheme.d,
        "existence": verdict.status.value,
    }
    if verdict.witness is not None:
        result["witness"] = {
            "dim": verdict.witness.dim,
            "mass": verdict.witness.mass,
            "bound": verdict.witness.bound,
            "members": [m + 1 for m in verdict.witness.members],
        }
        logger.warning(
            "The difference sample violates the existence condition on a %s-dimensional subspace",
            verdict.witness.dim,
        )
    solved = _solve(data, scheme, functional, tol, max_iter)
    result.update(
        {
            "estimate": solved["estimate"],
            "shape": shape_normalize(solved["estimate"]),
            "iterations": solved["iterations"],
            "residual": solved["residual"],
            "converged": solved["converged"],
        }
    )
    return result


def decompose_dataset(data: np.ndarray, kernel_name: str, d_values: List[int]) -> dict:
    """Plug-in decomposition of a named kernel with variance predictions for the complete
    scheme and each balanced d.
    """
    dec = decompose(data, named_kernel(kernel_name))
    predictions = {"complete": predict_variance(dec, PairScheme.complete()).predicted}
    for d in d_values:
        predictions[f"balanced(d={d})"] = predict_variance(dec, PairScheme.balanced(d)).predicted
    return {
        "kernel": kernel_name,
        "n": dec.n,
        "r": dec.dim,
        "f0": dec.f0,
        "gamma1": dec.gamma1,
        "gamma2": dec.gamma2,
        "predictions": predictions,
    }


app = Typer(add_completion=False, help="Symmetrized M-estimators of scatter.")

dataset_path_arg = Argument(
    ..., help="Path to a dataset CSV file, one observation per row (Required)."
)
config_path_arg = Argument(
    ..., help="Path to the YAML or JSON experiment configuration (Required)."
)
header_opt = Option(
    False,
    "--header",
    help="Treat the first line of the dataset as column names.",
    show_default=True,
)
functional_opt = Option(
    "tyler",
    "--functional",
    "-f",
    help="Scatter functional. Must be one of tyler or m.",
    show_default=True,
)
nu_opt = Option(
    1.0,
    "--nu",
    help="Degrees of freedom of rho_nu for the m functional.",
    show_default=True,
)
scheme_opt = Option(
    "complete",
    "--scheme",
    "-s",
    help="Pair scheme. Must be one of complete, balanced or randomized.",
    show_default=True,
)
d_opt = Option(
    None,
    "--d",
    "-d",
    help=(
        "Number of balanced offsets or random cycles (required unless the scheme is complete). "
        "A randomized estimate averages the estimates of the d cycles."
    ),
    show_default=False,
)
seed_opt = Option(
    0,
    "--seed",
    help="Seed of the random cycles.",
    show_default=True,
)
tol_opt = Option(
    DEFAULT_TOL,
    "--tol",
    help="Tolerance of the whitened fixed-point residual.",
    show_default=True,
)
rows_opt = Option(
    "./output/rows.csv",
    "--rows",
    help="Path of the rows CSV to be written.",
    show_default=True,
)
summary_opt = Option(
    "./output/summary.json",
    "--summary",
    help="Path of the summary JSON to be written.",
    show_default=True,
)
workers_opt = Option(
    None,
    "--workers",
    "-w",
    help="Number of worker processes. Overrides the configuration.",
    show_default=False,
)
kernel_opt = Option(
    "clipped-norm",
    "--kernel",
    "-k",
    help="Kernel. Must be one of clipped-norm, outer-product, spatial-sign or tyler-influence.",
    show_default=True,
)
d_values_opt = Option(
    None,
    "--d",
    "-d",
    help="Balanced d to predict the variance for. May be repeated.",
    show_default=False,
)
n_opt = Option(..., "--n", "-n", help="Number of observations (Required).")


@app.command()
def estimate(
    dataset_path: str = dataset_path_arg,
    header: bool = header_opt,
    functional: str = functional_opt,
    nu: float = nu_opt,
    scheme: str = scheme_opt,
    d: Optional[int] = d_opt,
    seed: int = seed_opt,
    tol: float = tol_opt,
):
    """Estimate the symmetrized scatter and shape of a dataset and print them as JSON."""
    pair_scheme = build_scheme(scheme, d, seed)
    data = extract.read_dataset_csv(dataset_path, header=header)
    scatter_functional = build_functional(functional, nu, data.shape[1])
    typer.echo(load.to_json_string(estimate_dataset(data, pair_scheme, scatter_functional, tol=tol)))


@app.command()
def simulate(
    config_path: str = config_path_arg,
    rows: str = rows_opt,
    summary: str = summary_opt,
    workers: Optional[int] = workers_opt,
):
    """Run a Monte-Carlo experiment and write the rows CSV and the summary JSON."""
    config = utils.get_config(config_path=config_path)
    if workers is not None:
        config = dict(config or {}, workers=workers)
    experiment_config = ExperimentConfig.from_dict(config)
    reporter = run_experiment(config=experiment_config)
    rows_path = load.rows_to_csv(reporter.to_frame(), rows)
    summary_path = load.dict_to_json(reporter.summary(), summary)
    typer.echo(json.dumps({"rows": rows_path, "summary": summary_path}))


@app.command(name="decompose")
def decompose_command(
    dataset_path: str = dataset_path_arg,
    kernel: str = kernel_opt,
    header: bool = header_opt,
    d: Optional[List[int]] = d_values_opt,
):
    """Hoeffding decomposition of a named kernel on a dataset, printed as JSON."""
    data = extract.read_dataset_csv(dataset_path, header=header)
    try:
        named_kernel(kernel)
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="--kernel")
    typer.echo(load.to_json_string(decompose_dataset(data, kernel, list(d or []))))


@app.command()
def pairs(
    n: int = n_opt,
    d: Optional[int] = d_opt,
    scheme: str = scheme_opt,
    seed: int = seed_opt,
):
    """Print the pairs of a scheme as CSV with 1-based indices."""
    pair_scheme = build_scheme(scheme, d, seed)
    typer.echo("i,j")
    for i, j in pair_scheme.pairs(n):
        typer.echo(f"{i + 1},{j + 1}")


def _error_json(error: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": error, "message": message}) + "\n")


def cli_main(argv: Optional[List[str]] = None, prog_name: str = "symscatter") -> int:
    """Runs the CLI and returns its exit code instead of exiting.

    Exit codes: 0 on success, 2 on usage errors, 1 on runtime failures. Errors are reported as
    {"error": ..., "message": ...} JSON on stderr.

    Args:
        argv (List[str], optional): arguments without the program name. Defaults to sys.argv[1:].
        prog_name (str, optional): program name shown in usage messages. Defaults to "symscatter".

    Returns:
        int: exit code
    """
    command = typer.main.get_command(app)
    try:
        command.main(args=argv, prog_name=prog_name, standalone_mode=False)
    except click.UsageError as e:
        _error_json("UsageError", e.format_message())
        return 2
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.Abort:
        _error_json("Aborted", "Aborted.")
        return 1
    except SymScatterError as e:
        logger.error(e.message)
        _error_json(type(e).__name__, e.message)
        return 1
    except Exception as e:
        logger.error(str(e))
        _error_json(type(e).__name__, str(e))
        return 1
    return 0


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
