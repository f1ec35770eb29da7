#!/usr/bin/env python3
"""
The banachsvd command line tool.

Data (JSON) goes to stdout, logs and progress bars go to stderr. Exit codes: 0 on success, 1 when
a verified property fails, 2 on malformed input, 3 on a numerical failure.
"""
import contextlib
import logging
import sys
import typing

import click
import numpy as np
import tqdm

from banachsvd import config as md_config
from banachsvd import eigen as md_eigen
from banachsvd import serialization as md_serialization
from banachsvd import verify as md_verify
from banachsvd.deflation import construction as md_construction
from banachsvd.exc import ConfigError, DecompositionException, DimensionMismatchError, \
    IndexRangeError, NormSpecError, SerializationError, UnsupportedOracleError
from banachsvd.operators import oracle as md_oracle
from banachsvd.operators import power as md_power
from banachsvd.utils import make_rng

logger = logging.getLogger("banachsvd.cli")

EXIT_PROPERTY_FAILURE = 1
EXIT_BAD_INPUT = 2
EXIT_NUMERICAL_FAILURE = 3


class TqdmLoggingHandler(logging.Handler):
    """
    A logging handler that writes through tqdm, so that records do not break progress bars.
    """

    def emit(self, record):
        try:
            msg = self.format(record)
            tqdm.tqdm.write(msg, file=sys.stderr)
            self.flush()
        except (KeyboardInterrupt, SystemExit):
            raise
        except Exception:
            self.handleError(record)


def setup_logging(verbosity: int) -> logging.Handler:
    """
    Routes the library's logs to stderr; each ``-v`` lowers the level one step from WARNING.
    """
    handler = TqdmLoggingHandler()
    handler.setFormatter(logging.Formatter("[%(levelname)s] %(name)s -> %(message)s"))
    root = logging.getLogger("banachsvd")
    for old in [h for h in root.handlers if isinstance(h, TqdmLoggingHandler)]:
        root.removeHandler(old)

    root.addHandler(handler)
    root.setLevel([logging.WARNING, logging.INFO, logging.DEBUG][min(verbosity, 2)])
    return handler


#: Library errors caused by the input documents, options or config values.
INPUT_ERRORS = (ConfigError, DimensionMismatchError, IndexRangeError, NormSpecError,
                SerializationError)


@contextlib.contextmanager
def exit_codes():
    """
    Turns library exceptions into exit codes.
    """
    ctx = click.get_current_context()
    try:
        yield
    except INPUT_ERRORS as e:
        click.secho("Invalid input: {}".format(e), fg="red", err=True)
        ctx.exit(EXIT_BAD_INPUT)
    except DecompositionException as e:
        click.secho("Numerical failure: {}: {}".format(type(e).__name__, e), fg="red", err=True)
        ctx.exit(EXIT_NUMERICAL_FAILURE)
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as e:
        # raised by numpy or the solvers in the middle of a computation
        logger.debug("Computation failed", exc_info=True)
        click.secho("Numerical failure: {}: {}".format(type(e).__name__, e), fg="red", err=True)
        ctx.exit(EXIT_NUMERICAL_FAILURE)


def read_document(path: str) -> typing.Any:
    with open(path, encoding="utf-8") as f:
        return md_serialization.loads(f.read())


def build_config(config_path: typing.Optional[str], **overrides) -> 'md_config.DecompositionConfig':
    """
    Builds the config from the optional ``--config`` file, then applies the flags that were set.
    """
    data = read_document(config_path) if config_path else {}
    if not isinstance(data, dict):
        raise SerializationError("The config file must hold a JSON object")

    return md_config.DecompositionConfig.from_mapping(data).merged(**overrides)


def config_options(func):
    """
    Adds the options shared by every command that computes something.
    """
    options = [
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                     default=None, help="A JSON file of config values; flags win over it."),
        click.option("--restarts", type=int, default=None, help="Random starts per norm."),
        click.option("--tol", type=float, default=None, help="The main tolerance."),
        click.option("--rank-tol", type=float, default=None, help="The relative rank cutoff."),
        click.option("--seed", type=int, default=None, help="The seed of the random starts."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


@click.group()
@click.option("-v", "--verbose", count=True, help="Log more (repeatable).")
def cli(verbose: int):
    setup_logging(verbose)


@cli.command()
@click.argument("operator", type=click.Path(exists=True, dir_okay=False))
@click.option("--eigen", is_flag=True, help="Run the eigen-deflation (square operators).")
@click.option("--progress", is_flag=True, help="Show a progress bar on stderr.")
@config_options
def decompose(operator: str, eigen: bool, progress: bool, config_path: str, restarts: int,
              tol: float, rank_tol: float, seed: int):
    """
    Decomposes an operator and prints the decomposition.
    """
    with exit_codes():
        cfg = build_config(config_path, restarts=restarts, tol=tol, rank_tol=rank_tol, seed=seed)
        T = md_serialization.load_operator(read_document(operator))
        if eigen:
            D = md_eigen.eigen_deflate(T, cfg, progress=progress)
        else:
            D = md_construction.run_deflation(T, cfg, progress=progress)

        click.echo(md_serialization.dumps(md_serialization.dump_decomposition(D)))


@cli.command()
@click.argument("decomposition", type=click.Path(exists=True, dir_okay=False))
@click.argument("operator", type=click.Path(exists=True, dir_okay=False))
@config_options
def verify(decomposition: str, operator: str, config_path: str, restarts: int, tol: float,
           rank_tol: float, seed: int):
    """
    Checks a decomposition of an operator and prints the report.
    """
    with exit_codes():
        cfg = build_config(config_path, restarts=restarts, tol=tol, rank_tol=rank_tol, seed=seed)
        D = md_serialization.load_decomposition(read_document(decomposition))
        T = md_serialization.load_operator(read_document(operator))
        report = md_verify.verify_decomposition(D, T, cfg)
        click.echo(md_serialization.dumps(report.to_dict()))

    if not report.passed:
        click.secho("{} of {} properties failed".format(len(report.failures),
                                                        len(report.results)), fg="red", err=True)
        click.get_current_context().exit(EXIT_PROPERTY_FAILURE)


def parse_alpha(ctx, param, value: typing.Optional[str]) -> typing.Optional[typing.List[float]]:
    if value is None:
        return None

    try:
        return [float(part) for part in value.split(",")]
    except ValueError:
        raise click.BadParameter("alpha must be a comma separated list of numbers")


@cli.command()
@click.option("--d", "d", type=int, default=4, help="The dimension.")
@click.option("--k", "k", type=int, default=1, help="The split index of the mixed norm.")
@click.option("--alpha", callback=parse_alpha, default=None,
              help="The diagonal, comma separated; random (from --seed) if omitted.")
@config_options
def example(d: int, k: int, alpha: typing.Optional[typing.List[float]], config_path: str,
            restarts: int, tol: float, rank_tol: float, seed: int):
    """
    Decomposes the diagonal operator on the (k,1) mixed norm space and prints the result next to
    its closed form.
    """
    if d < 2 or not 1 <= k < d:
        raise click.BadParameter("need d >= 2 and 1 <= k < d", param_hint="--d/--k")

    if alpha is not None and len(alpha) != d:
        raise click.BadParameter("{} values given for d={}".format(len(alpha), d),
                                 param_hint="--alpha")

    with exit_codes():
        cfg = build_config(config_path, restarts=restarts, tol=tol, rank_tol=rank_tol, seed=seed)
        if alpha is None:
            rng = make_rng(cfg.seed)
            # distinct magnitudes with random signs
            magnitudes = rng.permutation(np.linspace(1.0, 1.0 / d, d))
            alpha = (magnitudes * rng.choice([-1.0, 1.0], size=d)).tolist()

        T = md_eigen.make_mixed_diagonal(alpha, k)
        D = md_eigen.eigen_deflate(T, cfg)
        report = md_verify.verify_decomposition(D, T, cfg)
        document = {
            "alpha": alpha,
            "k": k,
            "decomposition": md_serialization.dump_decomposition(D),
            "ground_truth": md_eigen.example_ground_truth(alpha),
            "verification": report.to_dict(),
        }
        click.echo(md_serialization.dumps(document))


@cli.command()
@click.argument("operator", type=click.Path(exists=True, dir_okay=False))
@click.option("--oracle", is_flag=True, help="Also compute the reference value.")
@config_options
def norm(operator: str, oracle: bool, config_path: str, restarts: int, tol: float,
         rank_tol: float, seed: int):
    """
    Computes the norm of an operator and a vector attaining it.
    """
    with exit_codes():
        cfg = build_config(config_path, restarts=restarts, tol=tol, rank_tol=rank_tol, seed=seed)
        T = md_serialization.load_operator(read_document(operator))
        result = md_power.op_norm_power(T, cfg=cfg)
        reference = None
        if oracle:
            try:
                reference = md_oracle.op_norm_oracle(T)
            except UnsupportedOracleError as e:
                logger.warning("No oracle: {}".format(e))

        document = {
            "value": result.value,
            "certificate_gap": result.certificate_gap,
            "maximizer": result.maximizer.entries,
            "restarts_used": result.restarts_used,
            "oracle": reference,
        }
        click.echo(md_serialization.dumps(document))


if __name__ == '__main__':
    cli()
