from pathlib import Path
from typing import Optional

import click

from trajent.config.settings import get_settings
from trajent.handlers import oracle as oracle_handler
from trajent.handlers import trajectory_entropy as entropy_handler
from trajent.schemas.chain import MarkovChain
from trajent.schemas.report import OutputReport
from trajent.utils.chain_io import load_chain
from trajent.utils.cli import (
    Output,
    chain_argument,
    oracle_config,
    output_options,
    summary,
)
from trajent.utils.errors import InputError


def oracle_check(chain: MarkovChain, s: int, d: int, closed_form: float) -> dict:
    """Enumerate T_sd and compare its entropy with the closed form."""
    result = oracle_handler.enumerate_trajectories(chain, s, d, oracle_config())
    value = oracle_handler.oracle_entropy(result)
    return {
        "oracle_entropy": value,
        "difference": value - closed_form,
        "n_trajectories": len(result.trajectories),
        "covered_mass": result.covered_mass,
        "lost_mass": result.lost_mass,
    }


@click.command("entropy")
@chain_argument
@click.option("--from", "source", help="Source state label.")
@click.option("--to", "destination", help="Destination state label.")
@click.option(
    "--matrix", "full_matrix", is_flag=True, help="Print all N x N entropies."
)
@click.option("--oracle", is_flag=True, help="Cross-check by enumeration.")
@output_options
def entropy(
    chain_file: Path,
    input_format: Optional[str],
    source: Optional[str],
    destination: Optional[str],
    full_matrix: bool,
    oracle: bool,
    out: Output,
):
    """
    Entropy in bits of the trajectory from --from to --to.
    """
    chain = load_chain(chain_file, input_format)

    if full_matrix:
        matrix = entropy_handler.entropy_matrix(
            chain, threads=get_settings().worker_threads
        )
        out.table(
            "H (bits), row = source, column = destination",
            ["", *chain.labels],
            [
                [label, *matrix.values[i]]
                for i, label in enumerate(chain.labels)
            ],
        )
        out.emit(
            OutputReport(
                command="entropy",
                chain=summary(chain, chain_file),
                query={"matrix": True},
                results={
                    "labels": list(chain.labels),
                    "matrix": matrix.values.tolist(),
                },
                precision=out.precision,
            )
        )
        return

    if source is None or destination is None:
        raise InputError("--from and --to are required unless --matrix is given")
    s, d = chain.index_of(source), chain.index_of(destination)
    value = entropy_handler.trajectory_entropy(chain, s, d)
    out.line(f"H = {out.number(value)} bits")

    diagnostics = {}
    if oracle:
        diagnostics = oracle_check(chain, s, d, value)
        out.line(
            f"oracle H = {out.number(diagnostics['oracle_entropy'])} bits over "
            f"{diagnostics['n_trajectories']} trajectories"
        )
    out.emit(
        OutputReport(
            command="entropy",
            chain=summary(chain, chain_file),
            query={"source": source, "destination": destination},
            results={"entropy": value},
            diagnostics=diagnostics,
            precision=out.precision,
        )
    )
