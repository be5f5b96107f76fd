from pathlib import Path
from typing import Optional

import click

from trajent.handlers import conditional as cond_handler
from trajent.handlers import oracle as oracle_handler
from trajent.schemas.entropy import CondQuery
from trajent.schemas.report import OutputReport
from trajent.utils.chain_io import load_chain
from trajent.utils.cli import (
    Output,
    chain_argument,
    oracle_config,
    output_options,
    split_labels,
    summary,
)
from trajent.utils.errors import InputError


@click.command("cond")
@chain_argument
@click.option("--from", "source", required=True, help="Source state label.")
@click.option("--to", "destination", required=True, help="Destination state label.")
@click.option("--via", help="Comma-separated intermediate states, in order.")
@click.option(
    "--set",
    "unordered",
    help="Comma-separated states visited in any order (enumeration only).",
)
@click.option("--profile", is_flag=True, help="Entropy after each revealed prefix.")
@click.option("--oracle", is_flag=True, help="Cross-check by enumeration.")
@output_options
def cond(
    chain_file: Path,
    input_format: Optional[str],
    source: str,
    destination: str,
    via: Optional[str],
    unordered: Optional[str],
    profile: bool,
    oracle: bool,
    out: Output,
):
    """
    Entropy of the trajectory from --from to --to given that it passes
    through the --via states in order, or through every --set state.
    """
    chain = load_chain(chain_file, input_format)
    if via and unordered:
        raise InputError("--via and --set cannot be combined")
    s, d = chain.index_of(source), chain.index_of(destination)

    if unordered is not None:
        members = [chain.index_of(label) for label in split_labels(unordered)]
        result = oracle_handler.enumerate_trajectories(chain, s, d, oracle_config())
        value = oracle_handler.oracle_conditional_set(result, members)
        out.line(f"H = {out.number(value)} bits (unordered set, by enumeration)")
        out.emit(
            OutputReport(
                command="cond",
                chain=summary(chain, chain_file),
                query={
                    "source": source,
                    "destination": destination,
                    "set": split_labels(unordered),
                },
                results={"entropy": value},
                diagnostics={
                    "n_trajectories": len(result.trajectories),
                    "covered_mass": result.covered_mass,
                    "truncated": result.truncated,
                },
                precision=out.precision,
            )
        )
        return

    query = CondQuery(
        source=chain.state(s),
        destination=chain.state(d),
        via=tuple(chain.state(label) for label in split_labels(via)),
    )
    result = cond_handler.entropy_via_sequence(chain, query)
    gain = cond_handler.revealed_information(chain, query, solved=result)

    out.line(f"H = {out.number(result.entropy)} bits")
    stops = [source, *(u.label for u in query.via), destination]
    out.table(
        "legs",
        ["leg", "from", "to", "H (bits)", "P(hit destination first)"],
        [
            [
                str(k),
                stops[k],
                stops[k + 1],
                h,
                result.alphas[k] if k < len(result.alphas) else "-",
            ]
            for k, h in enumerate(result.per_leg)
        ],
    )
    out.line(f"probability of the sequence = {out.number(result.probability)}")
    out.line(f"information gain = {out.number(gain)} bits")

    diagnostics: dict = {
        "per_leg": result.per_leg,
        "alphas": result.alphas,
        "probability": result.probability,
        "warnings": list(result.warnings),
    }
    if profile:
        steps = cond_handler.predictability_profile(chain, query)
        diagnostics["profile"] = [step.entropy for step in steps]
        out.table(
            "predictability profile",
            ["revealed", "H (bits)"],
            [
                [",".join(u.label for u in step.query.via) or "-", step.entropy]
                for step in steps
            ],
        )
    if oracle:
        enumeration = oracle_handler.enumerate_trajectories(
            chain, s, d, oracle_config()
        )
        value = oracle_handler.oracle_conditional_sequence(
            enumeration, [u.index for u in query.via]
        )
        diagnostics["oracle_entropy"] = value
        diagnostics["difference"] = value - result.entropy
        out.line(f"oracle H = {out.number(value)} bits")

    out.emit(
        OutputReport(
            command="cond",
            chain=summary(chain, chain_file),
            query={
                "source": source,
                "destination": destination,
                "via": [u.label for u in query.via],
            },
            results={"entropy": result.entropy, "information_gain": gain},
            diagnostics=diagnostics,
            precision=out.precision,
        )
    )
