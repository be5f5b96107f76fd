from pathlib import Path
from typing import Optional

import click

from trajent.handlers import conditional as cond_handler
from trajent.handlers import linalg_absorb as absorb_handler
from trajent.schemas.report import OutputReport
from trajent.utils.chain_io import load_chain
from trajent.utils.cli import Output, chain_argument, output_options, summary


@click.command("alpha")
@chain_argument
@click.option("--from", "source", required=True, help="Source state label.")
@click.option("--via", "through", required=True, help="Intermediate state label.")
@click.option("--to", "destination", required=True, help="Destination state label.")
@output_options
def alpha(
    chain_file: Path,
    input_format: Optional[str],
    source: str,
    through: str,
    destination: str,
    out: Output,
):
    """Probability that the walk from --from visits --via before --to."""
    chain = load_chain(chain_file, input_format)
    absorption = absorb_handler.absorption_probabilities(
        chain, through, destination, source
    )
    value = absorption.alpha(chain.index_of(source))
    binary = cond_handler.bernoulli_entropy(value)

    out.line(f"alpha = {out.number(value)}")
    out.line(f"h(alpha) = {out.number(binary)} bits")
    out.emit(
        OutputReport(
            command="alpha",
            chain=summary(chain, chain_file),
            query={"source": source, "via": through, "destination": destination},
            results={"alpha": value, "binary_entropy": binary},
            diagnostics={"warnings": list(absorption.warnings)},
            precision=out.precision,
        )
    )
