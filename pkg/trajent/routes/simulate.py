from pathlib import Path
from typing import Optional

import click
import numpy as np

from trajent.config.settings import get_settings
from trajent.handlers import linalg_absorb as absorb_handler
from trajent.handlers import oracle as oracle_handler
from trajent.schemas.chain import MarkovChain
from trajent.schemas.report import OutputReport
from trajent.utils.chain_io import load_chain
from trajent.utils.cli import Output, chain_argument, output_options, summary
from trajent.utils.errors import InfeasibleQuery


def closed_form_visits(chain: MarkovChain, s: int, d: int) -> Optional[np.ndarray]:
    """Expected visits from s before d, indexed like the chain; None if unavailable."""
    if s == d:
        return None
    try:
        sub, kept = absorb_handler.restrict_to_reaching(chain, d)
        positions = [state.index for state in kept]
        counts = absorb_handler.expected_visits(sub, positions.index(d))
        row = counts.row(positions.index(s))
    except (InfeasibleQuery, ValueError):
        return None
    visits = np.zeros(chain.n_states)
    for position, state in enumerate(counts.states):
        visits[kept[state.index].index] = row[position]
    return visits


@click.command("simulate")
@chain_argument
@click.option("--from", "source", required=True, help="Source state label.")
@click.option("--to", "destination", required=True, help="Destination state label.")
@click.option(
    "--walks", type=click.IntRange(min=1), default=100_000, show_default=True
)
@click.option(
    "--seed", type=int, default=None, help="Default from TRAJENT_SIMULATION_SEED."
)
@click.option(
    "--max-steps", type=click.IntRange(min=1), default=10_000, show_default=True
)
@output_options
def simulate(
    chain_file: Path,
    input_format: Optional[str],
    source: str,
    destination: str,
    walks: int,
    seed: Optional[int],
    max_steps: int,
    out: Output,
):
    """Monte-Carlo visit counts and hit fractions for walks from --from to --to."""
    chain = load_chain(chain_file, input_format)
    seed = get_settings().SIMULATION_SEED if seed is None else seed
    stats = oracle_handler.simulate_walks(
        chain, source, destination, walks, rng_seed=seed, max_steps=max_steps
    )
    expected = closed_form_visits(chain, stats.source, stats.destination)

    out.table(
        f"{walks} walks, seed {seed}",
        ["state", "visits", "stderr", "expected", "hit", "stderr"],
        [
            [
                label,
                stats.mean_visits[i],
                stats.visits_stderr[i],
                None if expected is None else expected[i],
                stats.hit_fraction[i],
                stats.hit_stderr[i],
            ]
            for i, label in enumerate(chain.labels)
        ],
    )
    if stats.truncated_fraction:
        out.line(f"{stats.truncated_fraction:.2%} of walks hit the step limit")

    out.emit(
        OutputReport(
            command="simulate",
            chain=summary(chain, chain_file),
            query={
                "source": source,
                "destination": destination,
                "walks": walks,
                "seed": seed,
                "max_steps": max_steps,
            },
            results={
                "mean_visits": stats.mean_visits.tolist(),
                "visits_stderr": stats.visits_stderr.tolist(),
                "hit_fraction": stats.hit_fraction.tolist(),
                "hit_stderr": stats.hit_stderr.tolist(),
            },
            diagnostics={
                "truncated_fraction": stats.truncated_fraction,
                "expected_visits": None if expected is None else expected.tolist(),
            },
            precision=out.precision,
        )
    )
