import logging
from pathlib import Path
from typing import Optional

import click

from trajent.handlers import chain_core
from trajent.handlers import trajectory_entropy as entropy_handler
from trajent.schemas.report import OutputReport
from trajent.utils.chain_io import load_chain
from trajent.utils.cli import Output, chain_argument, output_options, summary
from trajent.utils.errors import InfeasibleQuery

log = logging.getLogger(__name__)


@click.command("inspect")
@chain_argument
@click.option(
    "--check",
    is_flag=True,
    help="Verify the first-step recursion of every entropy column.",
)
@output_options
def inspect(chain_file: Path, input_format: Optional[str], check: bool, out: Output):
    """Structure and local entropies of a chain."""
    chain = load_chain(chain_file, input_format)
    local = chain_core.local_entropies(chain)
    components = chain_core.strongly_connected_components(chain)
    irreducible = len(components) == 1

    results: dict = {
        "n_states": chain.n_states,
        "local_entropies": local.tolist(),
        "irreducible": irreducible,
        "components": [[state.label for state in comp] for comp in components],
    }
    out.line(f"{chain.n_states} states")

    if irreducible:
        pi = chain_core.stationary_distribution(chain)
        rate = chain_core.entropy_rate(chain)
        results["period"] = chain_core.period(chain)
        results["stationary_distribution"] = pi.probs.tolist()
        results["entropy_rate"] = rate
        out.table(
            None,
            ["state", "H(P_i.) bits", "stationary"],
            [[label, local[i], pi.probs[i]] for i, label in enumerate(chain.labels)],
        )
        out.line(f"entropy rate = {out.number(rate)} bits/step")
        out.line(f"period = {results['period']}")
    else:
        out.table(
            None,
            ["state", "H(P_i.) bits"],
            [[label, local[i]] for i, label in enumerate(chain.labels)],
        )
        out.line("not irreducible: no unique stationary distribution")
        out.line(
            "components: "
            + " | ".join(" ".join(state.label for state in comp) for comp in components)
        )

    diagnostics: dict = {}
    if check:
        residuals = {}
        for d in chain.states:
            try:
                residuals[d.label] = entropy_handler.first_step_residual(chain, d.index)
            except InfeasibleQuery as exc:
                log.debug("skipping destination %s: %s", d.label, exc.detail)
        worst = max(residuals.values(), default=0.0)
        diagnostics["first_step_residual"] = residuals
        out.line(f"largest first-step residual = {worst:.3e}")

    out.emit(
        OutputReport(
            command="inspect",
            chain=summary(chain, chain_file),
            results=results,
            diagnostics=diagnostics,
            precision=out.precision,
        )
    )
