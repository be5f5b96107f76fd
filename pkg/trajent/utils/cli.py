"""Options and output handling shared by every subcommand."""

import functools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional

import click
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from trajent.config.logging import configure_logging
from trajent.config.settings import get_settings
from trajent.schemas.chain import MarkovChain
from trajent.schemas.report import (
    ChainSummary,
    ErrorDetail,
    ErrorReport,
    OutputReport,
)
from trajent.schemas.trajectory import OracleConfig
from trajent.utils.errors import InputError, TrajentError


@dataclass
class Output:
    """How a command prints its results: text or JSON, at a display precision."""

    fmt: str = "text"
    precision: int = 4
    console: Console = field(default_factory=Console)

    @property
    def json(self) -> bool:
        return self.fmt == "json"

    def number(self, value: Optional[float]) -> str:
        if value is None:
            return "-"
        return f"{value:.{self.precision}f}"

    def line(self, text: str = "") -> None:
        if not self.json:
            click.echo(text)

    def table(
        self, title: Optional[str], columns: Iterable[str], rows: Iterable[Iterable]
    ) -> None:
        if self.json:
            return
        table = Table(title=title)
        for column in columns:
            table.add_column(column, justify="right")
        for row in rows:
            table.add_row(
                *(v if isinstance(v, str) else self.number(v) for v in row)
            )
        self.console.print(table)

    def emit(self, report: OutputReport) -> None:
        if self.json:
            click.echo(report.model_dump_json(indent=2))

    def fail(self, exc: TrajentError) -> None:
        click.echo(f"error: {exc.reason}: {exc.detail}", err=True)
        if self.json:
            report = ErrorReport(error=ErrorDetail(**exc.to_dict()))
            click.echo(report.model_dump_json())
        raise click.exceptions.Exit(exc.exit_code)


def output_options(command: Callable) -> Callable:
    """
    Add ``--format``, ``--precision`` and ``--verbose`` to a command and hand
    it an :class:`Output` as ``out``. Domain errors raised by the command are
    printed and turned into the matching exit code.
    """

    @click.option(
        "--format",
        "fmt",
        type=click.Choice(["text", "json"]),
        default="text",
        show_default=True,
        help="Output format.",
    )
    @click.option(
        "--precision",
        type=click.IntRange(0, 17),
        default=None,
        help="Decimals in text output (default from TRAJENT_PRECISION).",
    )
    @click.option("--verbose", "-v", is_flag=True, help="Log debug messages.")
    @functools.wraps(command)
    def wrapper(*args, fmt: str, precision: Optional[int], verbose: bool, **kwargs):
        settings = get_settings()
        configure_logging("DEBUG" if verbose else settings.LOG_LEVEL)
        out = Output(
            fmt=fmt,
            precision=settings.PRECISION if precision is None else precision,
        )
        try:
            return command(*args, out=out, **kwargs)
        except TrajentError as exc:
            out.fail(exc)
        except ValidationError as exc:
            out.fail(InputError(str(exc.errors()[0]["msg"])))

    return wrapper


def chain_argument(command: Callable) -> Callable:
    """Add the CHAIN_FILE argument and ``--input-format``; pass ``chain_file``."""
    command = click.option(
        "--input-format",
        type=click.Choice(["json", "tsv"]),
        default=None,
        help="Chain file format (default: from the extension).",
    )(command)
    return click.argument(
        "chain_file", type=click.Path(dir_okay=False, path_type=Path)
    )(command)


def summary(chain: MarkovChain, chain_file: Path) -> ChainSummary:
    return ChainSummary(
        path=str(chain_file), n_states=chain.n_states, labels=chain.labels
    )


def oracle_config() -> OracleConfig:
    settings = get_settings()
    return OracleConfig(
        residual_mass_bound=settings.ORACLE_RESIDUAL_MASS,
        max_paths=settings.ORACLE_MAX_PATHS,
    )


def split_labels(value: Optional[str]) -> list[str]:
    """``"3,2"`` -> ``["3", "2"]``; empty or missing gives no labels."""
    if not value:
        return []
    return [label.strip() for label in value.split(",") if label.strip()]
