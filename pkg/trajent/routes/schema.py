import json

import click
from pydantic.json_schema import models_json_schema

from trajent.schemas.report import ErrorReport, OutputReport


def output_json_schema() -> dict:
    """Schema of stdout under --format json: a report or, on failure, an error."""
    _, schema = models_json_schema(
        [(OutputReport, "validation"), (ErrorReport, "validation")],
        title="trajent JSON output",
    )
    schema["oneOf"] = [
        {"$ref": "#/$defs/OutputReport"},
        {"$ref": "#/$defs/ErrorReport"},
    ]
    return schema


@click.command("schema")
def schema():
    """Print the JSON Schema of the --format json output."""
    click.echo(json.dumps(output_json_schema(), indent=2))
