import click

from trajent.config.settings import get_settings
from trajent.routes import alpha as alpha_router
from trajent.routes import cond as cond_router
from trajent.routes import entropy as entropy_router
from trajent.routes import inspect as inspect_router
from trajent.routes import schema as schema_router
from trajent.routes import simulate as simulate_router

settings = get_settings()


@click.group(
    name=settings.PROJECT_NAME,
    help="Entropy of Markov chain trajectories between fixed endpoints.",
)
@click.version_option(package_name="trajent")
def cli():
    pass


cli.add_command(entropy_router.entropy)
cli.add_command(cond_router.cond)
cli.add_command(alpha_router.alpha)
cli.add_command(inspect_router.inspect)
cli.add_command(simulate_router.simulate)
cli.add_command(schema_router.schema)


if __name__ == "__main__":
    cli()
