import click

from blowup_lab.commands import (
    accept,
    calibrate,
    kernel_check,
    lifespan_scan,
    schedule,
    sequence_check,
    simulate,
)
from blowup_lab.core.project_config import ProjectInfo


@click.group(invoke_without_command=True)
@click.version_option(version=ProjectInfo.VERSION, prog_name=ProjectInfo.NAME)
@click.pass_context
def cli(ctx: click.Context) -> None:
    """Blowup Lab CLI 工具：縮小輻射邊界上的熱方程式爆破數值實驗"""
    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())


# 註冊子命令
cli.add_command(simulate)
cli.add_command(kernel_check)
cli.add_command(calibrate)
cli.add_command(schedule)
cli.add_command(lifespan_scan)
cli.add_command(sequence_check)
cli.add_command(accept)


if __name__ == "__main__":  # pragma: no cover
    cli()
