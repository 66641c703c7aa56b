# Copyright 2026 The bohrlab Authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""
CLI for bohrlab.

```bash
$ bohrlab run golden.conf --eps 0.05 --out runs/golden
$ bohrlab list -o json
```
"""
from __future__ import annotations

import functools
import inspect
import logging
import os
import typing as t

import click
import orjson
import tabulate

from .__about__ import __version__
from ._configuration import ExperimentConfig
from ._configuration import load_config_file
from ._experiments import dumps_json
from ._experiments import run_experiment
from ._registry import list_systems
from .exceptions import BohrLabException
from .utils import configure_logging
from .utils import get_debug_mode
from .utils import set_debug_mode
from .utils import set_quiet_mode


if t.TYPE_CHECKING:
    from ._types import ClickFunctionWrapper
    from ._types import F
    from ._types import P

    OutputLiteral = t.Literal["json", "pretty", "porcelain"]


logger = logging.getLogger(__name__)

COLUMNS = int(os.environ.get("COLUMNS", 120))

_CONTEXT_SETTINGS = {"help_option_names": ["-h", "--help"], "max_content_width": COLUMNS}


def _echo(text: t.Any, fg: str = "green", _with_style: bool = True, **attrs: t.Any) -> None:
    call = click.echo
    if _with_style:
        attrs["fg"] = fg if not get_debug_mode() else None
        call = click.secho
    call(text, **attrs)


output_option = click.option(
    "-o",
    "--output",
    type=click.Choice(["json", "pretty", "porcelain"]),
    default="pretty",
    help="Showing output type.",
    show_default=True,
    envvar="BOHRLAB_OUTPUT",
    show_envvar=True,
)


class BohrLabCommandGroup(click.Group):
    NUMBER_OF_COMMON_PARAMS = 2

    @staticmethod
    def common_params(f: F[P, t.Any]) -> ClickFunctionWrapper[..., t.Any]:
        """Add the shared --quiet and --debug flags; applied before the exception handling wrapper."""

        @click.option("-q", "--quiet", envvar="BOHRLAB_QUIET", is_flag=True, default=False, help="Suppress all output.")
        @click.option(
            "--debug", "--verbose", envvar="BOHRLAB_DEBUG", is_flag=True, default=False, help="Print out debug logs."
        )
        @functools.wraps(f)
        def wrapper(quiet: bool, debug: bool, *args: P.args, **attrs: P.kwargs) -> t.Any:
            if quiet:
                set_quiet_mode(True)
                if debug:
                    logger.warning("'--quiet' passed; ignoring '--verbose/--debug'")
            elif debug:
                set_debug_mode(True)

            configure_logging()

            return f(*args, **attrs)

        return t.cast("ClickFunctionWrapper[..., t.Any]", wrapper)

    @staticmethod
    def exception_handling(
        func: ClickFunctionWrapper[..., t.Any], group: click.Group, **attrs: t.Any
    ) -> ClickFunctionWrapper[..., t.Any]:
        command_name = attrs.get("name", func.__name__)

        @functools.wraps(func)
        def wrapper(*args: P.args, **attrs: P.kwargs) -> t.Any:
            try:
                return func(*args, **attrs)
            except BohrLabException as err:
                exc = click.ClickException(
                    click.style(f"[{group.name}] '{command_name}' failed: " + err.message, fg="red")
                )
                exc.exit_code = err.exit_code
                raise exc from err
            except KeyboardInterrupt:  # NOTE: silence KeyboardInterrupt
                pass

        return t.cast("ClickFunctionWrapper[..., t.Any]", wrapper)

    def command(self, *args: t.Any, **attrs: t.Any) -> F[[t.Callable[P, t.Any]], click.Command]:
        """Override the default 'cli.command' so that every command is wrapped with the common parameters
        and the exception handling.
        """
        if "context_settings" not in attrs:
            attrs["context_settings"] = {}
        if "max_content_width" not in attrs["context_settings"]:
            attrs["context_settings"]["max_content_width"] = 120

        def wrapper(f: F[P, t.Any]) -> click.Command:
            name = f.__name__.lower().replace("_", "-")
            attrs.setdefault("help", inspect.getdoc(f))
            attrs.setdefault("name", name)

            wrapped = self.common_params(f)
            wrapped = self.exception_handling(wrapped, self, **attrs)

            # move common parameters to end of the parameters list
            wrapped.__click_params__ = (
                wrapped.__click_params__[-self.NUMBER_OF_COMMON_PARAMS :]
                + wrapped.__click_params__[: -self.NUMBER_OF_COMMON_PARAMS]
            )
            return super(BohrLabCommandGroup, self).command(*args, **attrs)(wrapped)

        return t.cast("F[[t.Callable[..., t.Any]], click.Command]", wrapper)


@click.group(cls=BohrLabCommandGroup, context_settings=_CONTEXT_SETTINGS, name="bohrlab")
@click.version_option(__version__, "--version", "-v")
def cli():
    """
    \b
    Numerical lab for Bohr almost periodic motions of abelian semigroups.

    \b
    Certify almost periodicity on finite windows, build orbit-closure semigroups,
    solve Haar measures of finite tables and measure Følner averages.
    """


@cli.command(name="run")
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@ExperimentConfig.to_click_options
@output_option
def run(config: str, output: OutputLiteral, **overrides: t.Any):
    """Run the experiment described by CONFIG.

    \b
    Every config key can be overridden on the command line, and through
    BOHRLAB_<KEY> environment variables (the config file wins over those).

    \b
    ```bash
    $ bohrlab run golden.conf --eps 0.05 --seed 7 --out runs/golden
    ```
    """
    experiment_config = ExperimentConfig.model_construct_env(load_config_file(config), **overrides)
    report = run_experiment(experiment_config)

    if output == "porcelain":
        set_quiet_mode(True)
        _echo(report.out, _with_style=False)
    elif output == "json":
        payload = {**report.to_json(), "timings": report.timings, "out": report.out}
        _echo(dumps_json(payload).decode(), _with_style=False)
    else:
        _echo(f"'{report.experiment}' finished in {report.timings['total_seconds']:.2f}s.")
        for key, value in _headline(report.summary):
            _echo(f"  {key}: {value}", fg="white")
        _echo(f"Artifacts written to '{report.out}': {', '.join([*report.manifest, 'report.json'])}", fg="blue")
    return report


def _headline(summary: dict[str, t.Any]) -> t.Iterator[tuple[str, t.Any]]:
    # scalar entries only; series live in the CSVs
    for key in sorted(summary):
        value = summary[key]
        if isinstance(value, (str, int, float, bool)) or value is None:
            yield key, value


@cli.command(name="list")
@output_option
def list_builtins(output: OutputLiteral):
    """List the built-in semigroups, spaces, actions, Følner kinds and test functions."""
    rows = list_systems()
    if output == "json":
        payload = [{"kind": kind, "tag": tag, "description": description} for kind, tag, description in rows]
        _echo(orjson.dumps(payload, option=orjson.OPT_INDENT_2).decode(), _with_style=False)
    elif output == "porcelain":
        for kind, tag, _ in rows:
            _echo(f"{kind}\t{tag}", _with_style=False)
    else:
        _echo(tabulate.tabulate(rows, headers=["kind", "tag", "description"], tablefmt="simple"), fg="white")
    return rows


if __name__ == "__main__":
    cli()
