"""Command-line entry point."""

import logging
import sys
from typing import Annotated, Optional, Sequence, Union

import tyro
from pydantic import ValidationError

from .cli.hands import RetrieveHands
from .cli.metrics import Metrics
from .cli.pipeline import Pipeline
from .cli.plot import PlotDistribute, PlotExtract, PlotGenerate, PlotRevise
from .cli.revise import Revise
from .cli.scene import SceneSynth
from .cli.sync import SyncAlign, SyncBlend
from .config import settings
from .errors import EXIT_USAGE, MotionStageError, exit_code

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _sub(cls, name: str):
    return Annotated[cls, tyro.conf.subcommand(name, prefix_name=False)]


Command = Union[
    _sub(SceneSynth, "scene-synth"),
    _sub(Metrics, "metrics"),
    _sub(SyncBlend, "sync-blend"),
    _sub(SyncAlign, "sync-align"),
    _sub(Revise, "revise"),
    _sub(RetrieveHands, "retrieve-hands"),
    _sub(PlotGenerate, "plot-generate"),
    _sub(PlotExtract, "plot-extract"),
    _sub(PlotRevise, "plot-revise"),
    _sub(PlotDistribute, "plot-distribute"),
    _sub(Pipeline, "pipeline"),
]

# "sync blend" and "plot generate" are accepted as spelled with a space.
GROUPS = ("sync", "plot")


def configure_logging(level: str = "INFO") -> None:
    """Single stream handler on the ``motionstage`` logger."""
    root = logging.getLogger("motionstage")
    root.handlers.clear()
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    root.setLevel(level.upper())
    root.propagate = False


def _normalize(args: Sequence[str]) -> list:
    args = list(args)
    if len(args) >= 2 and args[0] in GROUPS and not args[1].startswith("-"):
        args = [f"{args[0]}-{args[1]}"] + args[2:]
    return args


def _pop_log_level(args: list) -> str:
    level = settings.log_level
    for i, arg in enumerate(args):
        if arg == "--log-level" and i + 1 < len(args):
            level = args[i + 1]
            del args[i : i + 2]
            break
        if arg.startswith("--log-level="):
            level = arg.split("=", 1)[1]
            del args[i]
            break
    return level


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv``, run the chosen subcommand and return its exit status."""
    args = _normalize(sys.argv[1:] if argv is None else argv)
    configure_logging(_pop_log_level(args))
    try:
        command = tyro.cli(Command, args=args, prog="motionstage")
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return command.run()
    except MotionStageError as exc:
        logger.error("%s: %s", exc.code, exc.detail)
        return exit_code(exc)
    except ValidationError as exc:
        logger.error("invalid input: %s", exc)
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
