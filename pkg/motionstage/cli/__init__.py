"""Command-line subcommands, one module per area."""

from . import hands, metrics, pipeline, plot, revise, scene, sync
