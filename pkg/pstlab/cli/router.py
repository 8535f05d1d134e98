"""CLI router — aggregates all command modules."""

from __future__ import annotations

import argparse

from pstlab import __version__
from pstlab.cli import bounds, check, encode, evolve, perturb, prune, revival, synth
from pstlab.cli.common import common_options

COMMAND_MODULES = (synth, check, evolve, bounds, prune, revival, encode, perturb)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pstlab",
        description="Design and analysis of timing-insensitive perfect-state-transfer chains.",
    )
    parser.add_argument("--version", action="version", version=f"pstlab {__version__}")
    parser.add_argument("--log-level", default=None, help="debug, info, warning or error")
    parser.add_argument("--log-format", choices=["console", "json"], default=None)

    subparsers = parser.add_subparsers(dest="command", required=True)
    parent = common_options()
    for module in COMMAND_MODULES:
        module.register(subparsers, parent)
    return parser
