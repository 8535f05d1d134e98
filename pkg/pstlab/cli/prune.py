"""`pstlab prune` — drop the extremal eigenvalue pair and resynthesize."""

from __future__ import annotations

import argparse
from pathlib import Path

import structlog

from pstlab.cli.common import emit_chain
from pstlab.services import files
from pstlab.services.synthesis import prune_extremal_pair, rescale_to_unit_max

logger = structlog.get_logger()


def _prune(args: argparse.Namespace) -> None:
    chain = files.read_chain(args.chain)
    pruned, predicted = prune_extremal_pair(chain)
    logger.info(
        "prune.done",
        n=pruned.n,
        j1_sq=pruned.j1**2,
        predicted_j1_sq=predicted,
        previous_j1_sq=chain.j1**2,
    )
    emit_chain(rescale_to_unit_max(pruned) if args.rescale else pruned, args.out)


def register(subparsers: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("prune", parents=[parent], help="remove ±λ_max and resynthesize")
    p.add_argument("--chain", type=Path, required=True)
    p.set_defaults(handler=_prune)
