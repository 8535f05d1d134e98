"""`pstlab check` — PST verdict for a chain file or validity of a spectrum file."""

from __future__ import annotations

import argparse
from pathlib import Path

from pstlab.cli.common import emit_json
from pstlab.core.exceptions import InvalidInput
from pstlab.services import files
from pstlab.services.chain_core import pst_check


def _check(args: argparse.Namespace) -> None:
    if (args.chain is None) == (args.spectrum is None):
        raise InvalidInput("check needs exactly one of --chain or --spectrum")

    if args.chain is not None:
        chain = files.read_chain(args.chain)
        verdict = pst_check(chain)
        emit_json(
            {"label": chain.label, "n": chain.n, "is_pst": verdict.is_pst, **verdict.model_dump()},
            args.out,
        )
        return

    spectrum = files.read_spectrum(args.spectrum)
    emit_json(
        {
            "n": spectrum.n,
            "values": list(spectrum.values),
            "base_gap": spectrum.base_gap,
            "t0": spectrum.transfer_time,
            "symmetric": spectrum.is_symmetric,
            "valid": spectrum.base_gap is not None,
        },
        args.out,
    )


def register(subparsers: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("check", parents=[parent], help="PST / odd-gap verdict")
    p.add_argument("--chain", type=Path, default=None)
    p.add_argument("--spectrum", type=Path, default=None)
    p.set_defaults(handler=_check)
