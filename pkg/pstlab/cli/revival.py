"""`pstlab revival` — fractional-revival conversions and probes."""

from __future__ import annotations

import argparse
from pathlib import Path

from pstlab.cli.common import emit_chain, emit_csv, resolve_t0
from pstlab.services import files
from pstlab.services.revival import (
    central_coupling_revival,
    revival_trace,
    spectral_shift_revival,
)


def _central(args: argparse.Namespace) -> None:
    chain = files.read_chain(args.chain)
    emit_chain(central_coupling_revival(chain, args.theta), args.out)


def _shift(args: argparse.Namespace) -> None:
    spectrum = files.read_spectrum(args.spectrum)
    emit_chain(spectral_shift_revival(spectrum, args.phase), args.out)


def _probe(args: argparse.Namespace) -> None:
    chain = files.read_chain(args.chain)
    t_max = args.t_max if args.t_max is not None else 2.0 * resolve_t0(chain, args.t0)
    emit_csv(files.REVIVAL_HEADER, revival_trace(chain, t_max, args.steps).rows(), args.out)


def register(subparsers: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    revival = subparsers.add_parser("revival", help="fractional revival")
    kinds = revival.add_subparsers(dest="revival_command", required=True)

    p = kinds.add_parser("central", parents=[parent], help="central-coupling conversion (odd n)")
    p.add_argument("--chain", type=Path, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.set_defaults(handler=_central)

    p = kinds.add_parser("shift", parents=[parent], help="antisymmetric-sector spectral shift")
    p.add_argument("--spectrum", type=Path, required=True)
    p.add_argument("--phase", type=float, required=True)
    p.set_defaults(handler=_shift)

    p = kinds.add_parser("probe", parents=[parent], help="CSV t,p_first,p_last")
    p.add_argument("--chain", type=Path, required=True)
    p.add_argument("--t-max", type=float, default=None, help="default: 2·t0")
    p.add_argument("--steps", type=int, default=1001)
    p.add_argument("--t0", type=float, default=None)
    p.set_defaults(handler=_probe)
