"""`pstlab encode` — encoder/decoder pairs and encoded arrival traces."""

from __future__ import annotations

import argparse
from pathlib import Path

from pstlab.cli.common import emit_csv, emit_json, resolve_t0
from pstlab.services import files
from pstlab.services.encoding import (
    eigenvector_orthogonal_encoding,
    encoded_arrival_width,
    encoded_trace,
    optimal_timing_encoding,
)


def _encode(args: argparse.Namespace) -> None:
    chain = files.read_chain(args.chain)
    if args.method == "orthogonal":
        pair = eigenvector_orthogonal_encoding(chain, args.m)
    else:
        pair = optimal_timing_encoding(chain, args.m, method=args.method)
    t0 = resolve_t0(chain, None)

    if args.trace:
        t_max = args.t_max if args.t_max is not None else 2.0 * t0
        emit_csv(files.TRACE_HEADER, encoded_trace(chain, pair, t_max, args.steps).rows(), args.out)
        return

    emit_json(
        {
            "label": chain.label,
            "method": pair.method,
            "region_size": pair.region_size,
            "objective": pair.objective,
            "encoder": pair.encoder[: pair.region_size],
            "decoder": pair.decoder[chain.n - pair.region_size :],
            "t0": t0,
            "epsilon": args.epsilon,
            "arrival_width": encoded_arrival_width(chain, pair, t0, args.epsilon),
        },
        args.out,
    )


def register(subparsers: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("encode", parents=[parent], help="encoded transfer over m end sites")
    p.add_argument("--chain", type=Path, required=True)
    p.add_argument("--m", type=int, required=True, help="odd region size")
    p.add_argument(
        "--method", choices=["restricted", "literal", "orthogonal"], default="restricted"
    )
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--trace", action="store_true", help="emit the encoded trace CSV instead")
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--steps", type=int, default=1001)
    p.set_defaults(handler=_encode)
