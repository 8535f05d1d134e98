"""`pstlab bounds` — trade-off sweep and per-chain bound checks."""

from __future__ import annotations

import argparse
from pathlib import Path

from pstlab.cli.common import emit_csv, emit_json, float_list, resolve_t0
from pstlab.services import files
from pstlab.services.bounds import (
    anandan_envelope_check,
    mandelstam_tamm_time,
    theorem_bound,
    tradeoff_sweep,
)
from pstlab.services.dynamics import trace

# Envelope violations up to this size are numerical noise
ENVELOPE_TOL = 1e-9


def _sweep(args: argparse.Namespace) -> None:
    points = tradeoff_sweep(args.n, args.r, args.gammas, threads=args.threads)
    emit_csv(files.TRADEOFF_HEADER, files.tradeoff_rows(points), args.out)


def _check(args: argparse.Namespace) -> None:
    chain = files.read_chain(args.chain)
    t0 = resolve_t0(chain, args.t0)
    mt_time = mandelstam_tamm_time(chain)
    violation = anandan_envelope_check(chain, trace(chain, mt_time, args.steps))
    parity = "even" if chain.n % 2 == 0 else "odd"
    min_j1 = theorem_bound(parity, t0)
    emit_json(
        {
            "label": chain.label,
            "t0": t0,
            "j1": chain.j1,
            "j1_t0": chain.j1 * t0,
            "mandelstam_tamm_time": mt_time,
            "mandelstam_tamm_ok": t0 >= mt_time - 1e-9,
            "envelope_violation": violation,
            "envelope_ok": violation <= ENVELOPE_TOL,
            "theorem_min_j1": min_j1,
            "theorem_ok": chain.n < 4 or chain.j1 * t0 >= min_j1 * t0 - 1e-9,
        },
        args.out,
    )


def register(subparsers: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    bounds = subparsers.add_parser("bounds", help="speed limits and optimality bounds")
    kinds = bounds.add_subparsers(dest="bounds_command", required=True)

    p = kinds.add_parser("sweep", parents=[parent], help="CSV gamma,t0,j1,j1_t0")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--gammas", type=float_list, required=True)
    p.set_defaults(handler=_sweep)

    p = kinds.add_parser("check", parents=[parent], help="check one chain against the bounds")
    p.add_argument("--chain", type=Path, required=True)
    p.add_argument("--t0", type=float, default=None)
    p.add_argument("--steps", type=int, default=2001)
    p.set_defaults(handler=_check)
