"""`pstlab evolve` and `pstlab window` — time traces and receiver-window averages."""

from __future__ import annotations

import argparse
from pathlib import Path

from pstlab.cli.common import build_window, emit_csv, emit_json, resolve_t0
from pstlab.services import files
from pstlab.services.dynamics import (
    arrival_width,
    expected_fidelity,
    profile_exponent,
    trace,
    windowed_transfer,
)


def _evolve(args: argparse.Namespace) -> None:
    chain = files.read_chain(args.chain)
    t_max = args.t_max if args.t_max is not None else 2.0 * resolve_t0(chain, args.t0)
    emit_csv(files.TRACE_HEADER, trace(chain, t_max, args.steps).rows(), args.out)


def _window(args: argparse.Namespace) -> None:
    chain = files.read_chain(args.chain)
    t0 = resolve_t0(chain, args.t0)
    window = build_window(args)
    result = {
        "label": chain.label,
        "t0": t0,
        "window": window.model_dump(exclude_defaults=True),
        "windowed_transfer": windowed_transfer(chain, window, t0),
        "expected_fidelity": expected_fidelity(chain, window, t0),
    }
    if args.epsilon is not None:
        result["arrival_width"] = arrival_width(chain, t0, args.epsilon)
        result["profile_exponent"] = profile_exponent(trace(chain, t0, 2001), t0)
    emit_json(result, args.out)


def register(subparsers: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("evolve", parents=[parent], help="CSV trace t,re_amp,im_amp,fe,f")
    p.add_argument("--chain", type=Path, required=True)
    p.add_argument("--t-max", type=float, default=None, help="default: 2·t0")
    p.add_argument("--steps", type=int, default=1001)
    p.add_argument("--t0", type=float, default=None)
    p.set_defaults(handler=_evolve)

    p = subparsers.add_parser("window", parents=[parent], help="windowed and expected fidelity")
    p.add_argument("--chain", type=Path, required=True)
    p.add_argument("--kind", choices=["delta", "box", "gaussian", "tabulated"], default="gaussian")
    p.add_argument("--width", type=float, default=None, help="box full width or gaussian σ")
    p.add_argument("--table", type=Path, default=None, help="CSV of offset,density")
    p.add_argument("--t0", type=float, default=None)
    p.add_argument("--epsilon", type=float, default=None, help="also report the arrival width")
    p.set_defaults(handler=_window)
