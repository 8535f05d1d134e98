"""`pstlab synth` — chain generators."""

from __future__ import annotations

import argparse
from pathlib import Path

import structlog

from pstlab.cli.common import emit_chain, float_list
from pstlab.core.exceptions import InvalidInput
from pstlab.models.schemas import ChainSpec, Spectrum, TRexParams
from pstlab.services import files
from pstlab.services.synthesis import (
    chain_from_spectrum,
    krawtchouk,
    rescale_to_unit_max,
    special_r2_spectrum,
    trex_approximation,
    trex_chain,
)

logger = structlog.get_logger()


def _finish(chain: ChainSpec, args: argparse.Namespace) -> None:
    if args.rescale and not chain.provenance.get("rescaled"):
        chain = rescale_to_unit_max(chain)
    logger.info("synth.done", label=chain.label, n=chain.n, t0=chain.provenance.get("t0"))
    emit_chain(chain, args.out)


def _krawtchouk(args: argparse.Namespace) -> None:
    _finish(krawtchouk(args.n, args.j), args)


def _trex_params(args: argparse.Namespace) -> TRexParams:
    return TRexParams(n=args.n, r=args.r, gamma=args.gamma, base_gap=args.base_gap)


def _trex(args: argparse.Namespace) -> None:
    _finish(trex_chain(_trex_params(args), rescale_to_unit_max_coupling=args.rescale), args)


def _trex_approx(args: argparse.Namespace) -> None:
    _finish(trex_approximation(_trex_params(args)), args)


def _r2(args: argparse.Namespace) -> None:
    spectrum = special_r2_spectrum(args.n, args.gamma)
    chain = chain_from_spectrum(spectrum, label=f"trex-r2-n{args.n}-gamma{args.gamma}")
    chain = chain.model_copy(
        update={
            "provenance": {
                **chain.provenance,
                "generator": "r2",
                "params": {"n": args.n, "gamma": args.gamma},
            }
        }
    )
    _finish(chain, args)


def _from_spectrum(args: argparse.Namespace) -> None:
    if args.spectrum is not None:
        spectrum = files.read_spectrum(args.spectrum)
    elif args.values is not None:
        spectrum = Spectrum.from_values(sorted(args.values))
    else:
        raise InvalidInput("from-spectrum needs --spectrum FILE or --values")
    label = args.label or "from-spectrum"
    chain = chain_from_spectrum(spectrum, label=label)
    if spectrum.base_gap is None:
        logger.warning("synth.no_odd_gap_structure", label=label)
    _finish(chain, args)


def register(subparsers: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    synth = subparsers.add_parser("synth", help="build a chain and write it as JSON")
    kinds = synth.add_subparsers(dest="generator", required=True)

    p = kinds.add_parser("krawtchouk", parents=[parent], help="J_k = j·√(k(n−k))")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--j", type=float, default=1.0)
    p.set_defaults(handler=_krawtchouk)

    for name, handler, text in (
        ("trex", _trex, "exact T-Rex chain"),
        ("trex-approx", _trex_approx, "three-element T-Rex approximation"),
    ):
        p = kinds.add_parser(name, parents=[parent], help=text)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--r", type=int, required=True)
        p.add_argument("--gamma", type=float, required=True)
        p.add_argument("--base-gap", type=float, default=1.0)
        p.set_defaults(handler=handler)

    p = kinds.add_parser("r2", parents=[parent], help="R=2 ladder {±1, ±(1+2γ), …}")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--gamma", type=int, required=True)
    p.set_defaults(handler=_r2)

    p = kinds.add_parser("from-spectrum", parents=[parent], help="inverse eigenvalue solve")
    p.add_argument("--spectrum", type=Path, default=None)
    p.add_argument("--values", type=float_list, default=None)
    p.add_argument("--label", default="")
    p.set_defaults(handler=_from_spectrum)
