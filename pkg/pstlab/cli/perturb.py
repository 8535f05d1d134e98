"""`pstlab perturb` — seeded coupling-disorder ensembles."""

from __future__ import annotations

import argparse
from pathlib import Path

from pstlab.cli.common import emit_csv, float_list, resolve_t0
from pstlab.core.config import settings
from pstlab.services import files
from pstlab.services.robustness import central_region, delta_sweep, perturb_ensemble


def _perturb(args: argparse.Namespace) -> None:
    chain = files.read_chain(args.chain)
    t0 = resolve_t0(chain, args.t0)

    if args.compare is None:
        region = None if args.central is None else central_region(chain.n - 1, args.central)
        reports = [
            perturb_ensemble(chain, t0, delta, region, args.samples, args.seed, args.threads)
            for delta in args.deltas
        ]
    else:
        other = files.read_chain(args.compare)
        pairs = delta_sweep(
            chain,
            other,
            t0,
            resolve_t0(other, None),
            args.deltas,
            central_count=args.central,
            samples=args.samples,
            seed=args.seed,
            threads=args.threads,
        )
        reports = [report for pair in pairs for report in pair]
    emit_csv(files.PERTURBATION_HEADER, files.perturbation_rows(reports), args.out)


def register(subparsers: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("perturb", parents=[parent], help="coupling-disorder ensemble CSV")
    p.add_argument("--chain", type=Path, required=True)
    p.add_argument("--compare", type=Path, default=None, help="second chain for a paired sweep")
    p.add_argument("--deltas", type=float_list, required=True)
    p.add_argument("--samples", type=int, default=settings.DEFAULT_SAMPLES)
    p.add_argument("--central", type=int, default=None, help="perturb only the central K couplings")
    p.add_argument("--t0", type=float, default=None)
    p.set_defaults(handler=_perturb)
