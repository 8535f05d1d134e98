"""Options and output helpers shared by every command."""

from __future__ import annotations

import argparse
import sys
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from pstlab.core.exceptions import InvalidInput, SpectrumError
from pstlab.models.schemas import ChainSpec, ReceiverWindow
from pstlab.services import files
from pstlab.services.chain_core import pst_check


def common_options() -> argparse.ArgumentParser:
    """Parent parser carrying the options every leaf command accepts."""
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")
    parent.add_argument(
        "--rescale", action="store_true", help="rescale produced chains to unit maximum coupling"
    )
    parent.add_argument("--seed", type=int, default=0, help="seed for stochastic commands")
    parent.add_argument("--threads", type=int, default=None, help="worker threads")
    return parent


def float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def emit_bytes(data: bytes, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(data.decode())
        sys.stdout.flush()
    else:
        out.write_bytes(data)


def emit_json(obj: Any, out: Path | None) -> None:
    emit_bytes(files.dumps(obj), out)


def emit_chain(chain: ChainSpec, out: Path | None) -> None:
    emit_bytes(files.dumps_chain(chain), out)


def emit_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], out: Path | None) -> None:
    if out is None:
        files.write_csv(sys.stdout, header, rows)
        sys.stdout.flush()
        return
    with out.open("w", newline="") as handle:
        files.write_csv(handle, header, rows)


def resolve_t0(chain: ChainSpec, override: float | None = None) -> float:
    """Explicit --t0, else the PST verdict, else the t₀ recorded in provenance."""
    if override is not None:
        if override <= 0:
            raise InvalidInput(f"t0 must be positive, got {override}")
        return override
    verdict = pst_check(chain)
    if verdict.t0 is not None:
        return verdict.t0
    recorded = chain.provenance.get("t0")
    if recorded is not None:
        return float(recorded)
    raise SpectrumError("chain has no perfect-transfer time; pass --t0 explicitly")


def build_window(args: argparse.Namespace) -> ReceiverWindow:
    if args.kind == "delta":
        return ReceiverWindow.delta()
    if args.kind == "tabulated":
        if args.table is None:
            raise InvalidInput("a tabulated window needs --table")
        _, rows = files.read_csv_table(args.table)
        return ReceiverWindow(
            kind="tabulated",
            times=tuple(r[0] for r in rows),
            density_table=tuple(r[1] for r in rows),
        )
    if args.width is None:
        raise InvalidInput(f"a {args.kind} window needs --width")
    return ReceiverWindow(kind=args.kind, width=args.width)
