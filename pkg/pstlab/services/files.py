"""Chain, spectrum and table files.

JSON (orjson) for chains and spectra; floats are written in their shortest
round-trip form so a file reproduces the in-memory doubles bit for bit.
CSV for traces and sweeps, every number with 17 significant digits.
"""

from __future__ import annotations

import csv
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any, TextIO

import orjson
from pydantic import ValidationError

from pstlab.core.exceptions import ChainFileError
from pstlab.models.schemas import (
    FORMAT_VERSION,
    ChainFile,
    ChainSpec,
    PerturbationReport,
    Spectrum,
    SpectrumFile,
    TradeoffPoint,
)

TRACE_HEADER = ("t", "re_amp", "im_amp", "fe", "f")
TRADEOFF_HEADER = ("gamma", "t0", "j1", "j1_t0")
PERTURBATION_HEADER = ("delta", "chain_label", "q25", "q50", "q75", "mean", "samples", "resampled")
REVIVAL_HEADER = ("t", "p_first", "p_last")

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_APPEND_NEWLINE | orjson.OPT_SERIALIZE_NUMPY


def dumps(obj: Any) -> bytes:
    return orjson.dumps(obj, option=JSON_OPTIONS)


def _loads(data: bytes | str) -> Any:
    try:
        return orjson.loads(data)
    except orjson.JSONDecodeError as exc:
        raise ChainFileError(
            f"malformed JSON: {exc.msg}", line=exc.lineno, column=exc.colno
        ) from exc


def _validation_detail(exc: ValidationError) -> str:
    first = exc.errors()[0]
    where = ".".join(str(p) for p in first.get("loc", ())) or "document"
    return f"{where}: {first.get('msg', 'invalid value')}"


def _check_version(obj: Any) -> None:
    if not isinstance(obj, dict):
        raise ChainFileError("top-level JSON value must be an object")
    version = obj.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ChainFileError(f"unsupported format_version {version} (expected {FORMAT_VERSION})")


# ─── Chains ─── #


def dumps_chain(chain: ChainSpec) -> bytes:
    return dumps(ChainFile.from_chain(chain).model_dump())


def parse_chain(data: bytes | str) -> ChainSpec:
    obj = _loads(data)
    _check_version(obj)
    try:
        return ChainFile.model_validate(obj).to_chain()
    except ValidationError as exc:
        raise ChainFileError(f"invalid chain file: {_validation_detail(exc)}") from exc


def write_chain(chain: ChainSpec, path: Path) -> None:
    path.write_bytes(dumps_chain(chain))


def read_chain(path: Path) -> ChainSpec:
    try:
        return parse_chain(path.read_bytes())
    except OSError as exc:
        raise ChainFileError(f"cannot read {path}: {exc.strerror}") from exc


# ─── Spectra ─── #


def dumps_spectrum(spectrum: Spectrum, label: str = "") -> bytes:
    record = SpectrumFile(values=list(spectrum.values), base_gap=spectrum.base_gap, label=label)
    return dumps(record.model_dump())


def parse_spectrum(data: bytes | str) -> Spectrum:
    obj = _loads(data)
    _check_version(obj)
    try:
        record = SpectrumFile.model_validate(obj)
        return Spectrum.from_values(record.values, base_gap=record.base_gap)
    except ValidationError as exc:
        raise ChainFileError(f"invalid spectrum file: {_validation_detail(exc)}") from exc


def read_spectrum(path: Path) -> Spectrum:
    try:
        return parse_spectrum(path.read_bytes())
    except OSError as exc:
        raise ChainFileError(f"cannot read {path}: {exc.strerror}") from exc


# ─── Tables ─── #


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])


def tradeoff_rows(points: Iterable[TradeoffPoint]) -> list[tuple[float, ...]]:
    return [(p.gamma, p.t0, p.j1, p.j1_t0) for p in points]


def perturbation_rows(reports: Iterable[PerturbationReport]) -> list[tuple[Any, ...]]:
    return [
        (r.delta, r.chain_label, r.q25, r.q50, r.q75, r.mean, r.samples, r.resampled)
        for r in reports
    ]


def read_csv_table(path: Path) -> tuple[list[str], list[list[float]]]:
    """Header and numeric rows of a CSV written by write_csv (used for tabulated windows)."""
    try:
        with path.open(newline="") as handle:
            reader = csv.reader(handle)
            header = next(reader)
            rows = []
            for line_no, row in enumerate(reader, start=2):
                try:
                    rows.append([float(x) for x in row])
                except ValueError as exc:
                    raise ChainFileError(f"non-numeric cell in {path}", line=line_no) from exc
    except OSError as exc:
        raise ChainFileError(f"cannot read {path}: {exc.strerror}") from exc
    except StopIteration as exc:
        raise ChainFileError(f"{path} is empty") from exc
    return header, rows
