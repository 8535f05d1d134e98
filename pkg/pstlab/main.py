"""pstlab entrypoint."""

from __future__ import annotations

import sys

import structlog
from pydantic import ValidationError

from pstlab.cli.router import build_parser
from pstlab.core.exceptions import EXIT_INVALID_INPUT, PstLabError
from pstlab.core.logging import configure_logging

logger = structlog.get_logger()


def main(argv: list[str] | None = None) -> int:
    """Parse ``argv``, run the selected command and return its exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level, args.log_format)
    logger.debug("pstlab.command", command=args.command)

    try:
        args.handler(args)
    except PstLabError as exc:
        logger.error(
            "cli.failed",
            command=args.command,
            error=type(exc).__name__,
            detail=exc.detail,
            exit_code=exc.exit_code,
        )
        return exc.exit_code
    except ValidationError as exc:
        logger.error(
            "cli.failed",
            command=args.command,
            error="ValidationError",
            detail=str(exc.errors()[0].get("msg", exc)),
            exit_code=EXIT_INVALID_INPUT,
        )
        return EXIT_INVALID_INPUT
    except ValueError as exc:
        logger.error(
            "cli.failed",
            command=args.command,
            error=type(exc).__name__,
            detail=str(exc),
            exit_code=EXIT_INVALID_INPUT,
        )
        return EXIT_INVALID_INPUT
    return 0


def run() -> None:
    sys.exit(main())
