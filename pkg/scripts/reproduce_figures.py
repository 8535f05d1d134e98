"""Regenerate the CSV data behind every published plot.

Each recipe is a short sequence of ``pstlab`` commands; the CSV column names
are listed in the README. Usage:

    python scripts/reproduce_figures.py --out-dir figures [--only robustness] [--samples 10000]
"""

from __future__ import annotations

import argparse
import math
import sys
from collections.abc import Callable
from pathlib import Path

import numpy as np
import structlog

from pstlab.core.logging import configure_logging
from pstlab.main import main as pstlab

logger = structlog.get_logger()

TRADEOFF_GAMMAS = "11,15,21,31,41,61,81,121,161"
ROBUSTNESS_DELTAS = ",".join(f"{d:.6g}" for d in np.logspace(-4, -1, 13))


def _run(*argv: str) -> None:
    code = pstlab(list(argv))
    if code != 0:
        raise SystemExit(f"pstlab {' '.join(argv)} exited with {code}")


def arrival_profile(out: Path, samples: int) -> None:
    """T-Rex n=8, R=4, γ=13 against sin⁶(t/2)."""
    chain = out / "trex-n8-r4-g13.json"
    _run("synth", "trex", "--n", "8", "--r", "4", "--gamma", "13", "--out", str(chain))
    _run(
        "evolve", "--chain", str(chain), "--t-max", str(2 * math.pi),
        "--steps", "2001", "--out", str(out / "arrival_profile.csv"),
    )


def tradeoff(out: Path, samples: int) -> None:
    """J₁t₀ against γ for R = 5, 7, 9 embedded in n = 51."""
    for r in (5, 7, 9):
        _run(
            "bounds", "sweep", "--n", "51", "--r", str(r), "--gammas", TRADEOFF_GAMMAS,
            "--out", str(out / f"tradeoff_r{r}.csv"),
        )


def r2_ladder(out: Path, samples: int) -> None:
    """R = 2, n = 8: thin peaks that vanish as γ grows."""
    for gamma in (5, 51):
        chain = out / f"r2-n8-g{gamma}.json"
        _run("synth", "r2", "--n", "8", "--gamma", str(gamma), "--out", str(chain))
        _run(
            "evolve", "--chain", str(chain), "--steps", "4001",
            "--out", str(out / f"r2_ladder_g{gamma}.csv"),
        )


def robustness(out: Path, samples: int) -> None:
    """Upper quartile of 1 − √F_e: Krawtchouk vs T-Rex (R=4, γ=21), n = 50, central 45."""
    kraw, trex = out / "krawtchouk-n50.json", out / "trex-n50-r4-g21.json"
    _run("synth", "krawtchouk", "--n", "50", "--rescale", "--out", str(kraw))
    _run(
        "synth", "trex", "--n", "50", "--r", "4", "--gamma", "21", "--rescale", "--out", str(trex)
    )
    _run(
        "perturb", "--chain", str(kraw), "--compare", str(trex), "--central", "45",
        "--deltas", ROBUSTNESS_DELTAS, "--samples", str(samples), "--seed", "0",
        "--out", str(out / "robustness.csv"),
    )


def encoded_arrival(out: Path, samples: int) -> None:
    """Krawtchouk n = 51 with optimal encoding regions m = 1, 3, 5, 7."""
    chain = out / "krawtchouk-n51.json"
    _run("synth", "krawtchouk", "--n", "51", "--out", str(chain))
    for m in (1, 3, 5, 7):
        _run(
            "encode", "--chain", str(chain), "--m", str(m), "--trace", "--steps", "2001",
            "--out", str(out / f"encoded_m{m}.csv"),
        )


def fractional_revival(out: Path, samples: int) -> None:
    """n = 11 T-Rex (R=5) converted at θ = π/8, against sin⁸."""
    base, chain = out / "trex-n11-r5-g21.json", out / "revival-n11.json"
    _run("synth", "trex", "--n", "11", "--r", "5", "--gamma", "21", "--out", str(base))
    _run(
        "revival", "central", "--chain", str(base), "--theta", str(math.pi / 8),
        "--out", str(chain),
    )
    _run(
        "revival", "probe", "--chain", str(chain), "--t0", str(math.pi), "--steps", "2001",
        "--out", str(out / "fractional_revival.csv"),
    )


RECIPES: dict[str, Callable[[Path, int], None]] = {
    "arrival-profile": arrival_profile,
    "tradeoff": tradeoff,
    "r2-ladder": r2_ladder,
    "robustness": robustness,
    "encoded-arrival": encoded_arrival,
    "fractional-revival": fractional_revival,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", type=Path, default=Path("figures"))
    parser.add_argument("--only", choices=sorted(RECIPES), action="append")
    parser.add_argument("--samples", type=int, default=10000, help="robustness ensemble size")
    args = parser.parse_args(argv)

    configure_logging()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for name in args.only or RECIPES:
        logger.info("figures.recipe", recipe=name, out_dir=str(args.out_dir))
        RECIPES[name](args.out_dir, args.samples)
    return 0


if __name__ == "__main__":
    sys.exit(main())
