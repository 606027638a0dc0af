"""Full reproduction run for qst-bell.

Runs every result in sequence and writes one JSON (or CSV) file per stage:
1. Exact B_d at d=3 against the local bound
2. Local hidden variable enumeration at d=2, 3, 4
3. Bell operator spectrum and see-saw ascent at d=3
4. Dimension sweep over d=2..5
5. Targeting game statistics and the Monte-Carlo estimate of B_3

Run: uv run python scripts/reproduce.py --seed 42 --out-dir results
"""

import argparse
import logging
import sys
from pathlib import Path

from qst_bell.cli import dispatch
from qst_bell.utils.config import load_config
from qst_bell.utils.logging import setup_logging

logger = logging.getLogger("qst_bell.scripts.reproduce")


def _stages(seed: int, rounds: int, threads: int) -> list[tuple[str, list[str]]]:
    common = ["--seed", str(seed), "--threads", str(threads)]
    return [
        ("bell_exact_d3.json", ["bell", "exact", "--d", "3", "--json", *common]),
        ("lhv_d2.json", ["bell", "lhv", "--d", "2", "--mode", "enumerate", "--json", *common]),
        ("lhv_d3.json", ["bell", "lhv", "--d", "3", "--mode", "enumerate", "--json", *common]),
        ("lhv_d4.json", ["bell", "lhv", "--d", "4", "--mode", "enumerate", "--json", *common]),
        ("operator_d3.json", ["bell", "operator", "--d", "3", "--eigs", "--json", *common]),
        ("seesaw_d3.json", ["bell", "seesaw", "--d", "3", "--trials", "20", "--json", *common]),
        ("perturb_d3.json", ["bell", "perturb", "--d", "3", "--json", *common]),
        ("sweep.csv", ["bell", "sweep", "--dims", "2,3,4,5", "--out", "csv", *common]),
        ("game_d3.json", ["game", "simulate", "--d", "3", "--rounds", str(rounds), "--json", *common]),
        ("estimate_d3.json", ["game", "estimate", "--d", "3", "--rounds", str(rounds), "--json", *common]),
    ]


def main() -> int:
    parser = argparse.ArgumentParser(description="qst-bell full reproduction")
    parser.add_argument("--seed", type=int, default=0, help="Seed for every stochastic stage.")
    parser.add_argument("--rounds", type=int, default=100_000, help="Game rounds per simulation.")
    parser.add_argument("--threads", type=int, default=1, help="Worker threads for the scans.")
    parser.add_argument("--out-dir", type=Path, default=Path("results"), help="Directory for result files.")
    args = parser.parse_args()

    config = load_config()
    setup_logging(level=config.logging.level, log_format=config.logging.format)
    args.out_dir.mkdir(parents=True, exist_ok=True)

    for filename, argv in _stages(args.seed, args.rounds, args.threads):
        target = args.out_dir / filename
        logger.info(f"Stage {filename}: qst-bell {' '.join(argv)}")
        code = dispatch([*argv, "--out-path", str(target)])
        if code != 0:
            logger.error(f"Stage {filename} failed with exit code {code}")
            return code

    logger.info(f"Reproduction complete, results in {args.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
