"""aniso <experiment> --config <path> [--plots] [--out <dir>] [--seed <u64>]

Exit status: 0 success, 2 usage, 3 precondition, 4 numerical divergence.
"""

from __future__ import annotations

import argparse
import sys

from aniso.errors import DivergenceError, DomainError, InconsistencyError, PreconditionError
from aniso.experiments import EXPERIMENTS, WORKERS_ENV, ConfigError, load_config, run_experiment

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PRECONDITION = 3
EXIT_DIVERGENCE = 4


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="aniso",
        description="Run an anisotropic Sobolev space experiment and write CSV reports.",
        epilog=f"Experiments: {', '.join(EXPERIMENTS)}. Worker threads: ${WORKERS_ENV}.",
    )
    ap.add_argument("experiment", help="experiment name")
    ap.add_argument("--config", required=True, help="flat key = value config file")
    ap.add_argument("--plots", action="store_true", help="also write SVG plots")
    ap.add_argument("--out", help="output directory (overrides output.dir)")
    ap.add_argument("--seed", type=_u64, help="seed for stochastic experiments (overrides the config)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.experiment, args.seed, args.out)
        files = run_experiment(cfg, args.plots)
    except ConfigError as exc:
        print(f"aniso: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PreconditionError, DomainError) as exc:
        print(f"aniso: precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (DivergenceError, InconsistencyError) as exc:
        print(f"aniso: numerical divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    for f in files:
        print(f)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
