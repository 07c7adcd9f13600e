"""Run every shipped config through the CLI into out/<config-name>/.

    python3 scripts/run_all.py [--plots] [--skip-sweeps] [--out DIR]
"""

import argparse
import sys
import time
from pathlib import Path

from aniso.cli import main as aniso_main
from aniso.experiments import parse_config_text

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--plots", action="store_true")
    ap.add_argument("--skip-sweeps", action="store_true", help="skip the two 500-field sweeps")
    ap.add_argument("--out", default=str(ROOT / "out"))
    args = ap.parse_args()
    status = 0
    for conf in sorted((ROOT / "configs").glob("*.conf")):
        exp = parse_config_text(conf.read_text())["experiment"]
        if args.skip_sweeps and exp.endswith("sweep"):
            continue
        t0 = time.perf_counter()
        argv = [exp, "--config", str(conf), "--out", str(Path(args.out) / conf.stem)]
        code = aniso_main(argv + (["--plots"] if args.plots else []))
        print(f"# {conf.stem}: exit {code} in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
        status = status or code
    return status


if __name__ == "__main__":
    sys.exit(main())
