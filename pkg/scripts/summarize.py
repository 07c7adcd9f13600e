"""Print the fitted slopes and summary statistics found under an output tree.

    python3 scripts/summarize.py [out]
"""

import csv
import sys
from pathlib import Path


def main(root: Path) -> None:
    for path in sorted(root.glob("*/fit.csv")) + sorted(root.glob("*/summary.csv")):
        with open(path) as fh:
            rows = list(csv.reader(fh))
        print(f"== {path.parent.name}/{path.name}")
        width = max(len(c) for r in rows for c in r[:1])
        for r in rows[1:]:
            print(f"  {r[0]:<{width}}  " + "  ".join(r[1:3]))


if __name__ == "__main__":
    main(Path(sys.argv[1] if len(sys.argv) > 1 else "out"))
