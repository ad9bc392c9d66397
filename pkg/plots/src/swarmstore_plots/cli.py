"""swarmstore-plot: render a figure kind from a sweep output directory."""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURES, EmptyDeliveries
from .io import SchemaError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="swarmstore-plot",
        description="Render figures from swarmstore per-run CSV files")
    parser.add_argument("kind", choices=sorted(FIGURES),
                        help="which figure to render")
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="sweep output directory")
    parser.add_argument("--out", dest="out_path", required=True,
                        help="output image path (e.g. figure.png)")
    args = parser.parse_args(argv)
    try:
        stats = FIGURES[args.kind](args.in_dir, args.out_path)
    except (SchemaError, EmptyDeliveries, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    summary = "  ".join(f"{k}={v:.3f}" for k, v in stats.items())
    print(f"wrote {args.out_path}  ({summary})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
