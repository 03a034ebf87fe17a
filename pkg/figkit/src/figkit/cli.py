"""figures: render campaign figures.

    figures --campaign DIR --out DIR [--only fig2a,fig4c]
"""

import argparse
import sys

from .figures import FIGURE_IDS, render_all
from .schema import SchemaError


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render publication-style figures from a campaign tree")
    parser.add_argument("--campaign", required=True,
                        help="campaign output directory")
    parser.add_argument("--out", required=True, help="image output directory")
    parser.add_argument("--only",
                        help=f"comma-separated subset of {','.join(FIGURE_IDS)}")
    args = parser.parse_args(argv)
    only = [s.strip() for s in args.only.split(",")] if args.only else None
    try:
        reports = render_all(args.campaign, args.out, only)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    for report in reports:
        print(f"rendered {report.figure_id} -> {report.output_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
