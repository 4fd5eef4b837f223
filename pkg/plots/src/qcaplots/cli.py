"""Command-line entry point: render sweep CSVs to heatmap panels."""

import argparse
import sys

from .render import PlotError, PlotSpec, render_heatmap


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qcaplots",
        description="Render entanglement sweep CSVs into heatmap panels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    r = sub.add_parser("render", help="render a sweep CSV")
    r.add_argument("--csv", required=True, help="input sweep CSV")
    r.add_argument("--mode", choices=["phi-theta", "phi-phi"],
                   default="phi-theta")
    r.add_argument("--out", required=True, help="output image path (PNG)")
    r.add_argument("--panels", default="s_max,delta_s",
                   help="comma-separated columns to render")
    r.add_argument("--dpi", type=int, default=150)
    r.add_argument("--title", default=None)
    args = parser.parse_args(argv)
    try:
        spec = PlotSpec(
            csv_path=args.csv,
            mode=args.mode,
            out_path=args.out,
            panels=tuple(p for p in args.panels.split(",") if p),
            dpi=args.dpi,
            title=args.title,
        )
        out = render_heatmap(spec)
    except (PlotError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
