"""Command-line entry: elss-seg-adapter --model --input --out --classes
--gsd [--origin X Y]."""

import argparse
import sys

from .adapter import AdapterConfig, AdapterError, load_class_table, segment_and_export


def main(argv=None):
    parser = argparse.ArgumentParser(prog="elss-seg-adapter", description=__doc__)
    parser.add_argument("--model", required=True, help="checkpoint path or constant:<idx>")
    parser.add_argument("--input", required=True, help="input RGB image")
    parser.add_argument("--out", required=True, help="output raster path (.pgm)")
    parser.add_argument("--classes", required=True, help="JSON class table {index: name}")
    parser.add_argument("--gsd", type=float, required=True, help="meters per pixel")
    parser.add_argument(
        "--origin", type=float, nargs=2, default=(0.0, 0.0), metavar=("X", "Y")
    )
    parser.add_argument("--crs", default="local-m")
    args = parser.parse_args(argv)
    try:
        config = AdapterConfig(
            model=args.model,
            input_path=args.input,
            output_path=args.out,
            classes=load_class_table(args.classes),
            gsd=args.gsd,
            origin=tuple(args.origin),
            crs_label=args.crs,
        )
        raster_path, sidecar_path = segment_and_export(config)
    except (AdapterError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {raster_path} and {sidecar_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
