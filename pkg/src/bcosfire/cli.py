"""Command-line driver.

Subcommands: make-bar, configure, respond, segment, evaluate, bench.
Radii accept either an inclusive range ``start:step:end`` or a comma list.
Exit codes: 0 success, 1 runtime failure (one-line diagnostic on stderr),
2 usage error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .bench import (DEFAULT_BAR_WIDTH, configure_from_params,
                    read_dataset_file, run_benchmark)
from .configure import FilterParams, load_model, make_prototype_bar, save_model
from .dog import CENTER_ON, POLARITIES
from .errors import BcosfireError, ParameterError
from .evaluate import (best_threshold_per_dataset, best_threshold_per_image,
                       confusion, metrics, metrics_csv, threshold)
from .imgio import (CHANNEL_POLICIES, GrayImage, invert, load_image,
                    load_mask, save_image)
from .respond import ResponseMap, normalize_response, rotation_tolerant_response


def parse_radii(text: str) -> tuple[float, ...]:
    """'0:2:10' (inclusive) or '0,2,4,...' -> tuple of radii."""
    try:
        if ":" in text:
            start_s, step_s, end_s = text.split(":")
            start, step, end = float(start_s), float(step_s), float(end_s)
            if step <= 0:
                raise ParameterError(f"radii step must be positive in {text!r}")
            values = []
            k = 0
            while True:
                r = start + k * step
                if r > end + 1e-9:
                    break
                values.append(r)
                k += 1
            return tuple(values)
        return tuple(float(tok) for tok in text.split(","))
    except ValueError:
        raise ParameterError(f"cannot parse radii {text!r}") from None


def _params_from_args(args) -> FilterParams:
    return FilterParams(
        sigma=args.sigma,
        radii=parse_radii(args.radii),
        sigma0=args.sigma0,
        alpha=args.alpha,
        n_rot=getattr(args, "nrot", 12),
        polarity=args.polarity,
    )


def _add_filter_flags(p: argparse.ArgumentParser, with_nrot: bool = True) -> None:
    p.add_argument("--sigma", type=float, required=True, help="DoG outer std (pixels)")
    p.add_argument("--radii", required=True, help="circle radii, start:step:end or comma list")
    p.add_argument("--sigma0", type=float, required=True, help="blur offset (pixels)")
    p.add_argument("--alpha", type=float, required=True, help="blur growth per pixel of rho")
    p.add_argument("--polarity", choices=POLARITIES, default=CENTER_ON)
    p.add_argument("--width", type=float, default=DEFAULT_BAR_WIDTH,
                   help="prototype bar width in pixels")
    p.add_argument("--size", type=int, default=0,
                   help="prototype side length (0 = auto)")
    if with_nrot:
        p.add_argument("--nrot", type=int, default=12, help="number of orientations")


def _load_response(path) -> ResponseMap:
    img = load_image(path)
    return ResponseMap(img, model_descr=str(path), n_rot=0)


def cmd_make_bar(args) -> int:
    bar = make_prototype_bar(args.width, math.radians(args.orientation), args.size)
    save_image(bar, args.output)
    return 0


def cmd_configure(args) -> int:
    params = _params_from_args(args)
    model = configure_from_params(
        params, bar_width=args.width, size=args.size or None
    )
    save_model(model, args.output)
    print(f"configured {len(model.subunits)} sub-units -> {args.output}")
    return 0


def cmd_respond(args) -> int:
    model = load_model(args.model)
    img = load_image(args.input, channel=args.channel)
    if args.invert:
        img = invert(img)
    resp = rotation_tolerant_response(img, model, args.nrot)
    save_image(normalize_response(resp).image, args.output)
    return 0


def cmd_segment(args) -> int:
    resp = _load_response(args.response)
    seg = threshold(resp, args.threshold)
    save_image(GrayImage(seg.data.astype(float)), args.output)
    return 0


def cmd_evaluate(args) -> int:
    resp = _load_response(args.response)
    gt = load_mask(args.groundtruth)
    mask = load_mask(args.mask) if args.mask else None
    if args.threshold is not None:
        m = metrics(confusion(threshold(resp, args.threshold), gt, mask))
        t = args.threshold
    elif args.mode == "per-dataset":
        t, _, per_image = best_threshold_per_dataset([(resp, gt, mask)])
        m = per_image[0]
    else:
        t, m = best_threshold_per_image(resp, gt, mask)
    sys.stdout.write(metrics_csv([(Path(args.response).name, t, m)]))
    return 0


def cmd_bench(args) -> int:
    params = _params_from_args(args)
    spec = read_dataset_file(args.dataset, params, mode_override=args.mode)
    report = run_benchmark(
        spec,
        workers=args.workers,
        channel=args.channel,
        keep_responses=bool(args.save_images),
    )
    csv_text = report.csv()
    if args.output:
        Path(args.output).write_text(csv_text, encoding="utf-8")
    else:
        sys.stdout.write(csv_text)
    if args.save_images:
        outdir = Path(args.save_images)
        outdir.mkdir(parents=True, exist_ok=True)
        for r in report.results:
            if r.error is None and r.response is not None:
                stem = Path(r.name).stem
                save_image(r.response.image, outdir / f"{stem}-response.pgm")
                seg = threshold(r.response, r.threshold)
                save_image(GrayImage(seg.data.astype(float)),
                           outdir / f"{stem}-segmented.pgm")
    for r in report.results:
        if r.error is not None:
            print(f"warning: {r.name}: {r.error}", file=sys.stderr)
    if report.incomplete:
        print("warning: report incomplete (some entries failed)", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bcosfire",
        description="Trainable bar-selective line delineation filters.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("make-bar", help="write a synthetic prototype bar image")
    p.add_argument("--width", type=float, default=DEFAULT_BAR_WIDTH)
    p.add_argument("--orientation", type=float, default=90.0,
                   help="bar orientation in degrees (90 = vertical)")
    p.add_argument("--size", type=int, default=101)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_make_bar)

    p = sub.add_parser("configure", help="configure a filter from a synthetic bar")
    _add_filter_flags(p, with_nrot=False)
    p.add_argument("-o", "--output", required=True, help="model file to write")
    p.set_defaults(func=cmd_configure)

    p = sub.add_parser("respond", help="apply a model rotation-tolerantly")
    p.add_argument("-m", "--model", required=True)
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--nrot", type=int, default=12)
    p.add_argument("--invert", action="store_true",
                   help="invert the input (dark lines on bright background)")
    p.add_argument("--channel", choices=CHANNEL_POLICIES, default="green")
    p.add_argument("-o", "--output", required=True,
                   help="normalized response image (PGM)")
    p.set_defaults(func=cmd_respond)

    p = sub.add_parser("segment", help="threshold a response image")
    p.add_argument("-r", "--response", required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("evaluate", help="compare a response against ground truth")
    p.add_argument("-r", "--response", required=True)
    p.add_argument("-g", "--groundtruth", required=True)
    p.add_argument("--mask", default=None)
    p.add_argument("--mode", choices=("per-image", "per-dataset"), default="per-image")
    p.add_argument("--threshold", type=float, default=None,
                   help="fixed threshold (skips the MCC sweep)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", help="run a dataset benchmark")
    p.add_argument("--dataset", required=True, help="dataset description file")
    _add_filter_flags(p)
    p.add_argument("--mode", choices=("per-image", "per-dataset"), default=None,
                   help="override the dataset file's threshold mode")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--channel", choices=CHANNEL_POLICIES, default="green")
    p.add_argument("-o", "--output", default=None, help="CSV path (default stdout)")
    p.add_argument("--save-images", default=None,
                   help="directory for response/segmentation images")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (BcosfireError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
