"""Command-line front end.

Exit codes: 0 success, 2 usage, 3 I/O failure, 4 malformed data.
"""

import argparse
import os
import sys

import numpy as np

from . import cgh, experiments
from .images import ImageFormatError, load_grayscale, load_target, resample, save_grayscale
from .metrics import NmseCalibration, aggregate, nmse
from .random_phase import PhaseLut, make_source, next_prime_above, primes_up_to

EXIT_USAGE, EXIT_IO, EXIT_FORMAT = 2, 3, 4


class UsageError(Exception):
    pass


def _resolution(value):
    try:
        return experiments.parse_resolution(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _source_kind(value):
    value = value.strip().lower()
    if value in ("independent", "flat"):
        return value
    if value.startswith("lut:") and value[4:].isdigit():
        return value
    raise argparse.ArgumentTypeError(f"expected independent, flat or lut:N, got {value!r}")


def _positive(value):
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return n


def _count(value):
    n = int(value)
    if n < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return n


def build_parser():
    parser = argparse.ArgumentParser(prog="lutcgh", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate packed binary OSPR sub-frames")
    g.add_argument("--image", required=True, help="8-bit grayscale PNG/PGM or synthetic:NAME")
    g.add_argument("--out", required=True, help="packed frame file to write")
    g.add_argument("--subframes", type=_positive, default=24)
    g.add_argument("--scheme", choices=["binary"], default="binary")
    g.add_argument("--source", type=_source_kind, default="independent",
                   help="independent | flat | lut:N")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--resolution", type=_resolution, help="hologram size WxH (default: image size)")
    g.add_argument("--placement", choices=["upper", "full"], default="upper")
    g.add_argument("--png-dir", help="also write each sub-frame as an 8-bit PNG here")

    r = sub.add_parser("reconstruct", help="time-averaged replay preview of a frame file")
    r.add_argument("--frames", required=True)
    r.add_argument("--out", required=True)

    s = sub.add_parser("sweep", help="run an N_LUT error sweep from a config file")
    s.add_argument("--config", required=True)
    s.add_argument("--out-csv", required=True)
    s.add_argument("--out-table", help="gnuplot table of n_lut, mean, mean-2sd, mean+2sd")
    s.add_argument("--workers", type=_count, help="process count, 0 = all CPUs (default: from config)")

    p = sub.add_parser("primes", help="prime utilities")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--above", type=_count)
    grp.add_argument("--list-up-to", type=_count)

    c = sub.add_parser("calibrate", help="recompute the NMSE column of a sweep CSV")
    c.add_argument("--csv", required=True)
    c.add_argument("--out", required=True)
    c.add_argument("--reference-n-lut", type=_count, default=1000)
    c.add_argument("--reference-image", default="Mandrill")
    return parser


def cmd_generate(args, out):
    if args.image.startswith("synthetic:"):
        if args.resolution is None:
            raise UsageError("--resolution is required for synthetic images")
        raw = None
        n_x, n_y = args.resolution
    else:
        raw = load_grayscale(args.image)
        n_y, n_x = raw.shape if args.resolution is None else args.resolution[::-1]
    rows = max(n_y // 2, 1) if args.placement == "upper" else n_y
    image = load_target(args.image, n_x, rows) if raw is None else resample(raw, n_x, rows)
    spec = cgh.TargetSpec(image, n_x, n_y, args.placement)
    source = make_source(args.source, args.seed)
    frames = cgh.ospr_generate(spec, args.subframes, source, cgh.BINARY_PHASE)
    frame_bytes = cgh.write_frames_file(args.out, frames)
    if args.png_dir:
        os.makedirs(args.png_dir, exist_ok=True)
        for n, img in enumerate(cgh.frames_to_gray(frames)):
            save_grayscale(os.path.join(args.png_dir, f"subframe_{n:03d}.png"), img)
    print(f"frames: {len(frames)} x {n_x}x{n_y}, {frame_bytes} bytes each", file=out)
    print(f"phases consumed: {source.consumed}", file=out)
    if isinstance(source, PhaseLut):
        print(f"lut: n_lut={len(source)} seed={args.seed} final_cursor={source.cursor}", file=out)
    else:
        print(f"source: {args.source} seed={args.seed}", file=out)
    return 0


def preview_image(recon):
    """DC-centred, linearly tone-mapped 8-bit preview of a replay intensity."""
    img = np.fft.fftshift(recon)
    peak = np.percentile(img, 99.5)
    if peak <= 0:
        peak = img.max()
    if peak <= 0:
        return np.zeros(img.shape, dtype=np.uint8)
    return np.round(np.clip(img / peak, 0.0, 1.0) * 255).astype(np.uint8)


def cmd_reconstruct(args, out):
    frames = cgh.read_frames_file(args.frames)
    recon = cgh.reconstruct_average(frames)
    save_grayscale(args.out, preview_image(recon))
    n_y, n_x = frames.shape
    print(f"reconstructed {len(frames)} sub-frames of {n_x}x{n_y} -> {args.out}", file=out)
    return 0


def cmd_sweep(args, out):
    config = experiments.SweepConfig.from_file(args.config)
    result = experiments.run_sweep(config, workers=args.workers)
    experiments.emit_csv(result, args.out_csv)
    if args.out_table:
        experiments.emit_table(result, args.out_table)
    label = "nmse" if result.calibration else "mse"
    print(f"{len(result.records)} records -> {args.out_csv}", file=out)
    print(f"{'image':<16} {'min mean ' + label:>18} {'n_lut':>7} {'max mean ' + label:>18} {'n_lut':>7}", file=out)
    for image_id, (lo, lo_n, hi, hi_n) in experiments.summarise(result).items():
        print(f"{image_id:<16} {lo:>18.6g} {lo_n:>7} {hi:>18.6g} {hi_n:>7}", file=out)
    for image_id, value in result.baseline.items():
        print(f"{image_id:<16} independent baseline mse {value:.6g}", file=out)
    return 0


def cmd_primes(args, out):
    if args.above is not None:
        print(next_prime_above(args.above), file=out)
    else:
        for p in primes_up_to(args.list_up_to):
            print(p, file=out)
    return 0


def cmd_calibrate(args, out):
    try:
        records = experiments.read_csv(args.csv)
    except ValueError as exc:
        raise ImageFormatError(str(exc)) from None
    groups = {}
    for rec in records:
        if rec.n_lut == args.reference_n_lut:
            groups.setdefault(rec.image_id, []).append(rec.mse)
    if not groups:
        raise UsageError(f"no rows with n_lut = {args.reference_n_lut} in {args.csv}")
    ref = next(iter(sorted(groups))) if args.reference_image not in groups else args.reference_image
    try:
        cal = NmseCalibration({i: aggregate(v).mean for i, v in groups.items()}, ref, args.reference_n_lut)
    except ValueError as exc:
        raise ImageFormatError(str(exc)) from None
    for rec in records:
        rec.nmse = nmse(rec, cal) if rec.image_id in cal.reference else None
    experiments.emit_csv(experiments.SweepResult(records), args.out)
    for image_id, value in sorted(cal.reference.items()):
        print(f"{image_id}: mean mse at n_lut={args.reference_n_lut} = {value:.6g}, ratio {cal.ratio(image_id):.6g}", file=out)
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "reconstruct": cmd_reconstruct,
    "sweep": cmd_sweep,
    "primes": cmd_primes,
    "calibrate": cmd_calibrate,
}


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"lutcgh: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ImageFormatError, cgh.FrameFormatError, experiments.ConfigError) as exc:
        print(f"lutcgh: format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        name = getattr(exc, "filename", None)
        print(f"lutcgh: I/O error: {name + ': ' if name else ''}{exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
