"""Command-line interface: ``bmatrack {track,synth,eval,bench}``.

Exit status is 0 on success, 1 for a usage error and 2 when the input data
(frames, CSV or config files) cannot be used.  Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import io
from .core import FUSION_MODES, Region, TrackerConfig, load_config
from .errors import TrackingError
from .fusion import track
from .synth import PRESETS, generate, scenario_preset

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    def __init__(self, parser, message):
        super().__init__(message)
        self.parser = parser


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 by default, which is reserved for data errors here
    def error(self, message):
        raise UsageError(self, f"{self.prog}: error: {message}")


def _region(text: str) -> Region:
    try:
        cx, cy, w, h = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected cx,cy,w,h, got {text!r}") from None
    if not (w > 0 and h > 0):
        raise argparse.ArgumentTypeError("box width and height must be positive")
    return Region(cx, cy, w, h)


def _modes(text: str) -> list[str]:
    modes = [m.strip() for m in text.split(",") if m.strip()]
    bad = [m for m in modes if m not in FUSION_MODES]
    if bad or not modes:
        raise argparse.ArgumentTypeError(f"modes must be drawn from {','.join(FUSION_MODES)}")
    return modes


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bmatrack", description="Particle-filter object tracking with Bayesian model averaging.")
    p.add_argument("-v", "--verbose", action="store_true", help="log filter diagnostics")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("track", help="track an object through a directory of PPM frames")
    t.add_argument("--frames", required=True, type=Path, help="directory of .ppm files")
    t.add_argument("--init", required=True, type=_region, help="initial box cx,cy,w,h")
    t.add_argument("--config", type=Path, help="key=value tracker configuration")
    t.add_argument("--out", required=True, type=Path, help="track CSV to write")

    s = sub.add_parser("synth", help="render a synthetic scene with ground truth")
    s.add_argument("--scenario", required=True, choices=PRESETS)
    s.add_argument("--out", required=True, type=Path, help="output directory")
    s.add_argument("--seed", type=int, default=0)

    e = sub.add_parser("eval", help="per-frame centre error of a track against ground truth")
    e.add_argument("--pred", required=True, type=Path, help="track CSV")
    e.add_argument("--truth", required=True, type=Path, help="truth CSV")
    e.add_argument("--out", required=True, type=Path, help="summary CSV to write")

    b = sub.add_parser("bench", help="compare fusion modes over seeded runs of a synthetic scene")
    b.add_argument("--scenario", required=True, choices=PRESETS)
    b.add_argument("--runs", type=_positive, default=10)
    b.add_argument("--modes", type=_modes, default=list(FUSION_MODES))
    b.add_argument("--config", type=Path, help="base tracker configuration")
    b.add_argument("--seed", type=int, default=0, help="scene seed; run r uses tracker seed r")
    b.add_argument("--out", required=True, type=Path, help="per-frame error CSV to write")
    return p


def _config(path) -> TrackerConfig:
    return TrackerConfig() if path is None else load_config(path)


def cmd_track(args) -> None:
    frames = io.load_frames(args.frames)
    outputs = track(frames, args.init, _config(args.config))
    args.out.write_text(io.write_track_csv(outputs), newline="\n")


def cmd_synth(args) -> None:
    frames, truth = generate(scenario_preset(args.scenario, seed=args.seed))
    args.out.mkdir(parents=True, exist_ok=True)
    digits = max(4, len(str(len(frames) - 1)))
    for t, f in enumerate(frames):
        io.save_ppm(args.out / f"frame_{t:0{digits}d}.ppm", f)
    (args.out / "truth.csv").write_text(io.write_truth_csv(truth), newline="\n")


def cmd_eval(args) -> None:
    pred = io.parse_track_csv(args.pred.read_text())
    frames, truth = io.parse_truth_csv(args.truth.read_text())
    err, mean = io.mean_center_error(pred, truth, frames)
    args.out.write_text(io.write_error_csv({"center_error": err}, frames), newline="\n")
    print(f"mean center error {mean:.3f} px over {len(err)} frames")


def cmd_bench(args) -> None:
    base = _config(args.config)
    frames, truth = generate(scenario_preset(args.scenario, seed=args.seed))
    columns = {}
    for mode in args.modes:
        runs = [track(frames, truth[0], base.replace(fusion_mode=mode, rng_seed=r)) for r in range(args.runs)]
        columns[mode], mean = io.mean_center_error_runs(runs, truth)
        print(f"{mode:>13s}  mean center error {mean:8.3f} px")
    args.out.write_text(io.write_error_csv(columns, range(len(truth))), newline="\n")


COMMANDS = {"track": cmd_track, "synth": cmd_synth, "eval": cmd_eval, "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        exc.parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (TrackingError, OSError, ValueError) as exc:
        print(f"bmatrack {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
