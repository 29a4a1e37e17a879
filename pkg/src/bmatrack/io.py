"""Binary PPM frames, track and ground-truth CSV files, and the centre-error metric.

Every CSV written here uses LF line endings and six decimal places for
real numbers, so equal inputs give byte-identical files.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .core import Frame, Region
from .errors import (
    CSVFormatError,
    FrameSequenceError,
    LengthMismatch,
    MalformedHeader,
    MaxvalUnsupported,
    TruncatedPixelData,
)
from .fusion import StepOutput

PathLike = Union[str, Path]

TRACK_HEADER = (
    "frame,x,y,vx,vy,hx,hy,pi_color,pi_texture,template_updated_color,template_updated_texture,ess"
)
TRUTH_HEADER = "frame,cx,cy,w,h"

_WHITESPACE = b" \t\n\r\v\f"


# ---------------------------------------------------------------- PPM


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, skipping ``#`` comments.

    Returns the tokens and the offset just past the last one.
    """
    tokens, pos, n = [], 0, len(data)
    while len(tokens) < count:
        while pos < n and data[pos] in _WHITESPACE:
            pos += 1
        if pos < n and data[pos] == ord("#"):
            end = data.find(b"\n", pos)
            if end < 0:
                raise MalformedHeader("header ends inside a comment")
            pos = end + 1
            continue
        if pos >= n:
            raise MalformedHeader(f"header ends after {len(tokens)} of {count} fields")
        start = pos
        while pos < n and data[pos] not in _WHITESPACE and data[pos] != ord("#"):
            pos += 1
        tokens.append(data[start:pos])
    return tokens, pos


def _header_int(token: bytes, what: str) -> int:
    if not token.isdigit():
        raise MalformedHeader(f"{what} {token!r} is not a decimal integer")
    return int(token)


def read_ppm(data: bytes, index: int = 0) -> Frame:
    """Decode a binary (``P6``) PPM image with maxval 255."""
    data = bytes(data)
    if not data.startswith(b"P6"):
        raise MalformedHeader(f"expected magic b'P6', got {data[:2]!r}")
    tokens, pos = _header_tokens(data, 4)
    if tokens[0] != b"P6":
        raise MalformedHeader(f"expected magic b'P6', got {tokens[0]!r}")
    width = _header_int(tokens[1], "width")
    height = _header_int(tokens[2], "height")
    maxval = _header_int(tokens[3], "maxval")
    if width < 1 or height < 1:
        raise MalformedHeader(f"image size {width}x{height} is empty")
    if maxval != 255:
        raise MaxvalUnsupported(f"maxval {maxval} is not supported, only 255")
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise MalformedHeader("maxval must be followed by a single whitespace byte")
    pos += 1
    need = width * height * 3
    raster = data[pos : pos + need]
    if len(raster) < need:
        raise TruncatedPixelData(f"expected {need} pixel bytes for {width}x{height}, got {len(raster)}")
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width, 3)
    return Frame(pixels.copy(), index=index)


def write_ppm(frame: Frame) -> bytes:
    return b"P6\n%d %d\n255\n" % (frame.width, frame.height) + frame.pixels.tobytes()


def load_ppm(path: PathLike, index: int = 0) -> Frame:
    return read_ppm(Path(path).read_bytes(), index=index)


def save_ppm(path: PathLike, frame: Frame) -> None:
    Path(path).write_bytes(write_ppm(frame))


_NUMBER = re.compile(r"(\d+)(?!.*\d)")


def frame_paths(directory: PathLike) -> list[Path]:
    """The ``.ppm`` files of ``directory`` in lexicographic name order.

    When every name carries a number (its last run of digits), the numbers
    must increase by exactly one from file to file; a gap or a name that
    sorts out of numeric order is an error rather than being skipped.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise FrameSequenceError(f"{directory} is not a directory")
    paths = sorted((p for p in directory.iterdir() if p.suffix.lower() == ".ppm" and p.is_file()), key=lambda p: p.name)
    if not paths:
        raise FrameSequenceError(f"no .ppm files in {directory}")
    numbers = [_NUMBER.search(p.stem) for p in paths]
    if all(numbers):
        values = [int(m.group(1)) for m in numbers]
        for prev, cur, p in zip(values, values[1:], paths[1:]):
            if cur != prev + 1:
                raise FrameSequenceError(f"{p.name} follows frame number {prev}; expected {prev + 1}")
    return paths


def load_frames(directory: PathLike) -> list[Frame]:
    """Read a frame directory; frame ``t`` is the ``t``-th file in name order."""
    paths = frame_paths(directory)
    frames = [load_ppm(p, index=t) for t, p in enumerate(paths)]
    for f, p in zip(frames[1:], paths[1:]):
        if f.shape != frames[0].shape:
            raise FrameSequenceError(f"{p.name} is {f.width}x{f.height}, the first frame is {frames[0].width}x{frames[0].height}")
    return frames


# ---------------------------------------------------------------- CSV


def _real(v: float) -> str:
    s = f"{v:.6f}"
    return "0.000000" if s == "-0.000000" else s


@dataclass(frozen=True)
class TrackRecord:
    """One line of a track file: the estimate and filter diagnostics for a frame."""

    frame: int
    x: float
    y: float
    vx: float
    vy: float
    hx: float
    hy: float
    pi: tuple = (0.5, 0.5)
    template_updated: tuple = (False, False)
    ess: float = 0.0

    @classmethod
    def from_output(cls, out: StepOutput) -> "TrackRecord":
        s = out.estimate
        return cls(
            frame=out.frame,
            x=s.x,
            y=s.y,
            vx=s.vx,
            vy=s.vy,
            hx=s.hx,
            hy=s.hy,
            pi=(out.posterior_of("color"), out.posterior_of("texture")),
            template_updated=(out.updated("color"), out.updated("texture")),
            ess=out.ess,
        )

    @property
    def center(self) -> tuple[float, float]:
        return self.x, self.y

    def to_line(self) -> str:
        reals = (self.x, self.y, self.vx, self.vy, self.hx, self.hy, *self.pi)
        flags = ("1" if f else "0" for f in self.template_updated)
        return ",".join([str(int(self.frame)), *map(_real, reals), *flags, _real(self.ess)])


def _as_record(r) -> TrackRecord:
    return r if isinstance(r, TrackRecord) else TrackRecord.from_output(r)


def write_track_csv(records: Iterable) -> str:
    """Serialise track records (or :class:`StepOutput` objects) to CSV text."""
    lines = [TRACK_HEADER] + [_as_record(r).to_line() for r in records]
    return "\n".join(lines) + "\n"


def _data_lines(text: str, header: str) -> list[tuple[int, list[str]]]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].strip() != header:
        raise CSVFormatError(f"expected header {header!r}")
    ncol = header.count(",") + 1
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.strip().split(",")
        if len(fields) != ncol:
            raise CSVFormatError(f"line {lineno}: expected {ncol} fields, got {len(fields)}")
        rows.append((lineno, fields))
    return rows


def _check_increasing(frames: Sequence[int]) -> None:
    for a, b in zip(frames, frames[1:]):
        if b <= a:
            raise CSVFormatError(f"frame {b} does not follow frame {a}")


def parse_track_csv(text: str) -> list[TrackRecord]:
    records = []
    for lineno, f in _data_lines(text, TRACK_HEADER):
        try:
            records.append(
                TrackRecord(
                    frame=int(f[0]),
                    x=float(f[1]),
                    y=float(f[2]),
                    vx=float(f[3]),
                    vy=float(f[4]),
                    hx=float(f[5]),
                    hy=float(f[6]),
                    pi=(float(f[7]), float(f[8])),
                    template_updated=(_flag(f[9]), _flag(f[10])),
                    ess=float(f[11]),
                )
            )
        except ValueError as exc:
            raise CSVFormatError(f"line {lineno}: {exc}") from None
    _check_increasing([r.frame for r in records])
    return records


def _flag(text: str) -> bool:
    if text not in ("0", "1"):
        raise ValueError(f"template flag must be 0 or 1, got {text!r}")
    return text == "1"


def write_truth_csv(regions: Sequence[Region], frames: Optional[Sequence[int]] = None) -> str:
    frames = range(len(regions)) if frames is None else frames
    lines = [TRUTH_HEADER]
    lines += [",".join([str(int(t)), *map(_real, (r.cx, r.cy, r.w, r.h))]) for t, r in zip(frames, regions)]
    return "\n".join(lines) + "\n"


def parse_truth_csv(text: str) -> tuple[list[int], list[Region]]:
    """Frame indices and ground-truth boxes of a truth file."""
    frames, regions = [], []
    for lineno, f in _data_lines(text, TRUTH_HEADER):
        try:
            frames.append(int(f[0]))
            regions.append(Region(*map(float, f[1:])))
        except ValueError as exc:
            raise CSVFormatError(f"line {lineno}: {exc}") from None
    _check_increasing(frames)
    return frames, regions


# ---------------------------------------------------------------- metrics


def _centers(pred) -> tuple[np.ndarray, Optional[list[int]]]:
    pred = list(pred)
    if pred and isinstance(pred[0], (TrackRecord, StepOutput)):
        recs = [_as_record(p) for p in pred]
        return np.array([r.center for r in recs], dtype=np.float64).reshape(-1, 2), [r.frame for r in recs]
    return np.asarray(pred, dtype=np.float64).reshape(-1, 2), None


def mean_center_error(pred, truth: Sequence[Region], truth_frames: Optional[Sequence[int]] = None):
    """Per-frame Euclidean distance of predicted centres to the truth centres.

    ``pred`` holds track records, step outputs or ``(x, y)`` pairs.  When
    both sides carry frame indices they must agree.  Returns the per-frame
    errors and their mean.
    """
    centers, pred_frames = _centers(pred)
    truth = list(truth)
    if len(centers) != len(truth):
        raise LengthMismatch(f"{len(centers)} predictions for {len(truth)} ground-truth frames")
    if pred_frames is not None and truth_frames is not None and list(pred_frames) != list(truth_frames):
        raise LengthMismatch("prediction and ground-truth frame indices differ")
    if not truth:
        return np.zeros(0), float("nan")
    t = np.array([(r.cx, r.cy) for r in truth], dtype=np.float64)
    err = np.hypot(centers[:, 0] - t[:, 0], centers[:, 1] - t[:, 1])
    return err, float(err.mean())


def mean_center_error_runs(runs: Sequence, truth: Sequence[Region]):
    """Average the per-frame error over several runs on the same ground truth."""
    if not runs:
        raise ValueError("need at least one run")
    per_run = np.stack([mean_center_error(r, truth)[0] for r in runs])
    per_frame = per_run.mean(axis=0)
    return per_frame, float(per_frame.mean())


def write_error_csv(columns: dict, frames: Sequence[int]) -> str:
    """``frame,<name>...`` table of per-frame errors plus a final ``mean`` row."""
    names = list(columns)
    data = [np.asarray(columns[n], dtype=np.float64) for n in names]
    lines = ["frame," + ",".join(names)]
    for i, t in enumerate(frames):
        lines.append(",".join([str(int(t)), *(_real(c[i]) for c in data)]))
    lines.append(",".join(["mean", *(_real(c.mean()) for c in data)]))
    return "\n".join(lines) + "\n"
