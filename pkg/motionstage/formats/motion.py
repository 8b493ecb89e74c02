"""Motion and hand-clip text files.

A motion file::

    fps=40 frames=<N> markers=67
    <204 floats>            one line per frame: 67 markers then the pelvis, x y z each
    ...
    rotations joints=<J>    optional section, one line of 4*J floats per frame
    ...
    hands joints=<J>        optional section, same layout
    ...

Floats use ``.`` as the radix and are written with 17 significant digits,
so a written file reads back to the same arrays. Quaternions are w x y z
per joint. Blank lines are ignored. A hand clip uses the same grammar with
``markers=0``: no frame lines, and the ``hands`` section is mandatory.
"""

import re
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from ..errors import FormatError
from ..models.motion import MARKER_COUNT, HandClip, MotionSequence

HEADER_RE = re.compile(r"^fps=(\d+)\s+frames=(\d+)\s+markers=(\d+)$")
SECTION_RE = re.compile(r"^(rotations|hands)\s+joints=(\d+)$")
SECTIONS = ("rotations", "hands")


def format_row(values) -> str:
    return " ".join(format(float(v), ".17g") for v in np.ravel(values))


def parse_row(text: str, expected: int, path: Optional[str], line: int) -> np.ndarray:
    """Space-separated finite floats, exactly ``expected`` of them."""
    tokens = text.split()
    if len(tokens) != expected:
        raise FormatError(f"expected {expected} values, got {len(tokens)}", path, line)
    try:
        row = np.array([float(t) for t in tokens], dtype=np.float64)
    except ValueError as exc:
        raise FormatError(f"not a number ({exc})", path, line) from exc
    if not np.all(np.isfinite(row)):
        raise FormatError("NaN or Inf value", path, line)
    return row


def _lines(text: str) -> Iterator[Tuple[int, str]]:
    for number, line in enumerate(text.splitlines(), start=1):
        if line.strip():
            yield number, line.strip()


def _parse(text: str, path: Optional[str]) -> Tuple[int, int, int, np.ndarray, Dict[str, np.ndarray]]:
    lines = list(_lines(text))
    if not lines:
        raise FormatError("empty motion file", path, 1)
    number, header = lines[0]
    match = HEADER_RE.match(header)
    if match is None:
        raise FormatError("bad header, expected 'fps=<int> frames=<int> markers=<int>'", path, number)
    fps, frames, markers = (int(g) for g in match.groups())
    width = 3 * (markers + 1) if markers else 0

    cursor = 1
    rows: List[np.ndarray] = []
    if markers:
        if len(lines) < 1 + frames:
            raise FormatError(f"expected {frames} frame lines, got {len(lines) - 1}", path, lines[-1][0])
        for number, line in lines[1 : 1 + frames]:
            rows.append(parse_row(line, width, path, number))
        cursor = 1 + frames
    body = np.stack(rows) if rows else np.zeros((0, width))

    sections: Dict[str, np.ndarray] = {}
    while cursor < len(lines):
        number, line = lines[cursor]
        match = SECTION_RE.match(line)
        if match is None:
            raise FormatError("expected a 'rotations' or 'hands' section header", path, number)
        name, joints = match.group(1), int(match.group(2))
        if name in sections:
            raise FormatError(f"duplicate '{name}' section", path, number)
        chunk = lines[cursor + 1 : cursor + 1 + frames]
        if len(chunk) != frames:
            raise FormatError(f"'{name}' section needs {frames} lines, got {len(chunk)}", path, number)
        data = np.stack([parse_row(row, 4 * joints, path, n) for n, row in chunk]) if frames else np.zeros((0, 4 * joints))
        sections[name] = data.reshape(frames, joints, 4)
        cursor += 1 + frames
    return fps, frames, markers, body, sections


def loads_motion(text: str, path: Optional[str] = None) -> MotionSequence:
    fps, frames, markers, body, sections = _parse(text, path)
    if markers != MARKER_COUNT:
        raise FormatError(f"motion files carry {MARKER_COUNT} markers, header says {markers}", path, 1)
    body = body.reshape(frames, MARKER_COUNT + 1, 3)
    try:
        return MotionSequence(markers=body[:, :MARKER_COUNT], pelvis=body[:, MARKER_COUNT], fps=fps, **sections)
    except ValidationError as exc:
        raise FormatError(f"invalid motion: {exc.errors()[0]['msg']}", path) from exc


def dumps_motion(seq: MotionSequence) -> str:
    lines = [f"fps={seq.fps} frames={seq.n_frames} markers={MARKER_COUNT}"]
    for i in range(seq.n_frames):
        lines.append(format_row(np.vstack([seq.markers[i], seq.pelvis[i][None]])))
    for name in SECTIONS:
        channel = getattr(seq, name)
        if channel is not None:
            lines.append(f"{name} joints={channel.shape[1]}")
            lines.extend(format_row(frame) for frame in channel)
    return "\n".join(lines) + "\n"


def read_motion(path) -> MotionSequence:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise FormatError(f"cannot read motion file ({exc})", str(path)) from exc
    return loads_motion(text, str(path))


def write_motion(path, seq: MotionSequence) -> None:
    Path(path).write_text(dumps_motion(seq), encoding="utf-8")


def loads_hand_clip(text: str, path: Optional[str] = None) -> HandClip:
    fps, frames, markers, _, sections = _parse(text, path)
    if markers != 0:
        raise FormatError(f"hand clips carry no markers, header says {markers}", path, 1)
    if "hands" not in sections:
        raise FormatError("hand clip without a 'hands' section", path)
    try:
        return HandClip(rotations=sections["hands"], fps=fps)
    except ValidationError as exc:
        raise FormatError(f"invalid hand clip: {exc.errors()[0]['msg']}", path) from exc


def dumps_hand_clip(clip: HandClip) -> str:
    lines = [f"fps={clip.fps} frames={clip.n_frames} markers=0", f"hands joints={clip.n_joints}"]
    lines.extend(format_row(frame) for frame in clip.rotations)
    return "\n".join(lines) + "\n"


def read_hand_clip(path) -> HandClip:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise FormatError(f"cannot read hand clip ({exc})", str(path)) from exc
    return loads_hand_clip(text, str(path))


def write_hand_clip(path, clip: HandClip) -> None:
    Path(path).write_text(dumps_hand_clip(clip), encoding="utf-8")
