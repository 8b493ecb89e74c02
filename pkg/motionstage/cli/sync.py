"""``sync blend`` and ``sync align``."""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..errors import EXIT_OK
from ..formats.motion import read_motion, write_motion
from ..formats.orders import read_orders
from ..models.sync import ORDER_SECONDS, SYSTEM_FPS, JunctionBlendParams
from ..services.sync import align_segment_lengths, blend_junction, segment_orders


def _first_character(path: Path):
    script = read_orders(path)
    return script.characters[0].commands if script.characters else []


@dataclass(kw_only=True)
class SyncBlend:
    """Concatenate two motions, blending the first frames of the second one."""

    prev: Path
    next: Path
    out: Path
    buffer: int = 4

    def run(self) -> int:
        joined = blend_junction(read_motion(self.prev), read_motion(self.next), JunctionBlendParams(buffer_frames=self.buffer))
        write_motion(self.out, joined)
        return EXIT_OK


@dataclass(kw_only=True)
class SyncAlign:
    """Print the frame budget and hover pads per HHI segment of two characters' orders."""

    orders_a: Path
    orders_b: Path
    clip_seconds: float = ORDER_SECONDS
    fps: int = SYSTEM_FPS
    out: Optional[Path] = None
    """Write the table here instead of standard output."""

    def run(self) -> int:
        segments = segment_orders(_first_character(self.orders_a), _first_character(self.orders_b))
        lines = ["segment\ttarget_frames\tpad_a\tpad_b"]
        for k, (seg_a, seg_b) in enumerate(segments):
            alignment = align_segment_lengths(seg_a, seg_b, self.clip_seconds, self.fps)
            lines.append(f"{k}\t{alignment.target_frames}\t{alignment.pad_a}\t{alignment.pad_b}")
        table = "\n".join(lines) + "\n"
        if self.out is not None:
            self.out.write_text(table, encoding="utf-8")
        else:
            print(table, end="")
        return EXIT_OK
