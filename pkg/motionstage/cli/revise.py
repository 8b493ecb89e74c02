"""``revise``: retime two characters around their collisions."""

import logging
from dataclasses import dataclass
from pathlib import Path

from ..errors import EXIT_OK
from ..formats.motion import read_motion, write_motion
from ..formats.report import write_report
from ..models.revision import RevisionConfig
from ..services.revision import revise

logger = logging.getLogger(__name__)


@dataclass(kw_only=True)
class Revise:
    """Detect human-human collisions and retime both characters until they clear."""

    motion_a: Path
    motion_b: Path
    out_a: Path
    out_b: Path
    report: Path
    threshold: float = 0.02
    max_iter: int = 8
    margin: int = 0
    """Frames added on both sides of every collision interval before retiming."""

    def run(self) -> int:
        cfg = RevisionConfig(hhp_threshold=self.threshold, max_iterations=self.max_iter, interval_margin=self.margin)
        seq_a, seq_b, result = revise(read_motion(self.motion_a), read_motion(self.motion_b), cfg=cfg)
        write_motion(self.out_a, seq_a)
        write_motion(self.out_b, seq_b)
        write_report(self.report, result.as_record())
        logger.info("revision: %d -> %d collided frames", result.collided_before, result.collided_after)
        return EXIT_OK
