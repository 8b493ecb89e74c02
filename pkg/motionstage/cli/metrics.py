"""``metrics``: physical metrics report for one or two characters."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..errors import EXIT_OK, ConfigError
from ..formats.grid import read_grid
from ..formats.mesh import read_mesh_sequence
from ..formats.motion import read_motion
from ..formats.report import write_report
from ..models.metrics import ContactParams
from ..services.geometry import WINDING_THRESHOLD
from ..services.metrics import evaluate

logger = logging.getLogger(__name__)


@dataclass(kw_only=True)
class Metrics:
    """Compute FS, FP, and (when inputs allow) HSP and HHP, and write a key=value report."""

    motion_a: Path
    report: Path
    motion_b: Optional[Path] = None
    mesh_a: Optional[Path] = None
    mesh_b: Optional[Path] = None
    grid: Optional[Path] = None
    height_eps: float = 0.05
    ground_z: float = 0.0
    threshold: float = WINDING_THRESHOLD

    def run(self) -> int:
        if (self.mesh_a is None) != (self.mesh_b is None):
            raise ConfigError("--mesh-a and --mesh-b go together")
        seq_a = read_motion(self.motion_a)
        seq_b = read_motion(self.motion_b) if self.motion_b is not None else None
        meshes = None
        if self.mesh_a is not None:
            meshes = (read_mesh_sequence(self.mesh_a), read_mesh_sequence(self.mesh_b))
        grid = read_grid(self.grid) if self.grid is not None else None
        result = evaluate(
            seq_a,
            ContactParams(height_eps=self.height_eps, ground_z=self.ground_z),
            seq_b,
            grid=grid,
            meshes=meshes,
            threshold=self.threshold,
        )
        write_report(self.report, result.as_record())
        logger.info("metrics: fs=%.6g fp=%.6g hsp=%s hhp=%s", result.fs, result.fp, result.hsp, result.hhp)
        return EXIT_OK
