"""``scene-synth``: synthesize a random SDF scene around a motion."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Optional

from ..errors import EXIT_OK
from ..formats.grid import write_grid
from ..formats.mesh import read_mesh_sequence
from ..formats.motion import read_motion
from ..services.metrics import marker_meshes
from ..services.scene import params_for_motion, synthesize_plane_based, synthesize_point_based, walkable_hull

logger = logging.getLogger(__name__)


@dataclass(kw_only=True)
class SceneSynth:
    """Synthesize an obstacle scene around a motion and write it as an SDF grid."""

    motion: Path
    """Motion file; its pelvis at frame 0 centers the box."""
    seed: int
    out: Path
    meshes: Optional[Path] = None
    """Directory of per-frame body meshes; marker hulls are used when absent."""
    size: float = 3.0
    dims: int = 128
    k_max: int = 10
    t_floor: Optional[float] = None
    """Floor height; defaults to the ground height."""
    ground_z: float = 0.0
    method: Literal["plane", "point"] = "plane"

    def run(self) -> int:
        seq = read_motion(self.motion)
        meshes = read_mesh_sequence(self.meshes) if self.meshes is not None else marker_meshes(seq)
        hull = walkable_hull(meshes)
        params = params_for_motion(
            meshes,
            seq.pelvis[0],
            self.seed,
            box_size=self.size,
            dims=self.dims,
            k_max=self.k_max,
            t_floor=self.t_floor,
            ground_z=self.ground_z,
        )
        if self.method == "plane":
            grid, patterns = synthesize_plane_based(hull, params)
            logger.info("scene with %d obstacles written to %s", len(patterns), self.out)
        else:
            grid = synthesize_point_based(hull, params)
            logger.info("point-based scene written to %s", self.out)
        write_grid(self.out, grid)
        return EXIT_OK
