"""End-to-end pipeline configuration."""

from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, DirectoryPath, Field, FilePath, model_validator

from .sync import ORDER_SECONDS, SYSTEM_FPS


class PipelineConfig(BaseModel):
    """Everything one pipeline run reads. Input paths must exist when the config is loaded."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    catalog: FilePath
    navgrid: FilePath
    orders: Optional[FilePath] = None
    motion_a: FilePath
    motion_b: FilePath
    hhi_a: Optional[FilePath] = None
    hhi_b: Optional[FilePath] = None
    grid: Optional[FilePath] = None
    hand_index: Optional[FilePath] = None
    hand_clips: Optional[DirectoryPath] = None
    hand_queries: Optional[FilePath] = None
    hand_mode: Literal["flat", "mean", "retrieved"] = "flat"
    hand_joints: int = Field(default=30, ge=1)

    seed: int = Field(ge=0)
    scene_size: float = Field(default=3.0, gt=0.0)
    scene_dims: int = Field(default=32, ge=2)
    k_max: int = Field(default=10, ge=0, le=64)
    t_floor: Optional[float] = None
    height_eps: float = Field(default=0.05, gt=0.0)
    ground_z: float = 0.0
    hhp_threshold: float = Field(default=0.02, gt=0.0)
    max_iterations: int = Field(default=8, ge=1)
    interval_margin: int = Field(default=0, ge=0)
    buffer_frames: int = Field(default=4, ge=1)
    clip_seconds: float = Field(default=ORDER_SECONDS, gt=0.0)
    fps: int = Field(default=SYSTEM_FPS, gt=0)
    output_dir: Path

    @model_validator(mode="after")
    def _check_hand_inputs(self):
        if self.hand_mode != "flat" and (self.hand_index is None or self.hand_clips is None):
            raise ValueError(f"hand_mode={self.hand_mode} needs hand_index and hand_clips")
        if self.hand_mode == "retrieved" and self.hand_queries is None:
            raise ValueError("hand_mode=retrieved needs hand_queries")
        return self


class PipelineResult(BaseModel):
    """Outcome of a pipeline run: exit status, where the artifacts went and which stage failed."""

    model_config = ConfigDict(frozen=True)

    status: int
    output_dir: Path
    artifacts: List[str] = Field(default_factory=list)
    failed_stage: Optional[str] = None
    detail: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.status == 0
