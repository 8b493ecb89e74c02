"""Collision revision models."""

from typing import List

from pydantic import BaseModel, ConfigDict, Field, model_validator


class CollisionInterval(BaseModel):
    """Inclusive frame range ``[start, end]`` of consecutive collided frames."""

    model_config = ConfigDict(frozen=True)

    start: int = Field(ge=0)
    end: int = Field(ge=0)

    @model_validator(mode="after")
    def _check_order(self):
        if self.start > self.end:
            raise ValueError("interval start must not exceed end")
        return self

    @property
    def length(self) -> int:
        return self.end - self.start + 1


class RevisionConfig(BaseModel):
    """``hhp_threshold`` is the fraction of intersecting vertices above which a frame counts as collided."""

    model_config = ConfigDict(frozen=True)

    hhp_threshold: float = Field(default=0.02, gt=0.0)
    max_iterations: int = Field(default=8, ge=1)
    interval_margin: int = Field(default=0, ge=0)
    winding_threshold: float = 0.5


class RevisionStep(BaseModel):
    model_config = ConfigDict(frozen=True)

    iteration: int
    interval: CollisionInterval
    collided_before: int
    collided_after: int
    accepted: bool


class RevisionReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    iterations: int = 0
    collided_before: int = 0
    collided_after: int = 0
    steps: List[RevisionStep] = Field(default_factory=list)
    residual: List[CollisionInterval] = Field(default_factory=list)

    @property
    def resolved(self) -> bool:
        return self.collided_after == 0

    def as_record(self):
        return {
            "iterations": self.iterations,
            "collided_before": self.collided_before,
            "collided_after": self.collided_after,
            "accepted_steps": sum(1 for s in self.steps if s.accepted),
            "residual_intervals": [f"{i.start}-{i.end}" for i in self.residual],
        }
