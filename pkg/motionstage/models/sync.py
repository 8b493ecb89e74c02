"""Synchronization models: junction buffers and HHI-delimited order segments."""

from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .plot import Command, Hhi

# One motion primitive lasts 0.25 s; an order is five primitives at 40 FPS.
PRIMITIVE_SECONDS = 0.25
PRIMITIVES_PER_ORDER = 5
SYSTEM_FPS = 40
ORDER_SECONDS = PRIMITIVE_SECONDS * PRIMITIVES_PER_ORDER


class JunctionBlendParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    buffer_frames: int = Field(default=4, ge=1)


class OrderSegment(BaseModel):
    """One character's commands up to and including an HHI command."""

    model_config = ConfigDict(frozen=True)

    commands: List[Command] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_hhi_terminal(self):
        for position, command in enumerate(self.commands):
            if isinstance(command, Hhi) and position != len(self.commands) - 1:
                raise ValueError("an HHI command may only close a segment")
        return self

    @property
    def hhi(self) -> Optional[Hhi]:
        if self.commands and isinstance(self.commands[-1], Hhi):
            return self.commands[-1]
        return None

    @property
    def pre_hhi_count(self) -> int:
        return len(self.commands) - (1 if self.hhi is not None else 0)


class SegmentAlignment(BaseModel):
    """Common pre-HHI frame budget for a segment pair and the hover pad for each side."""

    model_config = ConfigDict(frozen=True)

    target_frames: int = Field(ge=0)
    pad_a: int = Field(ge=0)
    pad_b: int = Field(ge=0)
