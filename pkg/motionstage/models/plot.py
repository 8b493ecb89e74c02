"""Plot and command models.

A character's orders are a list of commands of three kinds: locomotion to
nowhere in particular (``None``) or towards an object, an interaction with an
object (sit, lie), and a two-character HHI described by free text. Items the
parser cannot interpret are kept as ``UnknownItem`` and flagged invalid.
"""

from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ._arrays import frozen_array

SUPPORTED_MOTIONS = ("sit", "lie")
MOTION_ALIASES = {"lay": "lie", "sitting": "sit", "lying": "lie"}


class Locomotion(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["locomotion"] = "locomotion"
    target: Optional[str] = None


class SceneInteraction(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["scene"] = "scene"
    object: str = Field(min_length=1)
    motion: str

    @field_validator("motion")
    @classmethod
    def _check_motion(cls, value: str) -> str:
        value = MOTION_ALIASES.get(value.lower(), value.lower())
        if value not in SUPPORTED_MOTIONS:
            raise ValueError(f"unsupported motion type '{value}'")
        return value


class Hhi(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["hhi"] = "hhi"
    text: str = Field(min_length=1)

    @field_validator("text")
    @classmethod
    def _strip(cls, value: str) -> str:
        value = value.strip()
        if not value:
            raise ValueError("HHI text must not be empty")
        return value


class UnknownItem(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["unknown"] = "unknown"
    raw: str


Command = Annotated[Union[Locomotion, SceneInteraction, Hhi, UnknownItem], Field(discriminator="kind")]


def is_valid(command) -> bool:
    return not isinstance(command, UnknownItem)


class CharacterOrders(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: str
    commands: List[Command] = Field(default_factory=list)

    @property
    def validity(self) -> List[bool]:
        return [is_valid(c) for c in self.commands]

    def hhi_texts(self) -> List[str]:
        return [c.text for c in self.commands if isinstance(c, Hhi)]


class CommandScript(BaseModel):
    """Orders for every character, in the order they appeared."""

    model_config = ConfigDict(frozen=True)

    characters: List[CharacterOrders] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_labels(self):
        labels = [c.label for c in self.characters]
        if len(set(labels)) != len(labels):
            raise ValueError("character labels must be unique")
        return self

    @property
    def labels(self) -> List[str]:
        return [c.label for c in self.characters]

    def orders(self, label: str) -> CharacterOrders:
        for character in self.characters:
            if character.label == label:
                return character
        raise KeyError(label)

    @property
    def is_paired(self) -> bool:
        """True when every character carries the same HHI texts in the same order."""
        texts = [c.hhi_texts() for c in self.characters]
        return all(t == texts[0] for t in texts[1:])

    @property
    def all_valid(self) -> bool:
        return all(all(c.validity) for c in self.characters)


class ScriptWarning(BaseModel):
    """One mutation made while revising a script; ``index`` is the command position before the change."""

    model_config = ConfigDict(frozen=True)

    character: str
    index: int
    rule: str
    message: str


class SceneObject(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    name: str = Field(min_length=1)
    bbox_min: np.ndarray
    bbox_max: np.ndarray

    @field_validator("bbox_min", "bbox_max", mode="before")
    @classmethod
    def _check_corner(cls, value, info):
        return frozen_array(value, (3,), info.field_name)

    @model_validator(mode="after")
    def _check_box(self):
        if not np.all(self.bbox_min < self.bbox_max):
            raise ValueError(f"object '{self.name}' bbox min must be below max on every axis")
        return self


class NavGrid(BaseModel):
    """Walkability raster. Row 0 is the northmost row; ``origin`` is the south-west corner."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    walkable: np.ndarray
    origin: Tuple[float, float] = (0.0, 0.0)
    resolution: float = Field(gt=0.0)

    @field_validator("walkable", mode="before")
    @classmethod
    def _check_walkable(cls, value):
        return frozen_array(value, (None, None), "walkable", dtype=bool)

    @property
    def shape(self) -> Tuple[int, int]:
        return tuple(self.walkable.shape)

    def cell_center(self, row: int, col: int) -> np.ndarray:
        rows = self.walkable.shape[0]
        return np.array(
            [
                self.origin[0] + (col + 0.5) * self.resolution,
                self.origin[1] + (rows - row - 0.5) * self.resolution,
            ]
        )

    def cell_of(self, point) -> Optional[Tuple[int, int]]:
        """Cell containing ``point`` or None when it falls off the raster."""
        rows, cols = self.walkable.shape
        col = int(np.floor((point[0] - self.origin[0]) / self.resolution))
        row_from_south = int(np.floor((point[1] - self.origin[1]) / self.resolution))
        row = rows - 1 - row_from_south
        if 0 <= row < rows and 0 <= col < cols:
            return row, col
        return None

    def is_walkable(self, point) -> bool:
        cell = self.cell_of(point)
        return cell is not None and bool(self.walkable[cell])


class SceneCatalog(BaseModel):
    model_config = ConfigDict(frozen=True)

    objects: List[SceneObject] = Field(default_factory=list)
    navgrid: NavGrid

    @property
    def names(self) -> List[str]:
        """Distinct object names in first-seen order."""
        seen: Dict[str, None] = {}
        for obj in self.objects:
            seen.setdefault(obj.name, None)
        return list(seen)

    def named(self, name: str) -> List[SceneObject]:
        return [o for o in self.objects if o.name == name]

    def resolve(self, name: str) -> Optional[str]:
        """Catalog spelling of ``name`` (case-insensitive) or None."""
        for known in self.names:
            if known.lower() == name.lower():
                return known
        return None


class QueuedCommand(BaseModel):
    model_config = ConfigDict(frozen=True)

    seq: int
    command: Command


class SharedHhi(BaseModel):
    """An HHI both characters perform; ``seq`` maps each character label to its position."""

    model_config = ConfigDict(frozen=True)

    text: str
    seq: Dict[str, int]


class CharacterQueues(BaseModel):
    model_config = ConfigDict(frozen=True)

    locomotion: List[QueuedCommand] = Field(default_factory=list)
    scene: List[QueuedCommand] = Field(default_factory=list)


class CommandQueues(BaseModel):
    """Commands split by generation module, with sequence numbers to restore global order."""

    model_config = ConfigDict(frozen=True)

    labels: List[str] = Field(default_factory=list)
    characters: Dict[str, CharacterQueues] = Field(default_factory=dict)
    hhi: List[SharedHhi] = Field(default_factory=list)
