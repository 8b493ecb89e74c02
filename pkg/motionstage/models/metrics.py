"""Physical-compliance metric models."""

from typing import Annotated, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .motion import FOOT_MARKER_IDS, MARKER_COUNT

Measure = Annotated[float, Field(ge=0.0, allow_inf_nan=False)]


class ContactParams(BaseModel):
    """Foot contact predicate: a foot marker touches the ground when ``z - ground_z <= height_eps``."""

    model_config = ConfigDict(frozen=True)

    foot_marker_ids: Tuple[int, ...] = FOOT_MARKER_IDS
    height_eps: float = Field(default=0.05, gt=0.0)
    ground_z: float = 0.0

    @field_validator("foot_marker_ids")
    @classmethod
    def _check_ids(cls, value):
        if not value:
            raise ValueError("foot marker set must not be empty")
        if any(i < 0 or i >= MARKER_COUNT for i in value):
            raise ValueError(f"foot marker ids must lie in [0, {MARKER_COUNT})")
        return value


class MetricsReport(BaseModel):
    """FS, FP, HSP and HHP for one evaluated pair (or single character).

    ``hsp`` is the penalty magnitude summed over both characters, ``hsp_count``
    the number of marker samples with a negative SDF value. Metrics that were not
    computed (no grid, no second character) are None.
    """

    model_config = ConfigDict(frozen=True)

    fs: Measure
    fp: Measure
    hsp: Optional[Measure] = None
    hsp_a: Optional[Measure] = None
    hsp_b: Optional[Measure] = None
    hsp_count: Optional[int] = Field(default=None, ge=0)
    hhp: Optional[Measure] = None
    per_frame: Dict[str, List[float]] = Field(default_factory=dict)

    def as_record(self) -> Dict[str, object]:
        """Flat mapping for the key=value report writer."""
        record: Dict[str, object] = {}
        for name in ("fs", "fp", "hsp", "hsp_a", "hsp_b", "hsp_count", "hhp"):
            value = getattr(self, name)
            if value is not None:
                record[name] = value
        for name, values in self.per_frame.items():
            record[f"{name}_per_frame"] = values
        return record
