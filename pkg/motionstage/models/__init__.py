"""Domain models."""

from .geometry import Hull2D, MeshSequence, ObstaclePattern, TriMesh
from .hands import EmbeddingIndex, IndexEntry
from .metrics import ContactParams, MetricsReport
from .motion import CanonicalPair, HandClip, MarkerFrame, MotionSequence, Quaternion
from .pipeline import PipelineConfig, PipelineResult
from .plot import (
    CharacterOrders,
    CharacterQueues,
    Command,
    CommandQueues,
    CommandScript,
    Hhi,
    Locomotion,
    NavGrid,
    QueuedCommand,
    SceneCatalog,
    SceneInteraction,
    SceneObject,
    ScriptWarning,
    SharedHhi,
    UnknownItem,
)
from .revision import CollisionInterval, RevisionConfig, RevisionReport, RevisionStep
from .scene import SceneSynthParams, SdfGrid
from .sync import JunctionBlendParams, OrderSegment, SegmentAlignment
