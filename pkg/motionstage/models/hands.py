"""Hand-pose retrieval index."""

from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from ._arrays import frozen_array


class IndexEntry(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    clip_id: str
    length: int
    embedding: np.ndarray
    clip_path: Optional[str] = None


class EmbeddingIndex(BaseModel):
    """Column-wise table of clip ids, clip lengths and unit embeddings.

    Entries are kept sorted by ``clip_id`` so that a first-maximum scan breaks
    ties in favor of the smallest id. Embeddings are L2-normalized on
    construction; zero vectors are rejected.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    clip_ids: Tuple[str, ...] = ()
    lengths: Tuple[int, ...] = ()
    embeddings: np.ndarray
    clip_paths: Tuple[Optional[str], ...] = ()

    @model_validator(mode="before")
    @classmethod
    def _sort_and_normalize(cls, data):
        if not isinstance(data, dict):
            return data
        ids = list(data.get("clip_ids", ()))
        lengths = list(data.get("lengths", ()))
        vectors = np.asarray(data.get("embeddings", np.zeros((0, 0))), dtype=np.float64)
        paths = list(data.get("clip_paths", ())) or [None] * len(ids)
        if vectors.ndim != 2 or len(vectors) != len(ids) or len(lengths) != len(ids) or len(paths) != len(ids):
            raise ValueError("clip ids, lengths, paths and embeddings must have one row per entry")
        if len(set(ids)) != len(ids):
            raise ValueError("clip ids must be unique")
        if any(n < 1 for n in lengths):
            raise ValueError("clip lengths must be positive")
        norms = np.linalg.norm(vectors, axis=1, keepdims=True) if len(ids) else np.ones((0, 1))
        if not np.all(np.isfinite(vectors)) or np.any(norms < 1e-12):
            raise ValueError("embeddings must be finite and non-zero")
        order = sorted(range(len(ids)), key=lambda i: ids[i])
        return {
            "clip_ids": tuple(ids[i] for i in order),
            "lengths": tuple(int(lengths[i]) for i in order),
            "embeddings": frozen_array(vectors[order] / norms[order] if len(ids) else vectors, (None, None), "embeddings"),
            "clip_paths": tuple(paths[i] for i in order),
        }

    @classmethod
    def from_entries(cls, entries: Sequence[IndexEntry]) -> "EmbeddingIndex":
        dim = len(entries[0].embedding) if entries else 0
        return cls(
            clip_ids=[e.clip_id for e in entries],
            lengths=[e.length for e in entries],
            embeddings=np.array([e.embedding for e in entries]).reshape(len(entries), dim),
            clip_paths=[e.clip_path for e in entries],
        )

    @property
    def dim(self) -> int:
        return int(self.embeddings.shape[1])

    def __len__(self) -> int:
        return len(self.clip_ids)

    def entries(self) -> List[IndexEntry]:
        return [
            IndexEntry(clip_id=c, length=n, embedding=v, clip_path=p)
            for c, n, v, p in zip(self.clip_ids, self.lengths, self.embeddings, self.clip_paths)
        ]

    def position(self, clip_id: str) -> int:
        return self.clip_ids.index(clip_id)
