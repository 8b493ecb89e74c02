"""Hand-retrieval index and query vectors.

Index: one entry per line, ``clip_id<TAB>length<TAB>v1 v2 ... vd``. Clip
data for ``clip_id`` lives in ``<clips dir>/<clip_id>.hand`` (hand-clip
format, see ``formats.motion``). Query: a single line of ``d`` floats.
HHI query table: ``text<TAB>v1 ... vd`` per line, mapping an HHI
description to its embedding. Blank lines and ``#`` comments are skipped.
"""

from pathlib import Path
from typing import Dict, Iterator, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from ..errors import FormatError
from ..models.hands import EmbeddingIndex
from .motion import format_row, parse_row

CLIP_SUFFIX = ".hand"


def _records(path) -> Iterator[Tuple[int, str]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise FormatError(f"cannot read file ({exc})", str(path)) from exc
    for number, line in enumerate(text.splitlines(), start=1):
        if line.strip() and not line.lstrip().startswith("#"):
            yield number, line.rstrip("\r\n")


def _vector(text: str, path, line: int) -> np.ndarray:
    return parse_row(text, len(text.split()), str(path), line)


def read_index(path, clips_dir: Optional[Path] = None) -> EmbeddingIndex:
    ids, lengths, vectors, paths = [], [], [], []
    for number, line in _records(path):
        fields = line.split("\t")
        if len(fields) != 3:
            raise FormatError(f"expected 3 tab-separated fields, got {len(fields)}", str(path), number)
        clip_id, length, floats = (f.strip() for f in fields)
        if not clip_id:
            raise FormatError("empty clip id", str(path), number)
        try:
            length_value = int(length)
        except ValueError as exc:
            raise FormatError(f"clip length is not an integer: {length!r}", str(path), number) from exc
        vector = _vector(floats, path, number)
        if vectors and len(vector) != len(vectors[0]):
            raise FormatError(f"embedding has {len(vector)} values, earlier rows have {len(vectors[0])}", str(path), number)
        ids.append(clip_id)
        lengths.append(length_value)
        vectors.append(vector)
        paths.append(str(Path(clips_dir) / f"{clip_id}{CLIP_SUFFIX}") if clips_dir is not None else None)
    embeddings = np.array(vectors) if vectors else np.zeros((0, 0))
    try:
        return EmbeddingIndex(clip_ids=ids, lengths=lengths, embeddings=embeddings, clip_paths=paths)
    except ValidationError as exc:
        raise FormatError(f"invalid index: {exc.errors()[0]['msg']}", str(path)) from exc


def write_index(path, index: EmbeddingIndex) -> None:
    lines = [f"{c}\t{n}\t{format_row(v)}" for c, n, v in zip(index.clip_ids, index.lengths, index.embeddings)]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def read_query(path) -> np.ndarray:
    records = list(_records(path))
    if len(records) != 1:
        raise FormatError(f"query file holds {len(records)} vectors, expected 1", str(path))
    number, line = records[0]
    return _vector(line, path, number)


def write_query(path, vector) -> None:
    Path(path).write_text(format_row(vector) + "\n", encoding="utf-8")


def read_hhi_queries(path) -> Dict[str, np.ndarray]:
    """HHI text -> embedding, in file order."""
    table: Dict[str, np.ndarray] = {}
    for number, line in _records(path):
        text, sep, floats = line.partition("\t")
        if not sep or not text.strip():
            raise FormatError("expected 'text<TAB>floats'", str(path), number)
        table[text.strip()] = _vector(floats, path, number)
    return table
