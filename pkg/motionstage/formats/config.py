"""Pipeline configuration files.

One ``key=value`` per line; ``#`` starts a comment and blank lines are
skipped. Keys are the ``PipelineConfig`` fields. Relative paths resolve
against the directory holding the config file.
"""

from pathlib import Path
from typing import Dict

from pydantic import ValidationError

from ..errors import ConfigError, FormatError
from ..models.pipeline import PipelineConfig

PATH_KEYS = (
    "catalog",
    "navgrid",
    "orders",
    "motion_a",
    "motion_b",
    "hhi_a",
    "hhi_b",
    "grid",
    "hand_index",
    "hand_clips",
    "hand_queries",
    "output_dir",
)


def parse_pairs(text: str, path=None) -> Dict[str, str]:
    pairs: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise FormatError("expected key=value", None if path is None else str(path), number)
        if key in pairs:
            raise FormatError(f"duplicate key '{key}'", None if path is None else str(path), number)
        pairs[key] = value.strip()
    return pairs


def build_config(pairs: Dict[str, object], base_dir: Path) -> PipelineConfig:
    values = dict(pairs)
    for key in PATH_KEYS:
        if isinstance(values.get(key), str) and values[key]:
            candidate = Path(values[key])
            values[key] = candidate if candidate.is_absolute() else base_dir / candidate
    try:
        return PipelineConfig(**values)
    except ValidationError as exc:
        problems = "; ".join(f"{'.'.join(str(p) for p in e['loc'])}: {e['msg']}" for e in exc.errors())
        raise ConfigError(f"invalid pipeline configuration: {problems}") from exc


def read_config(path, **overrides) -> PipelineConfig:
    """Load ``path``; ``overrides`` (e.g. a command-line seed) replace file values."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read configuration {path} ({exc})") from exc
    pairs: Dict[str, object] = dict(parse_pairs(text, path))
    pairs.update({k: v for k, v in overrides.items() if v is not None})
    return build_config(pairs, path.parent)
