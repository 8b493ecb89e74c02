"""``pipeline``: the whole run from a configuration file."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..config import settings
from ..formats.config import read_config
from ..services.llm import build_client
from ..services.pipeline import run_pipeline

logger = logging.getLogger(__name__)


@dataclass(kw_only=True)
class Pipeline:
    """Run every stage on the inputs named in ``--config``; artifacts land in the output directory."""

    config: Path
    seed: Optional[int] = None
    """Overrides the configured seed."""
    output_dir: Optional[Path] = None
    mock: bool = False
    """Use the canned language-model client."""

    def run(self) -> int:
        overrides = {"seed": self.seed, "output_dir": str(self.output_dir.resolve()) if self.output_dir else None}
        config = read_config(self.config, **overrides)
        client = build_client(settings, self.mock) if config.orders is None else None
        result = run_pipeline(config, client)
        if result.ok:
            logger.info("pipeline finished: %d artifacts in %s", len(result.artifacts), result.output_dir)
        else:
            logger.error("pipeline stopped at stage %s (exit %d)", result.failed_stage, result.status)
        return result.status
