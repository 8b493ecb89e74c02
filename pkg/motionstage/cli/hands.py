"""``retrieve-hands``: nearest hand clip for a text embedding, fitted to a length."""

import logging
from dataclasses import dataclass
from pathlib import Path

from ..errors import EXIT_OK
from ..formats.index import read_index, read_query
from ..formats.motion import read_hand_clip, write_hand_clip
from ..services.hands import fit_clip_length, retrieve

logger = logging.getLogger(__name__)


@dataclass(kw_only=True)
class RetrieveHands:
    """Retrieve the most similar hand clip, cut or stretch it to ``target-len`` frames and write it."""

    index: Path
    clips: Path
    """Directory holding ``<clip_id>.hand`` files."""
    query_vec: Path
    target_len: int
    seed: int
    out: Path

    def run(self) -> int:
        index = read_index(self.index, self.clips)
        clip_id = retrieve(index, read_query(self.query_vec))
        clip = read_hand_clip(index.clip_paths[index.position(clip_id)])
        write_hand_clip(self.out, fit_clip_length(clip, self.target_len, self.seed))
        logger.info("retrieved hand clip %s", clip_id)
        print(clip_id)
        return EXIT_OK
