"""End-to-end pipeline: orders in, synchronized and revised two-character motion plus metrics out.

Stages run in a fixed order and each writes its artifacts into the output
directory under numbered names before the next one starts, so a failing
stage leaves everything produced so far in place:

    1_plot.txt, 1_orders_extracted.txt   (only when the plot comes from the language model)
    1_orders_raw.txt, 1_orders.txt, 1_warnings.txt
    2_queues.json
    3_routes.txt
    4_segments.txt, 4_sync_a.motion, 4_sync_b.motion
    5_hands.txt, 5_hands_a.motion, 5_hands_b.motion
    6_revision.txt, 6_revised_a.motion, 6_revised_b.motion
    7_scene.sdfg                          (only when no grid is configured)
    8_metrics.txt

Motion generation itself is not part of the pipeline: each character's input
motion is consumed in order as the frames its orders would have produced,
and the last frame is held once it runs out.
"""

import logging
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import BadLength, ConfigError, FpsMismatch, InvalidQuery, MotionStageError, PipelineStageError
from ..formats.catalog import read_catalog
from ..formats.grid import read_grid, write_grid
from ..formats.index import read_hhi_queries, read_index
from ..formats.motion import read_hand_clip, read_motion, write_motion
from ..formats.orders import read_orders, serialize_script
from ..formats.report import dumps_report, format_value
from ..models.geometry import TriMesh
from ..models.hands import EmbeddingIndex
from ..models.metrics import ContactParams
from ..models.motion import HandClip, MotionSequence
from ..models.pipeline import PipelineConfig, PipelineResult
from ..models.plot import CommandQueues, CommandScript, SceneCatalog, ScriptWarning
from ..models.revision import RevisionConfig
from ..models.scene import SdfGrid
from ..models.sync import JunctionBlendParams
from .hands import fit_clip_length, flat_hand_pose, mean_hand_pose, retrieve, splice_hands
from .llm import LlmClient
from .metrics import evaluate, marker_meshes
from .motion import concatenate, resample
from .plot import distribute, extract_orders, generate_plot, revise_orders, validate_and_revise
from .revision import revise
from .routes import sample_near_point, sample_route_point
from .scene import params_for_motion, synthesize_plane_based, walkable_hull
from .sync import align_segment_lengths, blend_exit, blend_junction, frames_for_orders, pad_with_hover, segment_orders

logger = logging.getLogger(__name__)

STAGES = ("plot", "distribute", "routes", "sync", "hands", "revise", "scene", "metrics")
STAGE_CODES = {name: 10 + i for i, name in enumerate(STAGES)}
CHANNELS = ("markers", "pelvis", "rotations", "hands")


def child_seed(seed: int, *keys: int) -> int:
    """Independent, reproducible seed for one random draw site of a run."""
    return int(np.random.SeedSequence(seed, spawn_key=keys).generate_state(1)[0])


def hold(seq: MotionSequence, count: int) -> MotionSequence:
    """``count`` exact copies of the last frame of ``seq``."""
    channels = {name: np.repeat(getattr(seq, name)[-1:], count, axis=0) for name in CHANNELS if getattr(seq, name) is not None}
    return MotionSequence(fps=seq.fps, **channels)


class _Timeline:
    """One character's motion, assembled piece by piece with blended HHI buffers."""

    def __init__(self, source: MotionSequence, params: JunctionBlendParams):
        self.source = source
        self.params = params
        self.cursor = 0
        self.seq: Optional[MotionSequence] = None
        self.after_hhi = False

    @property
    def length(self) -> int:
        return 0 if self.seq is None else self.seq.n_frames

    def last(self) -> MotionSequence:
        if self.seq is not None:
            return self.seq.slice(self.length - 1, self.length)
        return self.source.slice(0, 1)

    def _take(self, count: int) -> MotionSequence:
        stop = min(self.cursor + count, self.source.n_frames)
        if stop <= self.cursor:
            return hold(self.last(), count)
        taken = self.source.slice(self.cursor, stop)
        self.cursor = stop
        if taken.n_frames < count:
            taken = concatenate([taken, hold(taken, count - taken.n_frames)])
        return taken

    def advance(self, own: int, pad: int, seed: int) -> None:
        """Append ``own`` frames of the character's motion, then ``pad`` hover frames."""
        if own + pad == 0:
            return
        piece = self._take(own) if own else None
        if pad:
            if piece is None:
                hovered = pad_with_hover(self.last(), pad, seed)
                piece = hovered.slice(1, hovered.n_frames)
            else:
                piece = pad_with_hover(piece, pad, seed)
        self._append(piece, hhi=False)

    def interact(self, clip: MotionSequence) -> None:
        self._append(clip, hhi=True)

    def _append(self, piece: MotionSequence, hhi: bool) -> None:
        if self.seq is None:
            self.seq = piece
        elif hhi:
            self.seq = blend_junction(self.seq, piece, self.params)
        elif self.after_hhi:
            self.seq = blend_exit(self.seq, piece, self.params)
        else:
            self.seq = concatenate([self.seq, piece])
        self.after_hhi = hhi


class PipelineRun:
    """State of one run; every stage reads what the previous ones stored."""

    def __init__(self, config: PipelineConfig, client: Optional[LlmClient] = None):
        self.config = config
        self.client = client
        self.out = Path(config.output_dir)
        self.artifacts: List[str] = []
        self.catalog: Optional[SceneCatalog] = None
        self.script: Optional[CommandScript] = None
        self.queues: Optional[CommandQueues] = None
        self.motions: Tuple[MotionSequence, ...] = ()
        self.hhi_ranges: List[Tuple[str, int, int]] = []
        self.meshes: Optional[Tuple[List[TriMesh], List[TriMesh]]] = None
        self.grid: Optional[SdfGrid] = None

    def _write_text(self, name: str, text: str) -> None:
        (self.out / name).write_text(text, encoding="utf-8")
        self.artifacts.append(name)

    def _write_motion(self, name: str, seq: MotionSequence) -> None:
        write_motion(self.out / name, seq)
        self.artifacts.append(name)

    def _seed(self, stage: str, *keys: int) -> int:
        return child_seed(self.config.seed, STAGES.index(stage), *keys)

    @property
    def labels(self) -> List[str]:
        return self.script.labels[:2]

    def plot(self) -> None:
        cfg = self.config
        self.catalog = read_catalog(cfg.catalog, cfg.navgrid)
        if cfg.orders is not None:
            script = read_orders(cfg.orders)
        else:
            if self.client is None:
                raise ConfigError("no orders file configured and no language-model client given")
            plot_text = generate_plot(self.client, self.catalog, with_rules=True)
            self._write_text("1_plot.txt", plot_text)
            script = extract_orders(self.client, plot_text)
            self._write_text("1_orders_extracted.txt", serialize_script(script))
            script = revise_orders(self.client, script)
        self._write_text("1_orders_raw.txt", serialize_script(script))

        warnings: List[ScriptWarning] = []
        self.script = validate_and_revise(script, self.catalog, warnings)
        if len(self.script.characters) > 2:
            logger.warning("orders name %d characters; only %s are animated", len(self.script.characters), ", ".join(self.labels))
        self._write_text("1_orders.txt", serialize_script(self.script))
        self._write_text("1_warnings.txt", "".join(f"{w.character}\t{w.index}\t{w.rule}\t{w.message}\n" for w in warnings))

    def distribute(self) -> None:
        self.queues = distribute(self.script)
        self._write_text("2_queues.json", self.queues.model_dump_json(indent=2) + "\n")

    def routes(self) -> None:
        """Route point per locomotion and scene order, plus a meeting point next to the partner per HHI."""
        points: Dict[str, List[Tuple[int, str, str, np.ndarray]]] = {}
        for char_index, label in enumerate(self.labels):
            queued = self.queues.characters[label]
            rows = []
            for item in sorted(queued.locomotion + queued.scene, key=lambda q: q.seq):
                command = item.command
                target = command.target if command.kind == "locomotion" else command.object
                kind = "locomotion" if command.kind == "locomotion" else f"scene:{command.motion}"
                point = sample_route_point(self.catalog, target, self._seed("routes", char_index, item.seq))
                rows.append((item.seq, kind, target or "None", point))
            points[label] = rows

        if len(self.labels) == 2:
            lead, partner = self.labels
            for k, shared in enumerate(self.queues.hhi):
                before = [p for seq, _, _, p in points[lead] if seq < shared.seq[lead]]
                seed = self._seed("routes", 2, k)
                anchor = before[-1] if before else sample_route_point(self.catalog, None, seed)
                meet = sample_near_point(self.catalog, anchor, seed)
                points[partner].append((shared.seq[partner], "hhi", shared.text, meet))

        lines = []
        for label in self.labels:
            for seq, kind, target, point in sorted(points[label], key=lambda row: row[0]):
                lines.append(f"{label}\t{seq}\t{kind}\t{target}\t{format_value(point[0])}\t{format_value(point[1])}\n")
        self._write_text("3_routes.txt", "".join(lines))

    def _hhi_pair(self, clips: Sequence[Optional[MotionSequence]], timelines: Sequence[_Timeline]) -> List[MotionSequence]:
        given = [c.n_frames for c in clips if c is not None]
        length = max(given) if given else frames_for_orders(1, self.config.clip_seconds, self.config.fps)
        pair = []
        for clip, timeline in zip(clips, timelines):
            if clip is None:
                pair.append(hold(timeline.last(), length))
            else:
                pair.append(clip if clip.n_frames == length else resample(clip, length))
        return pair

    def sync(self) -> None:
        cfg = self.config
        if len(self.labels) < 2:
            raise BadLength("synchronization needs two characters")
        label_a, label_b = self.labels
        motions = [read_motion(cfg.motion_a), read_motion(cfg.motion_b)]
        clips = [read_motion(p) if p is not None else None for p in (cfg.hhi_a, cfg.hhi_b)]
        for seq in motions + [c for c in clips if c is not None]:
            if seq.fps != cfg.fps:
                raise FpsMismatch(f"input motion runs at {seq.fps} fps, pipeline at {cfg.fps}")

        params = JunctionBlendParams(buffer_frames=cfg.buffer_frames)
        timelines = [_Timeline(m, params) for m in motions]
        segments = segment_orders(self.script.orders(label_a).commands, self.script.orders(label_b).commands)
        lines = []
        for k, (seg_a, seg_b) in enumerate(segments):
            alignment = align_segment_lengths(seg_a, seg_b, cfg.clip_seconds, cfg.fps)
            for i, (segment, pad) in enumerate(((seg_a, alignment.pad_a), (seg_b, alignment.pad_b))):
                own = frames_for_orders(segment.pre_hhi_count, cfg.clip_seconds, cfg.fps)
                timelines[i].advance(own, pad, self._seed("sync", k, i))
            text = ""
            if seg_a.hhi is not None:
                start = timelines[0].length
                pair = self._hhi_pair(clips, timelines)
                for timeline, clip in zip(timelines, pair):
                    timeline.interact(clip)
                text = seg_a.hhi.text
                self.hhi_ranges.append((text, start, start + pair[0].n_frames - 1))
            lines.append(f"{k}\t{alignment.target_frames}\t{alignment.pad_a}\t{alignment.pad_b}\t{text}\n")

        if timelines[0].seq is None:
            raise BadLength("the orders produce no motion")
        self.motions = (timelines[0].seq, timelines[1].seq)
        self._write_text("4_segments.txt", "".join(lines))
        self._write_motion("4_sync_a.motion", self.motions[0])
        self._write_motion("4_sync_b.motion", self.motions[1])

    def _ambient(self, index: Optional[EmbeddingIndex]) -> np.ndarray:
        if index is None:
            return flat_hand_pose(self.config.hand_joints)
        clips = [read_hand_clip(path) for path in index.clip_paths]
        pooled = HandClip(rotations=np.concatenate([c.rotations for c in clips]), fps=clips[0].fps)
        return mean_hand_pose(pooled)

    def hands(self) -> None:
        cfg = self.config
        index = read_index(cfg.hand_index, cfg.hand_clips) if cfg.hand_mode != "flat" else None
        ambient = self._ambient(index)
        queries = read_hhi_queries(cfg.hand_queries) if cfg.hand_mode == "retrieved" else {}

        channels = [np.repeat(ambient[None], seq.n_frames, axis=0) for seq in self.motions]
        lines = []
        for k, (text, start, end) in enumerate(self.hhi_ranges if cfg.hand_mode == "retrieved" else []):
            if text not in queries:
                raise InvalidQuery(f"no query vector for HHI '{text}'")
            clip_id = retrieve(index, queries[text])
            source = read_hand_clip(index.clip_paths[index.position(clip_id)])
            for i, seq in enumerate(self.motions):
                clip = fit_clip_length(source, end - start + 1, self._seed("hands", k, i))
                spliced = splice_hands(seq.slice(start, end + 1), clip, ambient, blend_frames=cfg.buffer_frames)
                channels[i][start : end + 1] = spliced.hands
            lines.append(f"{k}\t{start}\t{end}\t{clip_id}\t{text}\n")

        self.motions = tuple(seq.with_channels(hands=hands) for seq, hands in zip(self.motions, channels))
        self._write_text("5_hands.txt", "".join(lines))
        self._write_motion("5_hands_a.motion", self.motions[0])
        self._write_motion("5_hands_b.motion", self.motions[1])

    def revise(self) -> None:
        cfg = self.config
        revision = RevisionConfig(
            hhp_threshold=cfg.hhp_threshold, max_iterations=cfg.max_iterations, interval_margin=cfg.interval_margin
        )
        seq_a, seq_b, report = revise(*self.motions, cfg=revision)
        self.motions = (seq_a, seq_b)
        self._write_text("6_revision.txt", dumps_report(report.as_record()))
        self._write_motion("6_revised_a.motion", seq_a)
        self._write_motion("6_revised_b.motion", seq_b)

    def scene(self) -> None:
        cfg = self.config
        self.meshes = tuple(marker_meshes(seq) for seq in self.motions)
        if cfg.grid is not None:
            logger.info("scene: using configured grid %s", cfg.grid)
            return
        meshes = self.meshes[0] + self.meshes[1]
        params = params_for_motion(
            meshes,
            self.motions[0].pelvis[0],
            self._seed("scene"),
            box_size=cfg.scene_size,
            dims=cfg.scene_dims,
            k_max=cfg.k_max,
            t_floor=cfg.t_floor,
            ground_z=cfg.ground_z,
        )
        self.grid, _ = synthesize_plane_based(walkable_hull(meshes), params)
        write_grid(self.out / "7_scene.sdfg", self.grid)
        self.artifacts.append("7_scene.sdfg")

    def metrics(self) -> None:
        cfg = self.config
        grid = read_grid(cfg.grid) if cfg.grid is not None else self.grid
        report = evaluate(
            self.motions[0],
            ContactParams(height_eps=cfg.height_eps, ground_z=cfg.ground_z),
            self.motions[1],
            grid=grid,
            meshes=self.meshes,
        )
        self._write_text("8_metrics.txt", dumps_report(report.as_record()))

    def run(self) -> PipelineResult:
        self.out.mkdir(parents=True, exist_ok=True)
        steps: Dict[str, Callable[[], None]] = {name: getattr(self, name) for name in STAGES}
        for name, step in steps.items():
            logger.info("stage %s: start", name)
            try:
                step()
            except (MotionStageError, ValueError, OSError) as exc:
                failure = PipelineStageError(name, exc)
                logger.error("%s", failure.detail)
                return PipelineResult(
                    status=STAGE_CODES[name],
                    output_dir=self.out,
                    artifacts=list(self.artifacts),
                    failed_stage=name,
                    detail=failure.detail,
                )
            logger.info("stage %s: done", name)
        return PipelineResult(status=0, output_dir=self.out, artifacts=list(self.artifacts))


def run_pipeline(config: PipelineConfig, client: Optional[LlmClient] = None) -> PipelineResult:
    """Run every stage; the result carries exit status 0 or the failing stage's code."""
    return PipelineRun(config, client).run()
