"""Plot comprehension: rule-based order revision and distribution to generation modules."""

import logging
from typing import Dict, List, Optional, Tuple

from ..errors import BadParams, HhiCountMismatch
from ..formats.orders import parse_commands, serialize_script
from ..models.plot import (
    CharacterOrders,
    CharacterQueues,
    CommandQueues,
    CommandScript,
    Hhi,
    Locomotion,
    QueuedCommand,
    SceneCatalog,
    SceneInteraction,
    ScriptWarning,
    SharedHhi,
    UnknownItem,
)
from .llm import LlmClient

logger = logging.getLogger(__name__)

__all__ = [
    "parse_commands",
    "serialize_script",
    "validate_and_revise",
    "distribute",
    "merge_queues",
    "generate_plot",
    "extract_orders",
    "revise_orders",
]

PLACEHOLDER_LABELS = ("A", "B", "C", "D")


class _Reviser:
    """Applies the revision rules, recording one warning per mutation."""

    def __init__(self, catalog: SceneCatalog):
        self.catalog = catalog
        self.warnings: List[ScriptWarning] = []

    def warn(self, label: str, index: int, rule: str, message: str) -> None:
        warning = ScriptWarning(character=label, index=index, rule=rule, message=message)
        logger.warning("orders %s[%d]: %s", label, index, message)
        self.warnings.append(warning)

    def command(self, label: str, index: int, command):
        """Revised command, or None to drop it."""
        if isinstance(command, UnknownItem):
            rule = "unsupported_motion" if command.raw.startswith("[") else "unknown_item"
            self.warn(label, index, rule, f"dropped uninterpretable order {command.raw!r}")
            return None
        if isinstance(command, Locomotion) and command.target is not None:
            return self._object(label, index, command, command.target)
        if isinstance(command, SceneInteraction):
            return self._object(label, index, command, command.object)
        return command

    def _object(self, label: str, index: int, command, name: str):
        known = self.catalog.resolve(name)
        if known is None:
            self.warn(label, index, "unknown_object", f"object '{name}' is not in the scene; walking instead")
            return Locomotion()
        if known != name:
            self.warn(label, index, "object_spelling", f"object '{name}' renamed to '{known}'")
            field = "target" if isinstance(command, Locomotion) else "object"
            return command.model_copy(update={field: known})
        return command


def validate_and_revise(
    script: CommandScript, catalog: SceneCatalog, warnings: Optional[List[ScriptWarning]] = None
) -> CommandScript:
    """Rewrite ``script`` so every command is executable in ``catalog``.

    Rules, in order: uninterpretable items are dropped; objects missing from
    the catalog become plain locomotion; a lone character gets a placeholder
    partner that walks and joins its HHIs; HHIs beyond the shortest
    character's count are trimmed; HHI texts are unified to the first
    character's wording. Every mutation appends a ``ScriptWarning`` to
    ``warnings`` carrying the command's position in the input script.
    """
    reviser = _Reviser(catalog)
    rows: List[Tuple[str, List[Tuple[int, object]]]] = []
    for character in script.characters:
        kept = []
        for index, command in enumerate(character.commands):
            revised = reviser.command(character.label, index, command)
            if revised is not None:
                kept.append((index, revised))
        rows.append((character.label, kept))

    while len(rows) < 2:
        used = {label for label, _ in rows}
        label = next(name for name in PLACEHOLDER_LABELS if name not in used)
        template = rows[0][1] if rows else []
        hhis = [(0, c) for _, c in template if isinstance(c, Hhi)]
        rows.append((label, [(0, Locomotion())] + hhis))
        reviser.warn(label, 0, "placeholder_character", f"added placeholder character '{label}'")

    shortest = min(sum(isinstance(c, Hhi) for _, c in commands) for _, commands in rows)
    reference: List[str] = []
    for row_number, (label, commands) in enumerate(rows):
        trimmed, seen = [], 0
        for index, command in commands:
            if isinstance(command, Hhi):
                seen += 1
                if seen > shortest:
                    reviser.warn(label, index, "unmatched_hhi", f"dropped unmatched HHI '{command.text}'")
                    continue
                if row_number == 0:
                    reference.append(command.text)
                elif command.text != reference[seen - 1]:
                    reviser.warn(label, index, "hhi_text", f"HHI text unified to '{reference[seen - 1]}'")
                    command = Hhi(text=reference[seen - 1])
            trimmed.append((index, command))
        rows[row_number] = (label, trimmed)

    if warnings is not None:
        warnings.extend(reviser.warnings)
    return CommandScript(
        characters=[CharacterOrders(label=label, commands=[c for _, c in commands]) for label, commands in rows]
    )


def distribute(script: CommandScript) -> CommandQueues:
    """Split a revised script into locomotion, scene-interaction and shared HHI queues.

    Sequence numbers are command positions, so ``merge_queues`` restores the script.
    """
    if not script.all_valid:
        raise BadParams("script holds uninterpretable orders; revise it before distributing")
    if not script.is_paired:
        raise HhiCountMismatch("HHI orders are not paired across characters")

    characters: Dict[str, CharacterQueues] = {}
    hhi_positions: Dict[str, List[int]] = {}
    for character in script.characters:
        locomotion, scene, positions = [], [], []
        for seq, command in enumerate(character.commands):
            if isinstance(command, Locomotion):
                locomotion.append(QueuedCommand(seq=seq, command=command))
            elif isinstance(command, SceneInteraction):
                scene.append(QueuedCommand(seq=seq, command=command))
            else:
                positions.append(seq)
        characters[character.label] = CharacterQueues(locomotion=locomotion, scene=scene)
        hhi_positions[character.label] = positions

    hhi = []
    if script.characters:
        texts = script.characters[0].hhi_texts()
        for k, text in enumerate(texts):
            hhi.append(SharedHhi(text=text, seq={label: hhi_positions[label][k] for label in script.labels}))
    return CommandQueues(labels=script.labels, characters=characters, hhi=hhi)


def merge_queues(queues: CommandQueues) -> CommandScript:
    """Inverse of ``distribute``."""
    characters = []
    for label in queues.labels:
        own = queues.characters.get(label, CharacterQueues())
        entries = [(q.seq, q.command) for q in own.locomotion + own.scene]
        entries += [(shared.seq[label], Hhi(text=shared.text)) for shared in queues.hhi if label in shared.seq]
        entries.sort(key=lambda entry: entry[0])
        characters.append(CharacterOrders(label=label, commands=[c for _, c in entries]))
    return CommandScript(characters=characters)


def generate_plot(client: LlmClient, catalog: SceneCatalog, with_rules: bool = False) -> str:
    """Plot text for a two-character scene among the catalog's objects."""
    return client.generate_plot(catalog, with_rules=with_rules)


def extract_orders(client: LlmClient, plot: str) -> CommandScript:
    return parse_commands(client.extract_orders(plot))


def revise_orders(client: LlmClient, script: CommandScript) -> CommandScript:
    """Language-model revision pass over already parsed orders."""
    return parse_commands(client.revise_orders(serialize_script(script)))
