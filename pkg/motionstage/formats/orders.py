"""Order lists.

Grammar (one list per character, lists may span lines)::

    orders  := "Orders" label ":" list
    list    := "[" [ item { "," item } ] "]"
    item    := "None" | object | "[" object "," motion "]" | "HHI" ":" text
    text    := quoted | run of characters other than "," "]"

``quoted`` is a double-quoted string with backslash escapes and is how HHI
text containing commas or brackets is written. Text outside ``Orders``
headers is ignored, so a whole language-model answer can be fed in. Input
holding no header but starting with ``[`` is read as a single list for
character ``A``. Items that parse but do not make a command (a bare motion
word, a pair with an unsupported motion, an empty HHI) become
``UnknownItem``; broken brackets raise ``GrammarError``.
"""

import re
from pathlib import Path
from typing import List, Tuple

from pydantic import ValidationError

from ..errors import FormatError, GrammarError
from ..models.plot import (
    MOTION_ALIASES,
    SUPPORTED_MOTIONS,
    CharacterOrders,
    CommandScript,
    Hhi,
    Locomotion,
    SceneInteraction,
    UnknownItem,
)

HEADER_RE = re.compile(r"\bOrders\s+([^:\[\]\n]+?)\s*:", re.IGNORECASE)
HHI_RE = re.compile(r"HHI\s*:", re.IGNORECASE)
NEEDS_QUOTES = re.compile(r'[,\[\]"\\]|^\s|\s$')


class _Scanner:
    def __init__(self, text: str, pos: int):
        self.text = text
        self.pos = pos

    def where(self, pos=None) -> Tuple[int, int]:
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        column = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, column

    def fail(self, detail: str, pos=None):
        line, column = self.where(pos)
        raise GrammarError(detail, line, column)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, char: str) -> None:
        self.skip_ws()
        if self.peek() != char:
            found = repr(self.peek()) if self.peek() else "end of input"
            self.fail(f"expected '{char}', found {found}")
        self.pos += 1

    def quoted(self) -> str:
        start = self.pos
        self.pos += 1
        out = []
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "\\" and self.pos + 1 < len(self.text):
                out.append(self.text[self.pos + 1])
                self.pos += 2
                continue
            if ch == '"':
                self.pos += 1
                return "".join(out)
            out.append(ch)
            self.pos += 1
        self.fail("unterminated quote", start)

    def bare(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in ',[]"':
            self.pos += 1
        return self.text[start:self.pos].strip()


def _word(scanner: _Scanner) -> str:
    scanner.skip_ws()
    start = scanner.pos
    if scanner.peek() == '"':
        return scanner.quoted()
    word = scanner.bare()
    if not word:
        scanner.fail("expected an order item", start)
    return word


def _pair(scanner: _Scanner):
    open_at = scanner.pos
    scanner.pos += 1
    words = []
    scanner.skip_ws()
    if scanner.peek() != "]":
        words.append(_word(scanner))
        scanner.skip_ws()
        while scanner.peek() == ",":
            scanner.pos += 1
            words.append(_word(scanner))
            scanner.skip_ws()
    if scanner.peek() != "]":
        scanner.fail("unclosed '['", open_at)
    scanner.pos += 1
    raw = scanner.text[open_at:scanner.pos]
    if len(words) != 2 or words[0].lower() == "none":
        return UnknownItem(raw=raw)
    try:
        return SceneInteraction(object=words[0], motion=words[1])
    except ValidationError:
        return UnknownItem(raw=raw)


def _item(scanner: _Scanner):
    scanner.skip_ws()
    start = scanner.pos
    if scanner.peek() == "[":
        return _pair(scanner)
    match = HHI_RE.match(scanner.text, scanner.pos)
    if match:
        scanner.pos = match.end()
        scanner.skip_ws()
        text = scanner.quoted() if scanner.peek() == '"' else scanner.bare()
        if not text.strip():
            return UnknownItem(raw=scanner.text[start:scanner.pos].strip())
        return Hhi(text=text)
    word = _word(scanner)
    if word.lower() == "none":
        return Locomotion()
    if MOTION_ALIASES.get(word.lower(), word.lower()) in SUPPORTED_MOTIONS:
        return UnknownItem(raw=word)
    return Locomotion(target=word)


def _list(scanner: _Scanner) -> list:
    scanner.skip_ws()
    open_at = scanner.pos
    scanner.expect("[")
    items = []
    scanner.skip_ws()
    if scanner.peek() == "]":
        scanner.pos += 1
        return items
    while True:
        items.append(_item(scanner))
        scanner.skip_ws()
        ch = scanner.peek()
        if ch == ",":
            scanner.pos += 1
            continue
        if ch == "]":
            scanner.pos += 1
            return items
        if not ch:
            scanner.fail("unclosed '['", open_at)
        scanner.fail(f"expected ',' or ']', found {ch!r}")


def parse_commands(raw: str) -> CommandScript:
    """Parse every ``Orders <label>: [...]`` list in ``raw`` into a script."""
    characters: List[CharacterOrders] = []
    header = HEADER_RE.search(raw)
    if header is None:
        if raw.lstrip().startswith("["):
            scanner = _Scanner(raw, 0)
            characters.append(CharacterOrders(label="A", commands=_list(scanner)))
            scanner.skip_ws()
            if scanner.peek():
                scanner.fail("unexpected text after order list")
        return CommandScript(characters=characters)

    seen = set()
    while header is not None:
        label = header.group(1).strip()
        scanner = _Scanner(raw, header.end())
        if label in seen:
            scanner.fail(f"orders for '{label}' given twice", header.start())
        seen.add(label)
        characters.append(CharacterOrders(label=label, commands=_list(scanner)))
        # headers are only looked for between lists, never inside item text
        header = HEADER_RE.search(raw, scanner.pos)
    return CommandScript(characters=characters)


def _text(value: str) -> str:
    if NEEDS_QUOTES.search(value) or value.lower() == "none" or HHI_RE.match(value):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    return value


def serialize_command(command) -> str:
    if isinstance(command, Locomotion):
        return "None" if command.target is None else _text(command.target)
    if isinstance(command, SceneInteraction):
        return f"[{_text(command.object)}, {command.motion}]"
    if isinstance(command, Hhi):
        return f"HHI: {_text(command.text)}"
    return command.raw


def serialize_script(script: CommandScript) -> str:
    """One ``Orders <label>: [...]`` line per character; parses back to the same script."""
    lines = []
    for character in script.characters:
        items = ", ".join(serialize_command(c) for c in character.commands)
        lines.append(f"Orders {character.label}: [{items}]")
    return "\n".join(lines) + ("\n" if lines else "")


def read_plot(path) -> str:
    """Free plot text, as written by ``plot generate``."""
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise FormatError(f"cannot read plot ({exc})", str(path)) from exc


def read_orders(path) -> CommandScript:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise FormatError(f"cannot read orders ({exc})", str(path)) from exc
    return parse_commands(text)


def write_orders(path, script: CommandScript) -> None:
    Path(path).write_text(serialize_script(script), encoding="utf-8")
