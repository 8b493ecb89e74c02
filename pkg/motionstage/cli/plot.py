"""``plot generate|extract|revise|distribute``."""

from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

from ..config import settings
from ..errors import EXIT_OK
from ..formats.catalog import read_catalog
from ..formats.orders import read_orders, read_plot, write_orders
from ..models.plot import ScriptWarning
from ..services.llm import build_client
from ..services.plot import distribute, extract_orders, generate_plot, revise_orders, validate_and_revise


def _emit(out: Optional[Path], text: str) -> None:
    if out is None:
        print(text, end="" if text.endswith("\n") else "\n")
    else:
        out.write_text(text, encoding="utf-8")


@dataclass(kw_only=True)
class PlotGenerate:
    """Ask the language model for a two-character plot set in the catalog's scene."""

    catalog: Path
    navgrid: Path
    out: Optional[Path] = None
    with_rules: bool = False
    """Append the order rules to the plot prompt."""
    mock: bool = False

    def run(self) -> int:
        catalog = read_catalog(self.catalog, self.navgrid)
        _emit(self.out, generate_plot(build_client(settings, self.mock), catalog, with_rules=self.with_rules))
        return EXIT_OK


@dataclass(kw_only=True)
class PlotExtract:
    """Extract per-character orders from a plot text."""

    plot: Path
    out: Path
    mock: bool = False

    def run(self) -> int:
        script = extract_orders(build_client(settings, self.mock), read_plot(self.plot))
        write_orders(self.out, script)
        return EXIT_OK


@dataclass(kw_only=True)
class PlotRevise:
    """Make orders executable in the scene; optionally let the language model revise them first."""

    orders: Path
    catalog: Path
    navgrid: Path
    out: Path
    warnings: Optional[Path] = None
    llm: bool = False
    mock: bool = False

    def run(self) -> int:
        script = read_orders(self.orders)
        if self.llm:
            script = revise_orders(build_client(settings, self.mock), script)
        found: List[ScriptWarning] = []
        script = validate_and_revise(script, read_catalog(self.catalog, self.navgrid), found)
        write_orders(self.out, script)
        if self.warnings is not None:
            lines = "".join(f"{w.character}\t{w.index}\t{w.rule}\t{w.message}\n" for w in found)
            self.warnings.write_text(lines, encoding="utf-8")
        return EXIT_OK


@dataclass(kw_only=True)
class PlotDistribute:
    """Split revised orders into locomotion, scene-interaction and HHI queues (JSON)."""

    orders: Path
    out: Optional[Path] = None

    def run(self) -> int:
        _emit(self.out, distribute(read_orders(self.orders)).model_dump_json(indent=2) + "\n")
        return EXIT_OK
