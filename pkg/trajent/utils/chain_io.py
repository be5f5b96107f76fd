"""Reading and writing chain files (JSON matrix or TSV edge list)."""

import csv
import io
import logging
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ValidationError

from trajent.schemas.chain import MarkovChain
from trajent.utils.errors import ChainFileError

log = logging.getLogger(__name__)

ChainFormat = Literal["json", "tsv"]

EXTENSIONS: dict[str, ChainFormat] = {
    ".json": "json",
    ".tsv": "tsv",
    ".txt": "tsv",
    ".edges": "tsv",
}


class ChainFile(BaseModel):
    """On-disk JSON layout: ``{"states": [...], "matrix": [[...], ...]}``."""

    states: list[str]
    matrix: list[list[float]]


def detect_format(path: Path) -> ChainFormat:
    try:
        return EXTENSIONS[path.suffix.lower()]
    except KeyError:
        raise ChainFileError(
            f"cannot tell the format of {path.name}; use --input-format"
        ) from None


def parse_json(text: str) -> MarkovChain:
    try:
        data = ChainFile.model_validate_json(text)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"]) or "document"
        raise ChainFileError(f"invalid chain JSON at {where}: {first['msg']}") from exc
    return MarkovChain(labels=tuple(data.states), matrix=data.matrix)


def parse_edge_list(text: str) -> MarkovChain:
    """
    One ``src<TAB>dst<TAB>probability`` line per edge. Blank lines and lines
    starting with ``#`` are skipped; labels are numbered in order of first
    appearance and absent edges have probability zero.
    """
    labels: dict[str, int] = {}
    edges: dict[tuple[int, int], float] = {}
    reader = csv.reader(io.StringIO(text), delimiter="\t")
    for lineno, fields in enumerate(reader, start=1):
        fields = [f.strip() for f in fields]
        if not any(fields) or fields[0].startswith("#"):
            continue
        if len(fields) != 3:
            raise ChainFileError(
                f"line {lineno}: expected 3 tab-separated fields, got {len(fields)}"
            )
        src, dst, value = fields
        try:
            probability = float(value)
        except ValueError:
            raise ChainFileError(
                f"line {lineno}: {value!r} is not a probability"
            ) from None
        i = labels.setdefault(src, len(labels))
        j = labels.setdefault(dst, len(labels))
        if (i, j) in edges:
            raise ChainFileError(f"line {lineno}: edge {src} -> {dst} given twice")
        edges[i, j] = probability

    if not labels:
        raise ChainFileError("edge list contains no edges")
    matrix = np.zeros((len(labels), len(labels)))
    for (i, j), probability in edges.items():
        matrix[i, j] = probability
    return MarkovChain(labels=tuple(labels), matrix=matrix)


def load_chain(path: Path | str, fmt: Optional[ChainFormat] = None) -> MarkovChain:
    """Read a chain file; the format follows the extension unless ``fmt`` is set."""
    path = Path(path)
    fmt = fmt or detect_format(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ChainFileError(f"cannot read {path}: {exc.strerror}") from exc
    chain = parse_json(text) if fmt == "json" else parse_edge_list(text)
    log.debug("loaded %d-state chain from %s", chain.n_states, path)
    return chain
