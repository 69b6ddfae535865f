"""Stream sources: CSV ingestion, synthetic drifting generators, chunking."""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Iterator, Optional, TextIO, Union

import numpy as np

from .core import Chunk, Instance, LabelIndex

SEA_THRESHOLDS = (8.0, 9.0, 7.0, 9.5)
DRIFT_KINDS = ("sudden", "gradual")
MAX_REJECTIONS = 100_000


class CsvFormatError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class CsvSchema:
    header: bool = False
    # column holding the transaction amount, by position or header name
    amount_column: Union[int, str, None] = None
    # declared class set; labels outside it are rejected
    classes: Optional[tuple] = None


def _amount_index(schema: CsvSchema, names: Optional[list[str]], width: int) -> Optional[int]:
    col = schema.amount_column
    if col is None:
        return None
    if isinstance(col, str) and not col.lstrip("-").isdigit():
        if names is None or col not in names:
            raise CsvFormatError(1, f"amount column {col!r} not in header")
        idx = names.index(col)
    else:
        idx = int(col) % width
    if idx == width - 1:
        raise CsvFormatError(1, "the amount column cannot be the label column")
    return idx


def read_csv(stream: TextIO, schema: CsvSchema = CsvSchema()) -> Iterator[Instance]:
    reader = csv.reader(stream)
    names = None
    width = None
    amount_idx = None
    classes = None if schema.classes is None else {str(c) for c in schema.classes}
    for row in reader:
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if schema.header and names is None:
            names = [c.strip() for c in row]
            continue
        if width is None:
            width = len(row)
            if width < 2:
                raise CsvFormatError(line, "need at least one feature and a label")
            amount_idx = _amount_index(schema, names, width)
        if len(row) != width:
            raise CsvFormatError(line, f"expected {width} columns, found {len(row)}")
        label = row[-1].strip()
        if classes is not None and label not in classes:
            raise CsvFormatError(line, f"unknown label {label!r}")
        values = []
        amount = None
        for k, cell in enumerate(row[:-1]):
            try:
                v = float(cell)
            except ValueError:
                raise CsvFormatError(line, f"non-numeric value {cell!r} in column {k}") from None
            if k == amount_idx:
                if v < 0:
                    raise CsvFormatError(line, f"negative amount {v}")
                amount = v
            else:
                values.append(v)
        yield Instance(tuple(values), label, amount)


def open_csv(path: Union[str, Path], schema: CsvSchema = CsvSchema()) -> Iterator[Instance]:
    """Lazily read labeled instances from a CSV file, label in the last column."""
    with open(path, newline="", encoding="utf-8") as fh:
        yield from read_csv(fh, schema)


def _fmt(x: float) -> str:
    return repr(float(x))


def write_csv(instances: Iterable[Instance], out: TextIO, header: bool = False) -> int:
    """Write instances as features[, amount], label. Returns the row count."""
    writer = csv.writer(out, lineterminator="\n")
    n = 0
    for inst in instances:
        if header and n == 0:
            names = [f"x{k}" for k in range(len(inst.features))]
            if inst.amount is not None:
                names.append("amount")
            writer.writerow(names + ["label"])
        row = [_fmt(v) for v in inst.features]
        if inst.amount is not None:
            row.append(_fmt(inst.amount))
        row.append(str(inst.label))
        writer.writerow(row)
        n += 1
    return n


@dataclass(frozen=True)
class ConceptParams:
    """One concept of a synthetic stream.

    ``sea``: three features on [0, 10], positive iff x1 + x2 <= threshold.
    ``hyperplane``: features on [0, 1]^d, positive iff normal . x - offset >= 0.
    ``flip`` swaps the two classes (the inverted concept). ``class_priors``
    forces the class mix without moving the boundary (virtual drift).
    """

    kind: str = "sea"
    threshold: float = SEA_THRESHOLDS[0]
    normal: tuple[float, ...] = ()
    offset: Optional[float] = None
    class_priors: Optional[tuple[float, float]] = None
    noise: float = 0.0
    flip: bool = False

    def __post_init__(self):
        if self.kind not in ("sea", "hyperplane"):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if not 0.0 <= self.noise < 0.5:
            raise ValueError("label noise must lie in [0, 0.5)")
        if self.kind == "hyperplane":
            if not self.normal:
                object.__setattr__(self, "normal", (1.0,) * 10)
            if self.offset is None:
                object.__setattr__(self, "offset", 0.5 * sum(self.normal))
        if self.class_priors is not None:
            p = tuple(float(v) for v in self.class_priors)
            if len(p) != 2 or min(p) < 0 or abs(sum(p) - 1.0) > 1e-9:
                raise ValueError("class priors must be a binary distribution")
            object.__setattr__(self, "class_priors", p)

    @property
    def n_features(self) -> int:
        return 3 if self.kind == "sea" else len(self.normal)

    def sample_features(self, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "sea":
            return rng.uniform(0.0, 10.0, 3)
        return rng.uniform(0.0, 1.0, len(self.normal))

    def true_label(self, x: np.ndarray) -> int:
        """Noise-free label of x under this concept."""
        if self.kind == "sea":
            positive = x[0] + x[1] <= self.threshold
        else:
            positive = float(np.dot(self.normal, x)) - self.offset >= 0
        return int(positive) ^ int(self.flip)


@dataclass(frozen=True)
class DriftEvent:
    position: int
    target: ConceptParams
    kind: str = "sudden"
    width: int = 1


@dataclass(frozen=True)
class DriftSchedule:
    events: tuple[DriftEvent, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        prev_end = 0
        for e in self.events:
            if e.kind not in DRIFT_KINDS:
                raise ValueError(f"unknown drift kind {e.kind!r}")
            if e.width < 1:
                raise ValueError("gradual drift width must be at least 1")
            # a gradual ramp must finish before the next event starts
            if e.position < prev_end:
                raise ValueError("drift positions must be increasing and non-overlapping")
            prev_end = e.position + (e.width if e.kind == "gradual" else 1)


def _draw(concept: ConceptParams, rng: np.random.Generator) -> tuple[np.ndarray, int]:
    if concept.class_priors is None:
        x = concept.sample_features(rng)
        return x, concept.true_label(x)
    target = int(rng.random() >= concept.class_priors[0])
    for _ in range(MAX_REJECTIONS):
        x = concept.sample_features(rng)
        if concept.true_label(x) == target:
            return x, target
    raise RuntimeError(f"concept cannot produce class {target}")


def generate(params: ConceptParams, schedule: DriftSchedule = DriftSchedule(),
             n: int = 1000, seed: int = 0,
             amount_scale: Optional[float] = None) -> Iterator[Instance]:
    """Yield ``n`` labeled instances from a drifting synthetic concept.

    Sudden events switch concept at their position. Gradual events draw
    each instance from the new concept with a probability ramping linearly
    up to 1 across ``width`` instances. ``amount_scale`` attaches an
    exponentially distributed transaction amount to every instance.
    """
    if n < 0:
        raise ValueError("instance count must be non-negative")
    rng = np.random.default_rng(seed)
    events = list(schedule.events)
    current = params
    k = 0
    for t in range(n):
        while k < len(events) and t >= events[k].position + (
                events[k].width - 1 if events[k].kind == "gradual" else 0):
            current = events[k].target
            k += 1
        concept = current
        if k < len(events) and events[k].kind == "gradual" and t >= events[k].position:
            share = (t - events[k].position + 1) / events[k].width
            if rng.random() < share:
                concept = events[k].target
        x, y = _draw(concept, rng)
        if concept.noise > 0 and rng.random() < concept.noise:
            y = 1 - y
        amount = float(rng.exponential(amount_scale)) if amount_scale else None
        yield Instance(tuple(float(v) for v in x), y, amount)


def chunker(instances: Iterable[Instance], chunk_size: int,
            labels: Optional[LabelIndex] = None) -> Iterator[Chunk]:
    """Cut a stream into consecutive chunks; the final one may be short and
    is then flagged ``partial``."""
    if chunk_size < 1:
        raise ValueError("chunk size must be at least 1")
    labels = LabelIndex() if labels is None else labels
    it = iter(instances)
    for index in itertools.count():
        batch = list(itertools.islice(it, chunk_size))
        if not batch:
            return
        yield Chunk.from_instances(batch, index, labels, partial=len(batch) < chunk_size)
        if len(batch) < chunk_size:
            return


def sea_concept(i: int = 0, noise: float = 0.0, **kw) -> ConceptParams:
    """The i-th default SEA concept (thresholds cycle through 8, 9, 7, 9.5)."""
    return ConceptParams("sea", SEA_THRESHOLDS[i % len(SEA_THRESHOLDS)], noise=noise, **kw)


def label_inversion(params: ConceptParams, position: int) -> DriftSchedule:
    """A single sudden drift to the inverted concept."""
    return DriftSchedule((DriftEvent(position, replace(params, flip=not params.flip)),))


def stream_to_csv_text(instances: Iterable[Instance], header: bool = False) -> str:
    buf = io.StringIO()
    write_csv(instances, buf, header)
    return buf.getvalue()
