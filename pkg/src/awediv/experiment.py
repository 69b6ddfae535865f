"""Chunk-prequential experiment runner and offline oracle audit."""

from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import Iterator, Optional, TextIO

import numpy as np

from .config import ExperimentConfig, parse_drift
from .core import LabelIndex, OracleMatrix
from .diversity import NONPAIRWISE_FIELDS, PAIRWISE_FIELDS, static_measures
from .ensemble import AccuracyWeightedEnsemble, BenefitMatrix, EnsembleConfig
from .stream_diversity import (DiversityReport, FadingTracker, PairCountState,
                               WindowState, block_report)
from .streams import CsvSchema, chunker, generate, open_csv

log = logging.getLogger(__name__)

MEASURES = ("p",) + PAIRWISE_FIELDS + NONPAIRWISE_FIELDS
BASE_COLUMNS = ("chunk_index", "prequential_accuracy", "ensemble_size",
                "min_weight", "max_weight")


def metric_columns(modes) -> list[str]:
    return list(BASE_COLUMNS) + [f"{m}_{name}" for m in modes for name in MEASURES]


class DiversityTrackers:
    """The enabled diversity modes for one ensemble.

    Stateful trackers are dropped whenever ensemble membership changes,
    since pair counts over different member sets cannot be combined.
    """

    def __init__(self, modes, window: int, alpha: float):
        self.modes = tuple(modes)
        self.window = window
        self.alpha = alpha
        self.reset()

    def reset(self, *_):
        self.incremental: Optional[PairCountState] = None
        self.fading: Optional[FadingTracker] = None
        self.windowed: Optional[WindowState] = None

    def observe(self, oracle: OracleMatrix, timestamp: int) -> dict[str, DiversityReport]:
        L = oracle.n_classifiers
        reports = {}
        for mode in self.modes:
            if mode == "block":
                reports[mode] = block_report(oracle, timestamp)
            elif mode == "incremental":
                if self.incremental is None:
                    self.incremental = PairCountState(L)
                for row in oracle.entries:
                    self.incremental.update(row)
                reports[mode] = self.incremental.report(timestamp)
            elif mode == "window":
                if self.windowed is None:
                    self.windowed = WindowState(self.window, L)
                for row in oracle.entries:
                    self.windowed.push(row)
                reports[mode] = self.windowed.report(timestamp)
            elif mode == "fading":
                if self.fading is None:
                    self.fading = FadingTracker(L, self.alpha)
                for row in oracle.entries:
                    self.fading.update(row)
                reports[mode] = self.fading.report(timestamp)
        return reports


def open_stream(config: ExperimentConfig) -> tuple[Iterator, LabelIndex]:
    if config.generator is not None:
        base = config.base_concept()
        schedule = parse_drift(config.drift, base)
        it = generate(base, schedule, config.n_instances, config.seed, config.amount_scale)
        return it, LabelIndex((0, 1), closed=True)
    classes = None
    if config.classes:
        classes = tuple(c.strip() for c in config.classes.split(","))
    schema = CsvSchema(config.header, config.amount_column, classes)
    labels = LabelIndex(classes or (), closed=classes is not None)
    return open_csv(config.stream, schema), labels


def build_ensemble(config: ExperimentConfig, labels: LabelIndex) -> AccuracyWeightedEnsemble:
    matrix = None
    if config.weighting == "benefit":
        positive = config.positive_label
        key = int(positive) if config.generator is not None else positive
        matrix = BenefitMatrix(config.cost, labels.add(key))
    ens_config = EnsembleConfig(config.capacity, config.chunk_size, config.weighting,
                                matrix, config.prune_nonpositive)
    return AccuracyWeightedEnsemble(ens_config, config.learner)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def iter_metric_rows(config: ExperimentConfig) -> Iterator[dict]:
    """Test-then-train over the stream, one metrics dict per chunk.

    Each chunk is first scored by the current ensemble (accuracy and the
    oracle outcomes of every member), then used to train a new member and
    reweight the ensemble.
    """
    stream, labels = open_stream(config)
    ensemble = build_ensemble(config, labels)
    trackers = DiversityTrackers(config.modes, config.window_size, config.alpha)
    ensemble.on_membership_change(trackers.reset)

    for chunk in chunker(stream, config.chunk_size, labels):
        row = dict.fromkeys(metric_columns(config.modes))
        row["chunk_index"] = chunk.index
        if len(ensemble):
            predicted = ensemble.predict(chunk.features, chunk.n_classes)
            row["prequential_accuracy"] = float(np.mean(predicted == chunk.labels))
            if len(ensemble) >= 2:
                oracle = OracleMatrix(ensemble.member_predictions(chunk.features)
                                      == chunk.labels[:, None])
                for mode, rep in trackers.observe(oracle, chunk.index).items():
                    for name, value in rep.values().items():
                        row[f"{mode}_{name}"] = value
        ensemble.process_chunk(chunk)
        row["ensemble_size"] = len(ensemble)
        row["min_weight"] = float(ensemble.weights.min())
        row["max_weight"] = float(ensemble.weights.max())
        yield row


def write_metrics(config: ExperimentConfig, out: TextIO) -> int:
    """Stream metric rows to ``out`` as CSV, flushing after every chunk.

    Rows already written stay on disk if the run fails midway.
    """
    columns = metric_columns(config.modes)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    n = 0
    for row in iter_metric_rows(config):
        writer.writerow([_fmt(row[c]) for c in columns])
        out.flush()
        n += 1
    return n


def run_experiment(config: ExperimentConfig) -> Path:
    config.validate()
    path = Path(config.out)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        n = write_metrics(config, fh)
    log.info("wrote %d metric rows to %s", n, path)
    if config.plot:
        from .plots import plot_metrics
        plot_metrics(path)
    return path


def read_metrics(path) -> tuple[list[str], list[dict]]:
    """Load a metrics CSV; empty fields become None, numbers become floats."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        columns = next(reader)
        rows = [{c: (float(v) if v != "" else None) for c, v in zip(columns, r)}
                for r in reader]
    return columns, rows


class OracleFormatError(ValueError):
    pass


def load_oracle_csv(path) -> OracleMatrix:
    """Read a 0/1 oracle matrix (rows = samples, columns = classifiers)."""
    rows = []
    width = None
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or all(not c.strip() for c in row):
                continue
            if width is None:
                width = len(row)
            if len(row) != width:
                raise OracleFormatError(
                    f"row {lineno}: expected {width} columns, found {len(row)}")
            cells = [c.strip() for c in row]
            bad = [c for c in cells if c not in ("0", "1")]
            if bad:
                raise OracleFormatError(f"row {lineno}: non-binary cell {bad[0]!r}")
            rows.append([c == "1" for c in cells])
    if not rows:
        raise OracleFormatError("oracle file is empty")
    try:
        return OracleMatrix(np.array(rows, dtype=bool))
    except ValueError as exc:
        raise OracleFormatError(str(exc)) from None


def format_measures(oracle: OracleMatrix) -> str:
    m = static_measures(oracle)
    acc = m.accuracy
    flags = m.pairwise.degenerate | m.nonpairwise.degenerate
    lines = [
        f"samples            {oracle.n_samples}",
        f"classifiers        {oracle.n_classifiers}",
        "accuracy per classifier  " + " ".join(f"{p:.6g}" for p in acc.p_per_classifier),
        f"P (from weights)   {acc.big_p_weighted:.12g}",
        f"P (from l_i)       {acc.big_p:.12g}",
        "failure histogram  " + " ".join(f"{t:.6g}" for t in acc.failure_histogram),
    ]
    names = {"rho": "rho_av", "q": "q_av", "dis": "dis_av", "df": "df_av"}
    for name, value in list(m.pairwise.as_dict().items()) + list(m.nonpairwise.as_dict().items()):
        label = names.get(name, name)
        mark = "  (degenerate)" if name in flags else ""
        lines.append(f"{label:<18} {value:.12g}{mark}")
    return "\n".join(lines) + "\n"


def print_measures(path) -> str:
    text = format_measures(load_oracle_csv(path))
    print(text, end="")
    return text
