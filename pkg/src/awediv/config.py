"""Experiment configuration: flat ``key=value`` files plus flag overrides."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional

from .ensemble import WEIGHTING_MODES
from .learners import LEARNERS
from .stream_diversity import DEFAULT_ALPHA, MODES
from .streams import ConceptParams, DriftEvent, DriftSchedule, SEA_THRESHOLDS


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    # stream source: a CSV path or a generator name
    stream: Optional[str] = None
    generator: Optional[str] = None
    n_instances: int = 10_000
    seed: int = 0
    noise: float = 0.0
    threshold: float = SEA_THRESHOLDS[0]
    n_features: int = 10
    drift: str = ""
    amount_scale: Optional[float] = None
    # CSV options
    header: bool = False
    amount_column: Optional[str] = None
    classes: Optional[str] = None
    # ensemble
    chunk_size: int = 500
    capacity: int = 10
    weighting: str = "mse"
    cost: float = 0.0
    positive_label: str = "1"
    learner: str = "nb"
    prune_nonpositive: bool = True
    # diversity tracking and output
    mode: str = "block"
    window: Optional[int] = None
    alpha: float = DEFAULT_ALPHA
    out: str = "metrics.csv"
    plot: bool = False

    @property
    def modes(self) -> tuple[str, ...]:
        return tuple(m.strip() for m in self.mode.split(",") if m.strip())

    @property
    def window_size(self) -> int:
        return self.chunk_size if self.window is None else self.window

    def validate(self) -> "ExperimentConfig":
        if (self.stream is None) == (self.generator is None):
            raise ConfigError("exactly one of 'stream' (CSV path) or 'generator' is required")
        if self.generator is not None and self.generator not in ("sea", "hyperplane"):
            raise ConfigError(f"unknown generator {self.generator!r}")
        if self.chunk_size < 1:
            raise ConfigError("chunk_size must be positive")
        if self.capacity < 2:
            raise ConfigError("capacity must be at least 2")
        if self.weighting not in WEIGHTING_MODES:
            raise ConfigError(f"weighting must be one of {WEIGHTING_MODES}")
        if self.learner not in LEARNERS:
            raise ConfigError(f"learner must be one of {sorted(LEARNERS)}")
        for m in self.modes:
            if m not in MODES:
                raise ConfigError(f"unknown diversity mode {m!r}; choose from {MODES}")
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError("alpha must lie in (0, 1]")
        if self.window_size < 1:
            raise ConfigError("window must be positive")
        if self.n_instances < 0:
            raise ConfigError("n_instances must be non-negative")
        if not 0.0 <= self.noise < 0.5:
            raise ConfigError("noise must lie in [0, 0.5)")
        if self.weighting == "benefit" and self.generator is None and self.amount_column is None:
            raise ConfigError("benefit weighting needs amount_column for CSV streams")
        if self.weighting == "benefit" and self.generator is not None and not self.amount_scale:
            raise ConfigError("benefit weighting needs amount_scale for generated streams")
        if self.generator is not None:
            parse_drift(self.drift, self.base_concept())
        return self

    def base_concept(self) -> ConceptParams:
        if self.generator == "hyperplane":
            return ConceptParams("hyperplane", normal=(1.0,) * self.n_features, noise=self.noise)
        return ConceptParams("sea", self.threshold, noise=self.noise)


_FIELDS = {f.name: f for f in fields(ExperimentConfig)}
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _coerce(name: str, raw: str):
    kind = _FIELDS[name].type
    raw = raw.strip()
    if "Optional" in kind and raw.lower() in ("", "none"):
        return None
    try:
        if "bool" in kind:
            if raw.lower() in _TRUE:
                return True
            if raw.lower() in _FALSE:
                return False
            raise ValueError(raw)
        if "int" in kind:
            return int(raw)
        if "float" in kind:
            return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {name}: {raw!r}") from None
    return raw


def normalize_key(key: str) -> str:
    k = key.strip().lstrip("-").replace("-", "_")
    if k == "modes":
        k = "mode"
    if k not in _FIELDS:
        raise ConfigError(f"unknown config key {key!r}")
    return k


def parse_config_text(text: str) -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key=value")
        key, value = line.split("=", 1)
        k = normalize_key(key)
        out[k] = _coerce(k, value)
    return out


def load_config(path: Optional[str] = None, overrides: Optional[dict] = None) -> ExperimentConfig:
    values = {}
    if path is not None:
        try:
            values.update(parse_config_text(Path(path).read_text(encoding="utf-8")))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        k = normalize_key(key)
        values[k] = _coerce(k, value) if isinstance(value, str) else value
    return replace(ExperimentConfig(), **values).validate()


def _apply_change(concept: ConceptParams, change: str) -> ConceptParams:
    change = change.strip()
    if change == "flip":
        return replace(concept, flip=not concept.flip)
    if "=" not in change:
        raise ConfigError(f"bad drift change {change!r}")
    key, value = (s.strip() for s in change.split("=", 1))
    try:
        if key in ("theta", "threshold"):
            return replace(concept, threshold=float(value))
        if key == "noise":
            return replace(concept, noise=float(value))
        if key == "priors":
            if value.lower() == "none":
                return replace(concept, class_priors=None)
            return replace(concept, class_priors=tuple(float(v) for v in value.split("/")))
        if key == "normal":
            return replace(concept, normal=tuple(float(v) for v in value.split("/")))
        if key == "offset":
            return replace(concept, offset=float(value))
    except ValueError as exc:
        raise ConfigError(f"bad drift change {change!r}: {exc}") from None
    raise ConfigError(f"unknown drift change {key!r}")


def parse_drift(text: str, base: ConceptParams) -> DriftSchedule:
    """Parse ``POS:sudden:CHANGES`` / ``POS:gradual:WIDTH:CHANGES`` events.

    Events are separated by ``;`` and changes within an event by ``,``.
    Changes apply on top of the previous concept: ``flip``, ``theta=9``,
    ``noise=0.1``, ``priors=0.8/0.2``, ``normal=1/2/3``, ``offset=2.5``.
    """
    events = []
    concept = base
    for raw in filter(None, (s.strip() for s in (text or "").split(";"))):
        parts = raw.split(":")
        try:
            position = int(parts[0])
            kind = parts[1].strip()
            if kind == "gradual":
                width, changes = int(parts[2]), parts[3]
            elif kind == "sudden":
                width, changes = 1, parts[2]
            else:
                raise ConfigError(f"unknown drift kind {kind!r}")
        except (IndexError, ValueError):
            raise ConfigError(f"bad drift event {raw!r}") from None
        for change in changes.split(","):
            concept = _apply_change(concept, change)
        events.append(DriftEvent(position, concept, kind, width))
    try:
        return DriftSchedule(tuple(events))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def config_text(config: ExperimentConfig) -> str:
    """Render a config back to the flat key=value format."""
    lines = []
    for f in fields(config):
        v = getattr(config, f.name)
        if v is None:
            continue
        lines.append(f"{f.name}={str(v).lower() if isinstance(v, bool) else v}")
    return "\n".join(lines) + "\n"
