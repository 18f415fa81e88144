"""Study effects, study pairs and the bundled RCT DUPLICATE dataset.

Published results come as hazard ratios with two-sided confidence
intervals.  Everything downstream works on the log-HR scale with standard
errors recovered from the interval width, and with z-statistics oriented so
that positive values favour the treatment (HR below the margin).
"""

from __future__ import annotations

import csv
import enum
import io
import math
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterator, Sequence

from .errors import DomainError, IngestionError
from .numerics import norm_quantile, norm_sf

BUNDLED = "bundled"
DATA_ENV_VAR = "REPLISURE_DATA"
CSV_COLUMNS = (
    "label", "design", "margin_hr",
    "rct_hr", "rct_lo", "rct_hi",
    "rwe_hr", "rwe_lo", "rwe_hi",
    "medicare_available",
)


class Design(str, enum.Enum):
    SUPERIORITY = "sup"
    NON_INFERIORITY = "ni"


def se_from_ci(lo: float, hi: float, level: float = 0.95) -> float:
    """Standard error of the log-HR implied by a symmetric ``level`` CI."""
    if not 0.0 < level < 1.0:
        raise DomainError(f"confidence level must lie in (0, 1), got {level!r}")
    if not (lo > 0 and hi > 0):
        raise DomainError(f"CI limits must be positive, got ({lo}, {hi})")
    if not lo < hi:
        raise DomainError(f"CI requires lo < hi, got ({lo}, {hi})")
    return (math.log(hi) - math.log(lo)) / (2.0 * norm_quantile((1.0 + level) / 2.0))


def z_to_p(z: float) -> float:
    """One-sided p-value ``1 - Phi(z)``."""
    return norm_sf(z)


def p_to_z(p: float) -> float:
    if not 0.0 < p < 1.0:
        raise DomainError(f"p-value must lie in (0, 1), got {p!r}")
    return -norm_quantile(p)


@dataclass(frozen=True)
class StudyEffect:
    """A hazard ratio with its two-sided confidence interval."""

    hr: float
    ci_lo: float
    ci_hi: float
    ci_level: float = 0.95

    def __post_init__(self):
        if not (self.hr > 0 and self.ci_lo > 0 and self.ci_hi > 0):
            raise DomainError(
                f"HR and CI limits must be positive, got {self.hr} ({self.ci_lo}, {self.ci_hi})"
            )
        if not self.ci_lo <= self.hr <= self.ci_hi:
            raise DomainError(
                f"HR {self.hr} lies outside its CI ({self.ci_lo}, {self.ci_hi})"
            )
        if not self.ci_lo < self.ci_hi:
            raise DomainError(f"degenerate CI ({self.ci_lo}, {self.ci_hi})")

    @classmethod
    def from_log(cls, theta: float, se: float, level: float = 0.95) -> "StudyEffect":
        if not se > 0:
            raise DomainError(f"standard error must be positive, got {se!r}")
        half = norm_quantile((1.0 + level) / 2.0) * se
        return cls(math.exp(theta), math.exp(theta - half), math.exp(theta + half), level)

    @property
    def log_hr(self) -> float:
        return math.log(self.hr)

    @property
    def se(self) -> float:
        return se_from_ci(self.ci_lo, self.ci_hi, self.ci_level)


@dataclass(frozen=True)
class StudyPair:
    label: str
    design: Design
    margin_hr: float
    original: StudyEffect
    replication: StudyEffect
    medicare_available: bool = False

    def __post_init__(self):
        object.__setattr__(self, "design", Design(self.design))
        if self.design is Design.SUPERIORITY and self.margin_hr != 1.0:
            raise DomainError(
                f"{self.label}: superiority design requires margin 1, got {self.margin_hr}"
            )
        if self.design is Design.NON_INFERIORITY and not self.margin_hr > 1.0:
            raise DomainError(
                f"{self.label}: non-inferiority margin must exceed 1, got {self.margin_hr}"
            )

    @property
    def log_margin(self) -> float:
        return math.log(self.margin_hr)


@dataclass(frozen=True)
class NormalizedPair:
    """Margin-shifted, direction-normalised summary of a study pair.

    Positive ``z_o``/``z_r`` mean the estimate lies below the margin.
    """

    z_o: float
    z_r: float
    se_o: float
    se_r: float
    c: float
    delta: float
    theta_o: float
    theta_r: float

    @property
    def p_o(self) -> float:
        return z_to_p(self.z_o)

    @property
    def p_r(self) -> float:
        return z_to_p(self.z_r)


def normalize_pair(pair: StudyPair, log_margin: float | None = None) -> NormalizedPair:
    """Reduce ``pair`` to z-statistics against its margin.

    ``log_margin`` overrides the pair's own margin; the sceptical CI
    inversion scans over it.
    """
    delta = pair.log_margin if log_margin is None else float(log_margin)
    theta_o = pair.original.log_hr
    theta_r = pair.replication.log_hr
    se_o = pair.original.se
    se_r = pair.replication.se
    return NormalizedPair(
        z_o=(delta - theta_o) / se_o,
        z_r=(delta - theta_r) / se_r,
        se_o=se_o,
        se_r=se_r,
        c=se_o**2 / se_r**2,
        delta=delta,
        theta_o=theta_o,
        theta_r=theta_r,
    )


@dataclass(frozen=True)
class Dataset:
    pairs: tuple[StudyPair, ...]

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        seen = set()
        for p in self.pairs:
            if p.label in seen:
                raise DomainError(f"duplicate label {p.label!r}")
            seen.add(p.label)

    def __iter__(self) -> Iterator[StudyPair]:
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __getitem__(self, label: str) -> StudyPair:
        for p in self.pairs:
            if p.label == label:
                return p
        raise KeyError(label)

    @property
    def labels(self) -> list[str]:
        return [p.label for p in self.pairs]

    def without(self, labels: Sequence[str]) -> "Dataset":
        unknown = set(labels) - set(self.labels)
        if unknown:
            raise KeyError(", ".join(sorted(unknown)))
        return Dataset(tuple(p for p in self.pairs if p.label not in set(labels)))


_BOOL = {"true": True, "false": False, "1": True, "0": False, "yes": True, "no": False}


def _positive(row: dict, column: str, rowno: int) -> float:
    raw = row.get(column)
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise IngestionError(f"not a number: {raw!r}", rowno, column) from None
    if not (math.isfinite(value) and value > 0):
        raise IngestionError(f"must be positive, got {raw!r}", rowno, column)
    return value


def _parse_row(row: dict, rowno: int) -> StudyPair:
    label = (row.get("label") or "").strip()
    if not label:
        raise IngestionError("empty label", rowno, "label")
    try:
        design = Design(row["design"].strip().lower())
    except (ValueError, AttributeError):
        raise IngestionError(
            f"design must be 'sup' or 'ni', got {row.get('design')!r}", rowno, "design"
        ) from None
    margin = _positive(row, "margin_hr", rowno)
    if design is Design.NON_INFERIORITY and not margin > 1.0:
        raise IngestionError(f"non-inferiority margin must exceed 1, got {margin}", rowno, "margin_hr")
    if design is Design.SUPERIORITY and margin != 1.0:
        raise IngestionError(f"superiority margin must be 1, got {margin}", rowno, "margin_hr")

    effects = []
    for prefix in ("rct", "rwe"):
        hr, lo, hi = (_positive(row, f"{prefix}_{k}", rowno) for k in ("hr", "lo", "hi"))
        if not lo < hi:
            raise IngestionError(f"{prefix}_lo ({lo}) must be below {prefix}_hi ({hi})", rowno, f"{prefix}_lo")
        if not lo <= hr <= hi:
            raise IngestionError(f"{prefix}_hr {hr} outside ({lo}, {hi})", rowno, f"{prefix}_hr")
        effects.append(StudyEffect(hr, lo, hi))

    flag = (row.get("medicare_available") or "").strip().lower()
    if flag not in _BOOL:
        raise IngestionError(
            f"expected true/false, got {row.get('medicare_available')!r}", rowno, "medicare_available"
        )
    return StudyPair(label, design, margin, effects[0], effects[1], _BOOL[flag])


def parse_dataset(text: str) -> Dataset:
    """Parse dataset CSV text; lines starting with ``#`` are comments."""
    lines = [ln for ln in text.splitlines() if not ln.lstrip().startswith("#")]
    reader = csv.DictReader(io.StringIO("\n".join(lines)))
    if reader.fieldnames is None:
        raise IngestionError("empty file: header row required")
    header = [h.strip() for h in reader.fieldnames]
    reader.fieldnames = header
    missing = [c for c in CSV_COLUMNS if c not in header]
    if missing:
        raise IngestionError(f"missing column(s): {', '.join(missing)}")

    pairs: list[StudyPair] = []
    seen: dict[str, int] = {}
    for rowno, row in enumerate(reader, start=1):
        pair = _parse_row(row, rowno)
        if pair.label in seen:
            raise IngestionError(
                f"duplicate label {pair.label!r} (first seen in row {seen[pair.label]})",
                rowno, "label",
            )
        seen[pair.label] = rowno
        pairs.append(pair)
    if not pairs:
        raise IngestionError("dataset has no rows")
    return Dataset(tuple(pairs))


def bundled_text() -> str:
    return resources.files("replisure").joinpath("data/rct_duplicate.csv").read_text("utf-8")


def load_dataset(source: str | os.PathLike | None = None) -> Dataset:
    """Load a dataset CSV.

    ``None`` or ``"bundled"`` selects the file named by ``$REPLISURE_DATA``
    if set, otherwise the packaged RCT DUPLICATE table.
    """
    if source is None or str(source) == BUNDLED:
        override = os.environ.get(DATA_ENV_VAR)
        if not override:
            return parse_dataset(bundled_text())
        source = override
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise FileNotFoundError(f"dataset not found: {path}") from None
    return parse_dataset(text)
