"""
Input schemas of the command-line front end.
"""
import json
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from pydantic import BaseModel, Field, ValidationError, field_validator

from src.billiards.tables import QUADRANTS, NibbledEllipse
from src.config import settings
from src.exceptions import CompatibilityViolation, DomainError


class QuadrantSpec(BaseModel):
    alphas: List[float]
    betas: List[float]


class TableSpec(BaseModel):
    """Table JSON: ``{"a", "b", "quadrants": {"pp", "pm", "mp", "mm"}}``; no defaults for a, b."""

    a: float
    b: float
    quadrants: Dict[str, QuadrantSpec]

    @field_validator("quadrants")
    @classmethod
    def all_quadrants(cls, value: Dict[str, QuadrantSpec]) -> Dict[str, QuadrantSpec]:
        missing = [q for q in QUADRANTS if q not in value]
        extra = sorted(set(value) - set(QUADRANTS))
        if missing or extra:
            raise ValueError(f"quadrants must be exactly {QUADRANTS} (missing {missing}, unexpected {extra})")
        return value

    def build(self) -> NibbledEllipse:
        return NibbledEllipse.from_dict(self.model_dump())


def load_table(path: str) -> NibbledEllipse:
    """Read, validate and normalize a table JSON file.

    Raises:
        CompatibilityViolation: the file is not valid table JSON.
        DomainError: the file cannot be read.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise DomainError(f"Cannot read table file {path}: {e}") from e
    try:
        parsed = TableSpec.model_validate(json.loads(text))
    except (json.JSONDecodeError, ValidationError) as e:
        raise CompatibilityViolation(f"Malformed table JSON in {path}: {e}") from e
    return parsed.build()


def dump_table(table: NibbledEllipse) -> str:
    """Canonical JSON text of a table; loading and dumping again gives the same text."""
    return json.dumps(table.to_dict(), indent=2, sort_keys=True) + "\n"


TIGHTENABLE = (
    "corner_tolerance",
    "quadrature_rtol",
    "pairing_corner_tolerance",
    "regular_corner_tolerance",
    "connection_tolerance",
    "weak_sign_band",
)


class RunConfig(BaseModel):
    """One CLI invocation: command, files, grid, trace parameters and tolerance overrides."""

    command: str
    table: Optional[str] = None
    out: Optional[str] = None
    format: str = "json"
    grid: int = Field(default_factory=lambda: settings.grid_size, ge=1)
    margin: float = Field(default_factory=lambda: settings.interval_margin, gt=0.0, lt=0.5)
    samples: int = Field(5, ge=1)
    n: int = Field(1000, ge=1)
    window: Optional[int] = Field(None, ge=1)
    horizon: float = Field(100.0, gt=0.0)
    seeds: List[int] = Field(default_factory=lambda: [0])
    threads: Optional[int] = Field(None, ge=1)
    tolerances: Dict[str, float] = Field(default_factory=dict)

    @field_validator("format")
    @classmethod
    def known_format(cls, value: str) -> str:
        if value not in ("json", "csv", "svg"):
            raise ValueError(f"Unknown format {value!r}")
        return value

    @field_validator("tolerances")
    @classmethod
    def only_tighten(cls, value: Dict[str, float]) -> Dict[str, float]:
        for name, tolerance in value.items():
            if name not in TIGHTENABLE:
                raise ValueError(f"{name} cannot be overridden")
            default = getattr(settings, name)
            if not 0.0 < tolerance <= default:
                raise ValueError(f"{name}={tolerance} would loosen the default {default}")
        return value

    @classmethod
    def build(cls, **kwargs) -> "RunConfig":
        try:
            return cls(**kwargs)
        except ValidationError as e:
            raise DomainError(f"Invalid options: {e}") from e

    def apply_tolerances(self) -> Dict[str, float]:
        """Install the overrides on ``settings`` and return the values they replaced."""
        previous = {name: getattr(settings, name) for name in self.tolerances}
        for name, tolerance in self.tolerances.items():
            setattr(settings, name, tolerance)
        return previous


def parse_tolerances(items: Sequence[str]) -> Dict[str, float]:
    """``NAME=VALUE`` pairs from the command line."""
    parsed = {}
    for item in items:
        name, sep, value = item.partition("=")
        try:
            if not sep:
                raise ValueError
            parsed[name.strip()] = float(value)
        except ValueError:
            raise DomainError(f"Tolerance override {item!r} is not NAME=VALUE") from None
    return parsed
