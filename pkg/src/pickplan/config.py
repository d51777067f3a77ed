"""One-file configuration for every tunable knob.

A TOML or JSON file supplies per-section values, command-line flags
override the file, and dataclass defaults fill the rest. Sections
mirror the library config types one to one, so a config file is
self-documenting against the dataclasses.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from .detection import DetectorConfig
from .errors import ConfigError
from .filtering import FilterThresholds, RegionGeometry
from .ranking import ScorerConfig
from .sampling import SamplerConfig
from .scenes import DEFAULT_NOISE_SIGMA_M, DEFAULT_TABLE_DEPTH_M
from .suction import SuctionConfig


@dataclass(frozen=True)
class SceneSettings:
    noise_sigma_m: float = DEFAULT_NOISE_SIGMA_M
    table_depth_m: float = DEFAULT_TABLE_DEPTH_M


@dataclass(frozen=True)
class PipelineSettings:
    pick_failure_prob: float = 0.0
    max_replans: int = 1
    use_truth_detector: bool = False


@dataclass(frozen=True)
class FilterSettings:
    """FilterThresholds plus the jaw-color sign convention flag."""

    thresholds: FilterThresholds = field(default_factory=FilterThresholds)
    signed_color_diff: bool = False


@dataclass(frozen=True)
class ToolkitConfig:
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    filter: FilterSettings = field(default_factory=FilterSettings)
    geometry: RegionGeometry = field(default_factory=RegionGeometry)
    scorer: ScorerConfig = field(default_factory=ScorerConfig)
    suction: SuctionConfig = field(default_factory=SuctionConfig)
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    scene: SceneSettings = field(default_factory=SceneSettings)
    pipeline: PipelineSettings = field(default_factory=PipelineSettings)


_SECTION_TYPES = {
    "sampler": SamplerConfig,
    "geometry": RegionGeometry,
    "scorer": ScorerConfig,
    "suction": SuctionConfig,
    "detector": DetectorConfig,
    "scene": SceneSettings,
    "pipeline": PipelineSettings,
}


def read_config_file(path: str | Path) -> dict:
    """Parse TOML (by .toml suffix) or JSON into a section dict."""
    path = Path(path)
    try:
        if path.suffix.lower() == ".toml":
            with path.open("rb") as fh:
                return tomllib.load(fh)
        return json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc


def _build_section(name: str, cls: type, values: dict) -> Any:
    valid = {f.name for f in dataclasses.fields(cls)}
    unknown = set(values) - valid
    if unknown:
        raise ConfigError(f"unknown keys in [{name}]: {', '.join(sorted(unknown))}")
    try:
        return cls(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad values in [{name}]: {exc}") from exc


def _merge(base: dict, extra: Optional[dict]) -> dict:
    merged = dict(base)
    if extra:
        merged.update({k: v for k, v in extra.items() if v is not None})
    return merged


def build_toolkit_config(file_data: Optional[dict] = None,
                         overrides: Optional[dict[str, dict]] = None) -> ToolkitConfig:
    """Resolve precedence: overrides (CLI) > file values > defaults."""
    file_data = file_data or {}
    overrides = overrides or {}
    known = set(_SECTION_TYPES) | {"filter"}
    unknown = set(file_data) - known
    if unknown:
        raise ConfigError(f"unknown config sections: {', '.join(sorted(unknown))}")

    sections = {}
    for name, cls in _SECTION_TYPES.items():
        values = _merge(file_data.get(name, {}), overrides.get(name))
        sections[name] = _build_section(name, cls, values)

    filter_values = _merge(file_data.get("filter", {}), overrides.get("filter"))
    signed = bool(filter_values.pop("signed_color_diff", False))
    thresholds = _build_section("filter", FilterThresholds, filter_values)
    sections["filter"] = FilterSettings(thresholds=thresholds, signed_color_diff=signed)
    return ToolkitConfig(**sections)


def load_toolkit_config(path: Optional[str | Path] = None,
                        overrides: Optional[dict[str, dict]] = None) -> ToolkitConfig:
    file_data = read_config_file(path) if path else None
    return build_toolkit_config(file_data, overrides)


def toolkit_config_dict(cfg: ToolkitConfig) -> dict:
    """Flat JSON-able echo of every resolved value, for run reports."""
    out: dict = {}
    for name in _SECTION_TYPES:
        out[name] = dataclasses.asdict(getattr(cfg, name))
    filt = dataclasses.asdict(cfg.filter.thresholds)
    filt["signed_color_diff"] = cfg.filter.signed_color_diff
    out["filter"] = filt
    return out
