"""JSON run configuration: user platforms, energy coefficients and search knobs."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .optimizer import EnergyModel
from .platforms import FabricationPlatform, builtin_platforms

_TOP_LEVEL = {"platforms", "energy_model", "coupler_count", "min_spacing_linewidths"}


@dataclass
class FileConfig:
    platforms: list[FabricationPlatform] = field(default_factory=builtin_platforms)
    energy_model: EnergyModel = field(default_factory=EnergyModel)
    coupler_count: Optional[int] = None
    min_spacing_linewidths: Optional[float] = None


def parse_config(doc: dict) -> FileConfig:
    if not isinstance(doc, dict):
        raise ValueError("config document must be a JSON object")
    unknown = sorted(set(doc) - _TOP_LEVEL)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    cfg = FileConfig()
    if "platforms" in doc:
        records = doc["platforms"]
        if not isinstance(records, list) or not records:
            raise ValueError("'platforms' must be a non-empty array")
        cfg.platforms = [FabricationPlatform.from_dict(r) for r in records]
        names = [p.name for p in cfg.platforms]
        if len(set(names)) != len(names):
            raise ValueError("platform names must be unique")
    if "energy_model" in doc:
        cfg.energy_model = EnergyModel.from_dict(doc["energy_model"])
    if "coupler_count" in doc:
        count = doc["coupler_count"]
        if isinstance(count, bool) or not isinstance(count, int) or count < 0:
            raise ValueError("coupler_count must be a non-negative integer")
        cfg.coupler_count = count
    if "min_spacing_linewidths" in doc:
        cfg.min_spacing_linewidths = float(doc["min_spacing_linewidths"])
    return cfg


def load_config(path: str | Path) -> FileConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(json.load(fh))


def load_energy_model(path: str | Path) -> EnergyModel:
    """Read an energy model from a file holding either the section or a full config."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if isinstance(doc, dict) and "energy_model" in doc:
        doc = doc["energy_model"]
    if not isinstance(doc, dict):
        raise ValueError("energy model must be a JSON object")
    return EnergyModel.from_dict(doc)


def dump_config(cfg: FileConfig) -> dict:
    doc: dict = {
        "platforms": [p.to_dict() for p in cfg.platforms],
        "energy_model": {
            "laser_wallplug_efficiency": cfg.energy_model.laser_wallplug_efficiency,
            "tuning_power_per_mrr": cfg.energy_model.tuning_power_per_mrr,
            "driver_energy": cfg.energy_model.driver_energy,
            "receiver_energy": cfg.energy_model.receiver_energy,
        },
    }
    if cfg.coupler_count is not None:
        doc["coupler_count"] = cfg.coupler_count
    if cfg.min_spacing_linewidths is not None:
        doc["min_spacing_linewidths"] = cfg.min_spacing_linewidths
    return doc
