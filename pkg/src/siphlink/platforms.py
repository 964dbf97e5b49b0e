"""Fabrication platforms, design pathways and the link variants derived from them."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, fields, replace
from typing import Iterable, Optional

# Design-pathway targets.
MINIMIZED_PROPAGATION_LOSS = 1.0  # dB/cm
MINIMIZED_COUPLING_LOSS = 1.0  # dB
WIDE_FSR = 80.0  # nm, comb-laser reach caps the usable FSR
INCREASED_MAOP_PER_WAVELENGTH = 15.0  # dBm (31.62 mW)

# maop_per_waveguide is None when the per-waveguide limit is removed.
UNBOUNDED = None


@dataclass(frozen=True)
class FabricationPlatform:
    """Device and link parameters of one silicon-photonic process.

    Units: wavelengths/FSR in nm, bandwidths in GHz, powers in dBm,
    losses in dB (``propagation_loss`` in dB/cm), bit-rate in Gb/s.
    ``maop_per_waveguide`` is ``None`` when the link has no per-waveguide
    power ceiling.
    """

    name: str
    q_modulator: float
    q_filter: float
    mrr_radius: float  # um, informational only
    operating_wavelength: float
    fsr: float
    modulator_bandwidth: float
    detector_bandwidth: float
    receiver_sensitivity: float
    propagation_loss: float
    maop_per_wavelength: float
    maop_per_waveguide: Optional[float]
    coupling_loss: float
    bitrate_max: float
    modulator_il: float
    filter_il: float

    def __post_init__(self) -> None:
        for attr in ("q_modulator", "q_filter", "fsr", "operating_wavelength", "bitrate_max"):
            if not getattr(self, attr) > 0:
                raise ValueError(f"{self.name}: {attr} must be positive")
        for attr in ("propagation_loss", "coupling_loss", "modulator_il", "filter_il"):
            if getattr(self, attr) < 0:
                raise ValueError(f"{self.name}: {attr} must be non-negative")
        if self.maop_per_waveguide is not None and self.maop_per_wavelength > self.maop_per_waveguide:
            raise ValueError(f"{self.name}: per-wavelength MAOP exceeds per-waveguide MAOP")
        if not self.receiver_sensitivity < self.maop_per_wavelength:
            raise ValueError(f"{self.name}: receiver sensitivity must lie below per-wavelength MAOP")

    @property
    def waveguide_bounded(self) -> bool:
        return self.maop_per_waveguide is not None

    def to_dict(self) -> dict:
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        if data["maop_per_waveguide"] is None:
            data["maop_per_waveguide"] = "unbounded"
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "FabricationPlatform":
        """Build a platform from a config record; every field is required."""
        names = [f.name for f in fields(cls)]
        missing = [n for n in names if n not in data]
        if missing:
            raise ValueError(f"platform record missing fields: {', '.join(missing)}")
        unknown = sorted(set(data) - set(names))
        if unknown:
            raise ValueError(f"platform record has unknown fields: {', '.join(unknown)}")
        kwargs = {}
        for n in names:
            value = data[n]
            if n == "name":
                kwargs[n] = str(value)
            elif n == "maop_per_waveguide" and (value is None or value == "unbounded"):
                kwargs[n] = None
            else:
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ValueError(f"platform field {n!r} must be a number")
                kwargs[n] = float(value)
        return cls(**kwargs)


@dataclass(frozen=True, order=True)
class PathwaySet:
    minimized_loss: bool = False
    wide_fsr: bool = False
    increased_maop: bool = False

    @property
    def code(self) -> int:
        """Binary code: minimized_loss is bit 0, wide_fsr bit 1, increased_maop bit 2."""
        return int(self.minimized_loss) | (self.wide_fsr << 1) | (self.increased_maop << 2)

    @classmethod
    def from_code(cls, code: int) -> "PathwaySet":
        if not 0 <= code < 8:
            raise ValueError(f"pathway code out of range: {code}")
        return cls(bool(code & 1), bool(code & 2), bool(code & 4))

    @classmethod
    def all(cls) -> list["PathwaySet"]:
        return [cls.from_code(c) for c in range(8)]

    @property
    def label(self) -> str:
        parts = []
        if self.minimized_loss:
            parts.append("Minimized Loss")
        if self.wide_fsr:
            parts.append("Wide FSR")
        if self.increased_maop:
            parts.append("Increased MAOP")
        return " + ".join(parts) if parts else "Vanilla"

    @property
    def short(self) -> str:
        flags = [k for k, on in (("ml", self.minimized_loss), ("wf", self.wide_fsr), ("im", self.increased_maop)) if on]
        return ",".join(flags) if flags else "vanilla"

    @classmethod
    def parse(cls, text: str) -> "PathwaySet":
        """Parse ``vanilla``, ``all`` or a comma list drawn from ``ml,wf,im``."""
        text = text.strip().lower()
        if text == "vanilla":
            return cls()
        if text == "all":
            return cls(True, True, True)
        tokens = [t.strip() for t in text.split(",") if t.strip()]
        if not tokens:
            raise ValueError("empty pathway list")
        valid = {"ml": "minimized_loss", "wf": "wide_fsr", "im": "increased_maop"}
        bad = [t for t in tokens if t not in valid]
        if bad:
            raise ValueError(f"invalid pathway flag: {', '.join(bad)}")
        return cls(**{valid[t]: True for t in tokens})


@dataclass(frozen=True)
class LinkVariant:
    base: FabricationPlatform
    pathways: PathwaySet
    effective: FabricationPlatform

    @property
    def name(self) -> str:
        return f"{self.base.name} + {self.pathways.label}"


def apply_pathways(base: FabricationPlatform, pathways: PathwaySet) -> LinkVariant:
    overrides: dict = {}
    if pathways.minimized_loss:
        overrides["propagation_loss"] = MINIMIZED_PROPAGATION_LOSS
        overrides["coupling_loss"] = MINIMIZED_COUPLING_LOSS
    if pathways.wide_fsr:
        overrides["fsr"] = WIDE_FSR
    if pathways.increased_maop:
        overrides["maop_per_wavelength"] = INCREASED_MAOP_PER_WAVELENGTH
        overrides["maop_per_waveguide"] = UNBOUNDED
    effective = replace(base, **overrides) if overrides else base
    return LinkVariant(base=base, pathways=pathways, effective=effective)


def enumerate_variants(platforms: Iterable[FabricationPlatform]) -> list[LinkVariant]:
    """All eight pathway sets for every platform, platform-major."""
    platforms = list(platforms)
    if not platforms:
        raise ValueError("at least one platform is required")
    return [apply_pathways(p, s) for p, s in itertools.product(platforms, PathwaySet.all())]


def builtin_platforms() -> list[FabricationPlatform]:
    return [
        FabricationPlatform(
            name="45nm-soi",
            q_modulator=10000,
            q_filter=8500,
            mrr_radius=5.0,
            operating_wavelength=1290.0,
            fsr=12.6,
            modulator_bandwidth=13.0,
            detector_bandwidth=5.0,
            receiver_sensitivity=-17.645,
            propagation_loss=3.7,
            maop_per_wavelength=2.3,
            maop_per_waveguide=20.0,
            coupling_loss=1.5,
            bitrate_max=12.0,
            modulator_il=4.7,
            filter_il=0.18,
        ),
        FabricationPlatform(
            name="32nm-soi",
            q_modulator=6000,
            q_filter=6500,
            mrr_radius=5.0,
            operating_wavelength=1310.0,
            fsr=13.0,
            modulator_bandwidth=13.5,
            detector_bandwidth=12.5,
            receiver_sensitivity=-11.79,
            propagation_loss=10.0,
            maop_per_wavelength=4.0,
            maop_per_waveguide=20.0,
            coupling_loss=4.9,
            bitrate_max=12.5,
            modulator_il=2.8,
            filter_il=0.14,
        ),
        FabricationPlatform(
            name="poly-si",
            q_modulator=5000,
            q_filter=5000,
            mrr_radius=7.5,
            operating_wavelength=1300.0,
            fsr=8.54,
            modulator_bandwidth=16.8,
            detector_bandwidth=11.0,
            receiver_sensitivity=-20.414,
            propagation_loss=20.0,
            maop_per_wavelength=4.5,
            maop_per_waveguide=20.0,
            coupling_loss=5.2,
            bitrate_max=11.0,
            modulator_il=3.8,
            filter_il=0.11,
        ),
    ]


def platform_by_name(name: str, platforms: Iterable[FabricationPlatform] | None = None) -> FabricationPlatform:
    pool = list(platforms) if platforms is not None else builtin_platforms()
    for p in pool:
        if p.name == name:
            return p
    known = ", ".join(p.name for p in pool)
    raise KeyError(f"unknown platform {name!r} (known: {known})")


def mw_to_dbm(mw: float) -> float:
    return 10.0 * math.log10(mw)


def dbm_to_mw(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)
