"""Length sweeps, viability classes and the platform x pathway grid."""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional

from .budget import LinkGeometry
from .optimizer import EnergyModel, OptimumDuplet, SearchSpace, optimize
from .platforms import FabricationPlatform, LinkVariant, PathwaySet, enumerate_variants

DEFAULT_LMAX_CM = 10.0
DEFAULT_REPORT_LENGTH_CM = 8.0


class ViabilityClass(enum.Enum):
    V = "V"
    VR = "VR"
    NV = "NV"

    @property
    def rank(self) -> int:
        return {"NV": 0, "VR": 1, "V": 2}[self.value]


@dataclass(frozen=True)
class SweepResult:
    variant: LinkVariant
    points: tuple[tuple[float, OptimumDuplet], ...]

    @property
    def lengths(self) -> list[float]:
        return [length for length, _ in self.points]


@dataclass(frozen=True)
class GridRow:
    variant: LinkVariant
    viability: ViabilityClass
    duplet: OptimumDuplet  # at the report length
    max_viable_length_cm: float
    sweep: SweepResult


@dataclass(frozen=True)
class ViabilityGrid:
    rows: dict[tuple[str, PathwaySet], GridRow]
    report_length_cm: float

    def row(self, platform: str, pathways: PathwaySet) -> GridRow:
        return self.rows[(platform, pathways)]

    def __len__(self) -> int:
        return len(self.rows)


def sweep_lengths(l_max: float = DEFAULT_LMAX_CM, step: float = 1.0) -> list[float]:
    """Lengths 1, 1+step, ... up to and including l_max."""
    if l_max < 1:
        raise ValueError("l_max must be at least 1 cm")
    if not step > 0:
        raise ValueError("step must be positive")
    count = math.floor((l_max - 1.0) / step + 1e-9) + 1
    return [round(1.0 + i * step, 9) for i in range(count)]


def sweep(
    variant: LinkVariant,
    l_max_cm: float = DEFAULT_LMAX_CM,
    step: float = 1.0,
    search: SearchSpace = SearchSpace(),
    energy: Optional[EnergyModel] = None,
    coupler_count: int = 1,
) -> SweepResult:
    points = tuple(
        (length, optimize(variant, LinkGeometry(length, coupler_count), search, energy))
        for length in sweep_lengths(l_max_cm, step)
    )
    return SweepResult(variant=variant, points=points)


def classify(result: SweepResult) -> tuple[ViabilityClass, float]:
    """V: feasible at every swept length; VR: only at the shortest ones; NV: never at the first."""
    feasible = [d.feasible for _, d in result.points]
    max_viable = max((length for length, d in result.points if d.feasible), default=0.0)
    if not feasible or not feasible[0]:
        return ViabilityClass.NV, 0.0
    if all(feasible):
        return ViabilityClass.V, max_viable
    return ViabilityClass.VR, max_viable


def _grid_row(args) -> GridRow:
    variant, l_max, step, report_length, search, energy, coupler_count = args
    result = sweep(variant, l_max, step, search, energy, coupler_count)
    viability, max_viable = classify(result)
    duplet = optimize(variant, LinkGeometry(report_length, coupler_count), search, energy)
    return GridRow(variant, viability, duplet, max_viable, result)


def build_grid(
    platforms: Iterable[FabricationPlatform],
    l_max: float = DEFAULT_LMAX_CM,
    report_length_cm: float = DEFAULT_REPORT_LENGTH_CM,
    step: float = 1.0,
    search: SearchSpace = SearchSpace(),
    energy: Optional[EnergyModel] = None,
    coupler_count: int = 1,
    workers: int = 1,
) -> ViabilityGrid:
    variants = enumerate_variants(platforms)
    jobs = [(v, l_max, step, report_length_cm, search, energy, coupler_count) for v in variants]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_grid_row, jobs))
    else:
        rows = [_grid_row(j) for j in jobs]
    keyed = {(r.variant.base.name, r.variant.pathways): r for r in rows}
    if len(keyed) != len(rows):
        raise ValueError("platform names must be unique")
    return ViabilityGrid(rows=keyed, report_length_cm=report_length_cm)
