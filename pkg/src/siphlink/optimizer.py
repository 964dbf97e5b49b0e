"""Selection of the (N_lambda, BR) operating point, plus energy per bit.

A duplet is feasible when the per-wavelength budget holds and the DWDM
margin (per-waveguide OPB minus losses, penalties and 10*log10(N)) is
non-negative. Among feasible duplets the one with the largest aggregate
bandwidth wins; equal bandwidths are broken on the smaller margin, then on
the higher bit-rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .budget import LinkGeometry, evaluate_budget
from .platforms import LinkVariant, dbm_to_mw

DEFAULT_MIN_SPACING_LINEWIDTHS = 1.5
BR_SWEEP_STEP = 0.5  # Gb/s


@dataclass(frozen=True)
class EnergyModel:
    laser_wallplug_efficiency: float = 0.10
    tuning_power_per_mrr: float = 0.5  # mW
    driver_energy: float = 0.20  # pJ/bit
    receiver_energy: float = 0.15  # pJ/bit

    def __post_init__(self) -> None:
        if not 0.0 < self.laser_wallplug_efficiency <= 1.0:
            raise ValueError("laser_wallplug_efficiency must be in (0, 1]")
        for attr in ("tuning_power_per_mrr", "driver_energy", "receiver_energy"):
            if getattr(self, attr) < 0:
                raise ValueError(f"{attr} must be non-negative")

    @classmethod
    def from_dict(cls, data: dict) -> "EnergyModel":
        known = {"laser_wallplug_efficiency", "tuning_power_per_mrr", "driver_energy", "receiver_energy"}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"energy_model has unknown fields: {', '.join(unknown)}")
        return cls(**{k: float(v) for k, v in data.items()})


@dataclass(frozen=True)
class SearchSpace:
    """Knobs of the duplet search shared by the heuristic and the oracle."""

    min_spacing_linewidths: float = DEFAULT_MIN_SPACING_LINEWIDTHS
    br_sweep: bool = False

    def __post_init__(self) -> None:
        if not self.min_spacing_linewidths > 0:
            raise ValueError("min_spacing_linewidths must be positive")

    def n_max(self, variant: LinkVariant) -> int:
        eff = variant.effective
        min_spacing = self.min_spacing_linewidths * eff.operating_wavelength / eff.q_filter
        # guard exact multiples against rounding just below the integer
        return max(1, math.floor(eff.fsr / min_spacing + 1e-9))

    def bitrates(self, variant: LinkVariant) -> list[float]:
        """Candidate bit-rates, ascending.

        Without a sweep this is the platform bit-rate rounded down to whole
        Gb/s (or the raw ceiling when that is below 1 Gb/s).
        """
        top = variant.effective.bitrate_max
        if not self.br_sweep:
            return [float(math.floor(top))] if top >= 1.0 else [top]
        count = math.floor((top - 1.0) / BR_SWEEP_STEP + 1e-9) + 1
        return [1.0 + i * BR_SWEEP_STEP for i in range(max(count, 0))] or [top]


@dataclass(frozen=True)
class OptimumDuplet:
    n_lambda: int
    br_gbps: float
    aggregate_bw_gbps: float
    error_db: float
    feasible: bool
    epb_pj: float = 0.0

    @classmethod
    def infeasible(cls) -> "OptimumDuplet":
        return cls(n_lambda=0, br_gbps=0.0, aggregate_bw_gbps=0.0, error_db=0.0, feasible=False, epb_pj=0.0)


def error_function(variant: LinkVariant, geom: LinkGeometry, n_lambda: int, br_gbps: float) -> float:
    """Unused budget in dB after all losses and the DWDM term; -inf if the per-wavelength budget fails."""
    ev = evaluate_budget(variant, geom, n_lambda, br_gbps)
    if not ev.per_wavelength_ok:
        return -math.inf
    return ev.opb_margin


def _better(candidate: tuple[int, float, float], incumbent: Optional[tuple[int, float, float]]) -> bool:
    if incumbent is None:
        return True
    n, br, err = candidate
    n0, br0, err0 = incumbent
    agg, agg0 = n * br, n0 * br0
    if agg != agg0:
        return agg > agg0
    if err != err0:
        return err < err0
    return br > br0


def _finish(
    variant: LinkVariant,
    geom: LinkGeometry,
    best: Optional[tuple[int, float, float]],
    energy: Optional[EnergyModel],
) -> OptimumDuplet:
    if best is None:
        return OptimumDuplet.infeasible()
    n, br, err = best
    duplet = OptimumDuplet(n_lambda=n, br_gbps=br, aggregate_bw_gbps=n * br, error_db=err, feasible=True)
    epb = energy_per_bit(variant, geom, duplet, energy or EnergyModel())
    return OptimumDuplet(n, br, n * br, err, True, epb)


def optimize(
    variant: LinkVariant,
    geom: LinkGeometry,
    search: SearchSpace = SearchSpace(),
    energy: Optional[EnergyModel] = None,
) -> OptimumDuplet:
    """Largest-bandwidth feasible duplet via bisection on N per candidate bit-rate.

    The error is strictly decreasing in N (penalties never shrink as the
    grid tightens and 10*log10(N) grows), so the feasible N form a prefix
    of 1..N_max.
    """
    n_max = search.n_max(variant)
    best = None
    for br in search.bitrates(variant):
        err1 = error_function(variant, geom, 1, br)
        if err1 < 0:
            continue
        lo, hi, err_lo = 1, n_max, err1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            err = error_function(variant, geom, mid, br)
            if err >= 0:
                lo, err_lo = mid, err
            else:
                hi = mid - 1
        cand = (lo, br, err_lo)
        if _better(cand, best):
            best = cand
    return _finish(variant, geom, best, energy)


def brute_force_optimum(
    variant: LinkVariant,
    geom: LinkGeometry,
    search: SearchSpace = SearchSpace(),
    energy: Optional[EnergyModel] = None,
) -> OptimumDuplet:
    """Exhaustive evaluation of every duplet in the search space (validation oracle)."""
    best = None
    for br in search.bitrates(variant):
        for n in range(1, search.n_max(variant) + 1):
            err = error_function(variant, geom, n, br)
            if err >= 0 and _better((n, br, err), best):
                best = (n, br, err)
    return _finish(variant, geom, best, energy)


def launch_power_dbm(variant: LinkVariant, geom: LinkGeometry, n_lambda: int, br_gbps: float) -> float:
    """Per-wavelength laser power needed so the receiver sees its sensitivity."""
    ev = evaluate_budget(variant, geom, n_lambda, br_gbps)
    return variant.effective.receiver_sensitivity + ev.p_loss_total


def energy_per_bit(variant: LinkVariant, geom: LinkGeometry, duplet: OptimumDuplet, energy_model: EnergyModel) -> float:
    """Laser, thermal tuning, driver and receiver energy per bit, in pJ/bit."""
    if not duplet.feasible or duplet.n_lambda < 1:
        raise ValueError("energy per bit is defined only for a feasible duplet")
    eff = variant.effective
    launch = launch_power_dbm(variant, geom, duplet.n_lambda, duplet.br_gbps)
    assert launch <= eff.maop_per_wavelength + 1e-9, "launch power above per-wavelength MAOP"
    laser_mw = duplet.n_lambda * dbm_to_mw(launch) / energy_model.laser_wallplug_efficiency
    tuning_mw = 2 * duplet.n_lambda * energy_model.tuning_power_per_mrr
    # mW / (Gb/s) is pJ/bit
    return (laser_mw + tuning_mw) / duplet.aggregate_bw_gbps + energy_model.driver_energy + energy_model.receiver_energy
