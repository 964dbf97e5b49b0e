"""Optical power budget, insertion loss and MRR-array power penalties of one link."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .platforms import FabricationPlatform, LinkVariant

SPEED_OF_LIGHT = 299_792_458.0  # m/s
MAX_LENGTH_CM = 50.0
TRUNCATION_SAMPLES = 2048
TRUNCATION_SPAN = 3.0  # integrate the OOK spectrum over +-3 bit-rates

_DB = 10.0 / math.log(10.0)


@dataclass(frozen=True)
class LinkGeometry:
    """Waveguide length in cm and the number of grating couplers on the path."""

    length: float
    coupler_count: int = 1

    def __post_init__(self) -> None:
        if not 0.0 < self.length <= MAX_LENGTH_CM:
            raise ValueError(f"waveguide length must be in (0, {MAX_LENGTH_CM:g}] cm, got {self.length}")
        if self.coupler_count < 0 or int(self.coupler_count) != self.coupler_count:
            raise ValueError(f"coupler_count must be a non-negative integer, got {self.coupler_count}")


@dataclass(frozen=True)
class LossBreakdown:
    coupling: float
    propagation: float
    modulator_il: float
    filter_il: float
    total: float


@dataclass(frozen=True)
class PenaltyBreakdown:
    modulator_array: float
    filter_array: float
    total: float
    # filter_array split into its two contributions
    filter_crosstalk: float = 0.0
    filter_truncation: float = 0.0


@dataclass(frozen=True)
class BudgetEvaluation:
    n_lambda: int
    br_gbps: float
    opb_per_wavelength: float
    opb_per_waveguide: Optional[float]  # None when unbounded
    loss: LossBreakdown
    penalty: PenaltyBreakdown
    p_loss_total: float
    per_wavelength_ok: bool
    per_waveguide_ok: bool
    opb_margin: float

    @property
    def feasible(self) -> bool:
        return self.per_wavelength_ok and self.per_waveguide_ok and self.opb_margin >= 0.0


def opb_per_wavelength(maop_wl: float, sensitivity: float) -> float:
    return maop_wl - sensitivity


def opb_per_waveguide(maop_wg: Optional[float], sensitivity: float) -> Optional[float]:
    if maop_wg is None:
        return None
    return maop_wg - sensitivity


def insertion_loss(variant: LinkVariant, geom: LinkGeometry) -> LossBreakdown:
    eff = variant.effective
    coupling = eff.coupling_loss * geom.coupler_count
    propagation = eff.propagation_loss * geom.length
    return LossBreakdown(
        coupling=coupling,
        propagation=propagation,
        modulator_il=eff.modulator_il,
        filter_il=eff.filter_il,
        total=coupling + propagation + eff.modulator_il + eff.filter_il,
    )


def channel_spacing(fsr_nm: float, n_lambda: int) -> float:
    _check_n(n_lambda)
    if not fsr_nm > 0:
        raise ValueError("FSR must be positive")
    return fsr_nm / n_lambda


def lorentzian_drop(detuning_nm, q: float, wavelength_nm: float):
    """Power fraction an add-drop ring passes to its drop port at a given detuning.

    Accepts scalars or arrays of detuning.
    """
    if not q > 0 or not wavelength_nm > 0:
        raise ValueError("Q and wavelength must be positive")
    x = 2.0 * q * np.asarray(detuning_nm, dtype=float) / wavelength_nm
    out = 1.0 / (1.0 + x * x)
    return float(out) if out.ndim == 0 else out


def victim_offsets(n_lambda: int) -> np.ndarray:
    """Channel-index offsets of every other channel seen from the center channel."""
    _check_n(n_lambda)
    center = (n_lambda - 1) // 2
    k = np.arange(n_lambda) - center
    return k[k != 0]


def modulator_array_penalty(variant: LinkVariant, n_lambda: int, br_gbps: float) -> float:
    """Tx-side penalty: the victim passes the through ports of every other modulator ring.

    ``br_gbps`` does not enter the first-order model; it is accepted so all
    penalty terms share one call signature.
    """
    _check_n(n_lambda)
    if n_lambda == 1:
        return 0.0
    eff = variant.effective
    detuning = victim_offsets(n_lambda) * channel_spacing(eff.fsr, n_lambda)
    clipped = lorentzian_drop(detuning, eff.q_modulator, eff.operating_wavelength)
    assert np.all(clipped < 1.0), "neighbor ring on resonance with the victim"
    return float(-_DB * np.sum(np.log1p(-clipped)))


def filter_linewidth_hz(q: float, wavelength_nm: float) -> float:
    """Full width at half maximum of a ring resonance, in Hz."""
    lam = wavelength_nm * 1e-9
    return SPEED_OF_LIGHT / (lam * lam) * (lam / q)


def truncation_fraction(q: float, wavelength_nm: float, br_gbps: float, samples: int = TRUNCATION_SAMPLES) -> float:
    """Fraction of an OOK signal's power that survives a Lorentzian drop filter."""
    return _truncation_fraction(float(q), float(wavelength_nm), float(br_gbps), int(samples))


@lru_cache(maxsize=1024)
def _truncation_fraction(q: float, wavelength_nm: float, br_gbps: float, samples: int) -> float:
    br_hz = br_gbps * 1e9
    f = np.linspace(-TRUNCATION_SPAN * br_hz, TRUNCATION_SPAN * br_hz, samples)
    spectrum = np.sinc(f / br_hz) ** 2
    half_width = filter_linewidth_hz(q, wavelength_nm) / 2.0
    filt = 1.0 / (1.0 + (f / half_width) ** 2)
    return float(np.trapezoid(spectrum * filt, f) / np.trapezoid(spectrum, f))


def truncation_penalty(q: float, wavelength_nm: float, br_gbps: float, samples: int = TRUNCATION_SAMPLES) -> float:
    return -10.0 * math.log10(truncation_fraction(q, wavelength_nm, br_gbps, samples))


def filter_array_components(variant: LinkVariant, n_lambda: int, br_gbps: float) -> tuple[float, float]:
    """Return (crosstalk, truncation) penalties in dB for the center Rx channel."""
    _check_n(n_lambda)
    eff = variant.effective
    _check_br(eff, br_gbps)
    signal = truncation_fraction(eff.q_filter, eff.operating_wavelength, br_gbps)
    truncation = -10.0 * math.log10(signal)
    if n_lambda == 1:
        return 0.0, truncation
    detuning = victim_offsets(n_lambda) * channel_spacing(eff.fsr, n_lambda)
    leaked = float(np.sum(lorentzian_drop(detuning, eff.q_filter, eff.operating_wavelength)))
    crosstalk = 10.0 * math.log10((signal + leaked) / signal)
    return crosstalk, truncation


def filter_array_penalty(variant: LinkVariant, n_lambda: int, br_gbps: float) -> float:
    crosstalk, truncation = filter_array_components(variant, n_lambda, br_gbps)
    return crosstalk + truncation


def power_penalty(variant: LinkVariant, n_lambda: int, br_gbps: float) -> PenaltyBreakdown:
    mod = modulator_array_penalty(variant, n_lambda, br_gbps)
    crosstalk, truncation = filter_array_components(variant, n_lambda, br_gbps)
    filt = crosstalk + truncation
    return PenaltyBreakdown(
        modulator_array=mod,
        filter_array=filt,
        total=mod + filt,
        filter_crosstalk=crosstalk,
        filter_truncation=truncation,
    )


def evaluate_budget(variant: LinkVariant, geom: LinkGeometry, n_lambda: int, br_gbps: float) -> BudgetEvaluation:
    eff = variant.effective
    loss = insertion_loss(variant, geom)
    penalty = power_penalty(variant, n_lambda, br_gbps)
    p_loss = loss.total + penalty.total
    opb_wl = opb_per_wavelength(eff.maop_per_wavelength, eff.receiver_sensitivity)
    opb_wg = opb_per_waveguide(eff.maop_per_waveguide, eff.receiver_sensitivity)
    wl_ok = opb_wl >= p_loss
    if opb_wg is None:
        margin = opb_wl - p_loss
        wg_ok = True
    else:
        margin = opb_wg - p_loss - 10.0 * math.log10(n_lambda)
        wg_ok = margin >= 0.0
    return BudgetEvaluation(
        n_lambda=n_lambda,
        br_gbps=br_gbps,
        opb_per_wavelength=opb_wl,
        opb_per_waveguide=opb_wg,
        loss=loss,
        penalty=penalty,
        p_loss_total=p_loss,
        per_wavelength_ok=wl_ok,
        per_waveguide_ok=wg_ok,
        opb_margin=margin,
    )


def _check_n(n_lambda: int) -> None:
    if isinstance(n_lambda, bool) or int(n_lambda) != n_lambda or n_lambda < 1:
        raise ValueError(f"n_lambda must be an integer >= 1, got {n_lambda}")


def _check_br(platform: FabricationPlatform, br_gbps: float) -> None:
    if not 0.0 < br_gbps <= platform.bitrate_max:
        raise ValueError(f"bit-rate must be in (0, {platform.bitrate_max:g}] Gb/s, got {br_gbps}")
