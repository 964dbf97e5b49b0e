import math

import numpy as np
import pytest
from scipy.integrate import quad

from siphlink.budget import (
    LinkGeometry,
    channel_spacing,
    evaluate_budget,
    filter_array_components,
    filter_array_penalty,
    filter_linewidth_hz,
    insertion_loss,
    lorentzian_drop,
    modulator_array_penalty,
    opb_per_waveguide,
    opb_per_wavelength,
    truncation_penalty,
    victim_offsets,
)
from siphlink.platforms import PathwaySet, apply_pathways


def ring_loop_modulator_penalty(fsr, n, q, lam):
    """Independent oracle: explicit loop over every ring seen by the center channel."""
    center = (n - 1) // 2
    spacing = fsr / n
    through = 1.0
    for j in range(n):
        if j != center:
            x = 2 * q * (j - center) * spacing / lam
            through *= 1 - 1 / (1 + x * x)
    return -10 * math.log10(through)


def quad_truncation_fraction(q, lam, br):
    """Independent oracle: adaptive quadrature of the filtered OOK spectrum."""
    b = br * 1e9
    width = 299792458.0 / (lam * 1e-9 * q)

    def sinc2(f):
        return 1.0 if f == 0 else (math.sin(math.pi * f / b) / (math.pi * f / b)) ** 2

    knots = [k * b for k in (-2, -1, 0, 1, 2)]
    num = quad(lambda f: sinc2(f) / (1 + (2 * f / width) ** 2), -3 * b, 3 * b, points=knots, limit=500)[0]
    den = quad(sinc2, -3 * b, 3 * b, points=knots, limit=500)[0]
    return num / den


def test_opb_per_wavelength():
    assert opb_per_wavelength(2.3, -17.645) == pytest.approx(19.945, abs=1e-9)
    assert opb_per_wavelength(4.0, -11.79) == pytest.approx(15.79, abs=1e-9)
    assert opb_per_wavelength(-3.0, -3.0) == 0.0


def test_opb_per_waveguide():
    assert opb_per_waveguide(20, -17.645) == pytest.approx(37.645, abs=1e-9)
    assert opb_per_waveguide(20, -20.414) == pytest.approx(40.414, abs=1e-9)
    assert opb_per_waveguide(None, -17.645) is None


def test_insertion_loss_hand_sums(variant):
    loss = insertion_loss(variant("45nm-soi"), LinkGeometry(1))
    assert loss.total == pytest.approx(1.5 + 3.7 + 4.7 + 0.18, abs=1e-12)
    loss = insertion_loss(variant("45nm-soi", "ml"), LinkGeometry(10))
    assert loss.total == pytest.approx(15.88, abs=1e-12)
    assert (loss.coupling, loss.propagation) == (1.0, 10.0)
    assert insertion_loss(variant("32nm-soi"), LinkGeometry(1e-9)).propagation < 1e-7
    assert insertion_loss(variant("32nm-soi"), LinkGeometry(2, coupler_count=2)).coupling == 9.8


def test_link_geometry_validation():
    for bad in (0, -1, 50.5):
        with pytest.raises(ValueError):
            LinkGeometry(bad)
    with pytest.raises(ValueError):
        LinkGeometry(1, coupler_count=-1)


def test_channel_spacing():
    assert channel_spacing(12.6, 42) == pytest.approx(0.3)
    assert channel_spacing(80, 409) == pytest.approx(0.19560, abs=1e-5)
    assert channel_spacing(8.54, 1) == 8.54
    with pytest.raises(ValueError):
        channel_spacing(12.6, 0)


def test_lorentzian_drop_points():
    assert lorentzian_drop(0.0, 7000, 1550) == 1.0
    assert lorentzian_drop(1550 / (2 * 7000), 7000, 1550) == pytest.approx(0.5)
    # 1 / (1 + (2*8500*0.3/1290)**2) evaluated by hand
    assert lorentzian_drop(0.3, 8500, 1290) == pytest.approx(0.060132, abs=1e-4)
    arr = lorentzian_drop(np.array([-0.3, 0.3]), 8500, 1290)
    assert arr[0] == arr[1]


def test_victim_offsets_center_channel():
    assert list(victim_offsets(1)) == []
    assert list(victim_offsets(2)) == [1]
    assert list(victim_offsets(5)) == [-2, -1, 1, 2]
    assert list(victim_offsets(6)) == [-2, -1, 1, 2, 3]


def test_modulator_penalty(variant):
    v = variant("45nm-soi")
    assert modulator_array_penalty(v, 1, 12) == 0.0
    got = modulator_array_penalty(v, 42, 12)
    assert got == pytest.approx(ring_loop_modulator_penalty(12.6, 42, 10000, 1290), rel=1e-12)
    # frozen from the ring-loop oracle above
    assert got == pytest.approx(0.631561074, abs=1e-8)
    for n in (2, 7, 100):
        wide = variant("poly-si", "wf")
        assert modulator_array_penalty(wide, n, 11) == pytest.approx(
            ring_loop_modulator_penalty(80, n, 5000, 1300), rel=1e-12
        )


def test_modulator_penalty_vanishes_for_sharp_rings(platforms):
    from dataclasses import replace

    base = platforms["45nm-soi"]
    values = [
        modulator_array_penalty(apply_pathways(replace(base, q_modulator=q), PathwaySet()), 20, 12)
        for q in (1e4, 1e6, 1e8)
    ]
    assert values[0] > values[1] > values[2]
    assert values[2] < 1e-6


@pytest.mark.parametrize(
    "q, lam, br",
    [(8500, 1290, 12), (6500, 1310, 12), (5000, 1300, 11), (6500, 1310, 12.5)],
)
def test_truncation_against_quadrature(q, lam, br):
    oracle = -10 * math.log10(quad_truncation_fraction(q, lam, br))
    assert truncation_penalty(q, lam, br) == pytest.approx(oracle, abs=0.01)
    assert truncation_penalty(q, lam, br, samples=100_000) == pytest.approx(oracle, abs=1e-4)


def test_truncation_golden_45nm():
    # adaptive-quadrature value, frozen
    assert truncation_penalty(8500, 1290, 12) == pytest.approx(0.51195, abs=1e-4)


def test_truncation_grows_with_q():
    values = [truncation_penalty(q, 1290, 12) for q in (5000, 10000, 20000)]
    assert 0 < values[0] < values[1] < values[2]


def test_linewidth():
    # c / (lambda * Q) for 1290 nm, Q = 8500
    assert filter_linewidth_hz(8500, 1290) == pytest.approx(27.34e9, rel=1e-3)


def test_filter_penalty(variant):
    v = variant("45nm-soi")
    xt, tr = filter_array_components(v, 1, 12)
    assert xt == 0.0 and tr == pytest.approx(truncation_penalty(8500, 1290, 12))
    xt42, _ = filter_array_components(v, 42, 12)
    # leak sum over the 41 other filters, computed in test_budget oracle style
    center, spacing = 20, 12.6 / 42
    leak = sum(1 / (1 + (2 * 8500 * (j - center) * spacing / 1290) ** 2) for j in range(42) if j != center)
    signal = 10 ** (-tr / 10)
    assert xt42 == pytest.approx(10 * math.log10((signal + leak) / signal), rel=1e-10)
    assert xt42 == pytest.approx(0.8656, abs=1e-3)
    assert filter_array_penalty(v, 42, 12) == pytest.approx(xt42 + tr)
    with pytest.raises(ValueError):
        filter_array_penalty(v, 4, 13)
    with pytest.raises(ValueError):
        filter_array_penalty(v, 4, 0)


def test_evaluate_budget_composition(variant):
    v = variant("45nm-soi")
    ev = evaluate_budget(v, LinkGeometry(1), 42, 12)
    assert ev.p_loss_total == pytest.approx(ev.loss.total + ev.penalty.total, abs=1e-12)
    assert ev.penalty.total == pytest.approx(ev.penalty.modulator_array + ev.penalty.filter_array, abs=1e-12)
    assert ev.per_wavelength_ok and ev.per_waveguide_ok
    assert ev.opb_margin == pytest.approx(37.645 - ev.p_loss_total - 10 * math.log10(42))


def test_single_channel_reduces_eq5_to_eq4(variant):
    for name in ("45nm-soi", "32nm-soi", "poly-si"):
        for length in (1, 2, 3, 4):
            ev = evaluate_budget(variant(name), LinkGeometry(length), 1, 11)
            assert ev.opb_margin == pytest.approx(ev.opb_per_waveguide - ev.p_loss_total)


def test_32nm_vanilla_cannot_close_at_10cm(variant):
    v = variant("32nm-soi")
    assert insertion_loss(v, LinkGeometry(10)).total == pytest.approx(107.84)
    for n in (1, 10, 40):
        assert not evaluate_budget(v, LinkGeometry(10), n, 12).per_wavelength_ok


def test_45nm_vanilla_length_cutoff(variant):
    v = variant("45nm-soi")
    assert evaluate_budget(v, LinkGeometry(3), 42, 12).feasible
    # losses alone (6.38 + 3.7 * 4 = 21.18 dB) exceed the 19.945 dB budget at 4 cm
    assert not evaluate_budget(v, LinkGeometry(4), 42, 12).feasible
    assert not evaluate_budget(v, LinkGeometry(4), 1, 12).feasible


def test_unbounded_variant_skips_eq5(variant):
    v = variant("45nm-soi", "im")
    ev = evaluate_budget(v, LinkGeometry(1), 30, 12)
    assert ev.opb_per_waveguide is None and ev.per_waveguide_ok
    assert ev.opb_margin == pytest.approx(ev.opb_per_wavelength - ev.p_loss_total)


def test_linear_chain_reproduces_db_total(variant):
    ev = evaluate_budget(variant("poly-si", "ml,wf"), LinkGeometry(3.5), 64, 11)
    parts = [
        ev.loss.coupling,
        ev.loss.propagation,
        ev.loss.modulator_il,
        ev.loss.filter_il,
        ev.penalty.modulator_array,
        ev.penalty.filter_crosstalk,
        ev.penalty.filter_truncation,
    ]
    transmission = math.prod(10 ** (-p / 10) for p in parts)
    assert -10 * math.log10(transmission) == pytest.approx(ev.p_loss_total, abs=1e-9)
