import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dkgkit import counterexamples as cx

ZERO = (0, 0, 0, 0, 0, 0)


def test_hh_high_boxes_at_64():
    A, B, C = cx.family_sets("hh-high", 64)
    assert A.center == (64.0, 8.0, 8.0) and A.half_widths == (16.0, 2.0, 2.0)


@pytest.mark.parametrize("f", cx.FAMILIES)
def test_abc_containment_all_scales(f):
    for L in cx.DEFAULT_LS:
        assert cx.abc_property(*cx.family_sets(f, L))


def test_minimal_widenings_recorded():
    assert cx.family_adjustments("unit-scale", 64) == [{"axis": 3, "from": (0.5, 1.5), "to": (-1.0, 1.5)}]
    assert cx.family_adjustments("hh-low-minus", 64) == [{"axis": 3, "from": (-0.5, 0.5), "to": (-0.5, 1.75)}]
    for f in ("hh-high", "hl-high", "hl-high-swapped"):
        assert cx.family_adjustments(f, 256) == []


def test_unit_scale_boxes_fixed_size():
    a = cx.family_sets("unit-scale", 64)
    b = cx.family_sets("unit-scale", 4096)
    for x, y in zip(a, b):
        assert x.half_widths == y.half_widths


def test_errors():
    with pytest.raises(ValueError):
        cx.family_sets("hh-high", 2)
    with pytest.raises(ValueError):
        cx.family_sets("nope", 64)
    with pytest.raises(ValueError):
        cx.fit_delta("hh-high", ZERO, [64, 128])


def test_predicted_deltas():
    assert cx.predicted_delta("hh-high", ZERO) == -0.5
    assert cx.predicted_delta("hl-high", (0, 0, 0.75, 0, 0, 0)) == 0
    assert cx.predicted_delta("hh-low-minus", (0, 0, 0, 0, 0, 1)) == 1
    assert cx.predicted_delta("unit-scale", (0, 1, -1, 0, 0, 0)) == 0


def test_hh_high_doubling_ratio():
    for L in (256, 512, 1024):
        q = cx.ratio("hh-high", ZERO, 2 * L) / cx.ratio("hh-high", ZERO, L)
        assert abs(q / np.sqrt(2) - 1) < 0.10


def test_unit_scale_threshold_is_flat():
    r = [cx.ratio("unit-scale", (0, 0.5, -0.5, 0, 0, 0), L) for L in (64, 512, 4096)]
    assert max(r) / min(r) < 1.10


@pytest.mark.parametrize("f,e,want", [
    ("hh-high", ZERO, -0.5),
    ("hl-high", (0, 0, 0.75, 0, 0, 0), 0.0),
    ("hh-low-minus", (0, 0, 0, 0, 0, 1), 1.0),
])
def test_fit_examples(f, e, want):
    assert abs(cx.fit_delta(f, e) - want) <= 0.05


def test_monte_carlo_cross_check():
    e = (0.5, 0, 0, 0.5, 0, 0)
    q = cx.ratio("hl-high", e, 64)
    mc = cx.ratio_monte_carlo("hl-high", e, 64, n=200_000, seed=1)
    assert abs(mc / q - 1) < 0.05


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(cx.FAMILIES), st.floats(-1, 1), st.sampled_from([64.0, 256.0, 1024.0]))
def test_a3_shift_is_exact_with_representative_weights(f, da3, L):
    e0 = (0.1, 0.2, 0.0, 0.3, 0.1, 0.2)
    e1 = (0.1, 0.2, da3, 0.3, 0.1, 0.2)
    r0 = cx.ratio(f, e0, L, weights="representative", resolution=(8, 4, 2))
    r1 = cx.ratio(f, e1, L, weights="representative", resolution=(8, 4, 2))
    A, B, C = cx.family_sets(f, L)
    xi = np.linalg.norm(C.center)
    assert r1 / r0 == pytest.approx((1 + xi ** 2) ** (-da3 / 2), rel=1e-9)


def test_scan_csv_columns():
    rows = cx.scan_rows(("hh-high",), {"hh-high": [ZERO]}, [64, 128, 256])
    text = cx.scan_csv(rows)
    assert text.splitlines()[0].split(",")[-3:] == ["ratio", "fitted_delta", "predicted_delta"]
    assert len(text.splitlines()) == 4
