import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import (
    A2_D1,
    FROZEN_FGRID_D2,
    FROZEN_STG_D2,
    GAUSS_L4_D2,
    GAUSS_L2_D2,
    gauss_l6_exact,
    truncated_gauss_l4_d2,
    truncated_gauss_l6_d1,
)
from parext.errors import TailCertificationError
from parext.extension import ParaboloidShift, extend
from parext.grids import (
    FrequencyGrid,
    SpacetimeGrid,
    dilate_profile,
    gaussian_profile,
)
from parext.norms import (
    _tail_ingredients,
    _time_tail_mass,
    lq_norm_spacetime,
    quotient_pair,
    quotient_single,
    sharp_holder_gap,
)
from parext.sequences import scaled_spacetime_grid

ZERO1 = ParaboloidShift(0.0, (0.0,))

MED_FGRID = FrequencyGrid(1, 10.0, 512)
MED_STG = SpacetimeGrid(1, 20.0, 30.0, 257, 257)


def test_frozen_grid_sharp_constant(frozen_quotient_d1):
    res, _ = frozen_quotient_d1
    assert res.quotient == pytest.approx(A2_D1, rel=1e-3)
    # agreement with the independently quadratured truncated closed form
    assert res.numerator.value == pytest.approx(
        truncated_gauss_l6_d1(400.0, 220.0), rel=1e-4
    )
    # the certified interval contains the exact full-space norm
    exact = gauss_l6_exact(1.0)
    assert res.numerator.value <= exact <= res.numerator.certified_upper()


def test_certified_containment_variants(exponents_d1):
    cases = [
        dict(width=0.7, center=0.0, phase_velocity=0.0),
        dict(width=1.0, center=1.0, phase_velocity=0.0),
        dict(width=1.4, center=-0.5, phase_velocity=2.0),
    ]
    # lattice period pi*N/L = 322 comfortably exceeds the slice spread 2*T*|xi|
    fgrid = FrequencyGrid(1, 10.0, 1024)
    stg = SpacetimeGrid(1, 30.0, 100.0, 1025, 1025)
    for kw in cases:
        f = gaussian_profile(fgrid, **kw)
        fld = extend(f, ZERO1, stg)
        res = lq_norm_spacetime(fld, f, 6.0)
        exact = gauss_l6_exact(kw["width"])
        assert res.value <= exact <= res.certified_upper(), kw


def test_quotient_dilation_invariance(exponents_d1):
    f = gaussian_profile(MED_FGRID)
    q1 = quotient_single(f, exponents_d1, MED_STG).quotient
    q2 = quotient_single(
        dilate_profile(f, 0.5, 2.0), exponents_d1, scaled_spacetime_grid(MED_STG, 0.5)
    ).quotient
    assert q2 == pytest.approx(q1, rel=1e-10)


def test_quotient_homogeneity(exponents_d1):
    f = gaussian_profile(MED_FGRID)
    q1 = quotient_single(f, exponents_d1, MED_STG).quotient
    q7 = quotient_single(f.scaled(7.0), exponents_d1, MED_STG).quotient
    assert q7 == pytest.approx(q1, rel=1e-10)


def test_pair_reduces_to_single_for_zero_g(exponents_d1):
    f = gaussian_profile(MED_FGRID)
    g = f.scaled(0.0)
    qp = quotient_pair(f, g, ParaboloidShift(0.0, (1.0,)), exponents_d1, MED_STG)
    qs = quotient_single(f, exponents_d1, MED_STG)
    assert qp.quotient == pytest.approx(qs.quotient, rel=1e-12)


def test_pair_triangle_chain(exponents_d1):
    """||Ef + E'g||_q <= ||Ef||_q + ||E'g||_q <= A (||f|| + ||g||)
    on the truncated window (A from the same window)."""
    f = gaussian_profile(MED_FGRID)
    g = gaussian_profile(MED_FGRID, width=0.8, center=0.4)
    shift = ParaboloidShift(0.0, (1.0,))
    qp = quotient_pair(f, g, shift, exponents_d1, MED_STG)
    from parext.grids import lp_norm_frequency
    from parext.norms import _truncated_lq

    ff = extend(f, ZERO1, MED_STG)
    fgd = extend(g, shift, MED_STG)
    nf, ng = _truncated_lq(ff, 6.0), _truncated_lq(fgd, 6.0)
    assert qp.numerator.value <= nf + ng + 1e-12
    a2 = quotient_single(f, exponents_d1, MED_STG).quotient
    a2 = max(a2, quotient_single(g, exponents_d1, MED_STG).quotient)
    assert nf + ng <= a2 * (lp_norm_frequency(f, 2.0) + lp_norm_frequency(g, 2.0)) + 1e-9


def test_time_tail_mass_doubles_when_halved():
    f = gaussian_profile(MED_FGRID)
    ing = _tail_ingredients(f, ZERO1)
    # beta = d (q-2)/2 = 2 for d=1, q=6: tail mass ~ 1/T beyond the crossover
    assert _time_tail_mass(ing, 1, 6.0, 40.0) == pytest.approx(
        2.0 * _time_tail_mass(ing, 1, 6.0, 80.0), rel=1e-12
    )


def test_tail_refusal_at_nonintegrable_exponent():
    f = gaussian_profile(MED_FGRID)
    stg = SpacetimeGrid(1, 10.0, 20.0, 65, 65)
    fld = extend(f, ZERO1, stg)
    with pytest.raises(TailCertificationError):
        lq_norm_spacetime(fld, f, 3.9)  # beta = 0.95 <= 1
    res = lq_norm_spacetime(fld, f, 3.9, allow_uncertified=True)
    assert not res.certified
    assert res.tail_bound == math.inf
    assert res.certified_upper() == math.inf
    with pytest.raises(ValueError):
        lq_norm_spacetime(fld, f, 2.0)


def test_d2_frozen_config(exponents_d2):
    f = gaussian_profile(FROZEN_FGRID_D2)
    res = quotient_single(f, exponents_d2, FROZEN_STG_D2, pad=4)
    assert res.numerator.value == pytest.approx(
        truncated_gauss_l4_d2(10.0, 16.0), rel=1e-4
    )
    assert res.numerator.value <= GAUSS_L4_D2 <= res.numerator.certified_upper()
    assert res.denominator == pytest.approx(GAUSS_L2_D2, rel=1e-10)


# -- sharp two-term Hoelder ---------------------------------------------------

@given(
    a=st.floats(1e-6, 1e6),
    b=st.floats(1e-6, 1e6),
    p=st.floats(1.1, 10.0),
)
@settings(max_examples=200, deadline=None)
def test_sharp_holder_nonnegative(a, b, p):
    assert sharp_holder_gap(a, b, p) >= -1e-12 * (a + b)


def test_sharp_holder_equality_iff_equal():
    assert abs(sharp_holder_gap(3.7, 3.7, 2.0)) < 1e-12
    assert sharp_holder_gap(1.0, 2.0, 2.0) > 1e-3
