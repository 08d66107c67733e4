"""Parameter validation and partition geometry.

Frozen oracle values below were computed by hand from the closed forms:
with q=1/2, b=3/8 every constant is an exact binary fraction (r=1/8,
m1=4/3, s=1/3), which pins the formulas without trusting the code.
"""

import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from repeller.errors import DepthExceeded, IndexOutOfRange, InvalidParam, OutOfDomain
from repeller.params import (
    ConstructionParams,
    Partition,
    Variant,
    default_full_p_rule,
    params_from_json,
    params_to_json,
    validate,
)

from .strategies import full_param_sets, physical_param_sets


# -- derived constants ---------------------------------------------------


def test_full_derived_constants_binary_exact(full_params):
    c = validate(full_params)
    assert c.r == 0.125
    assert c.m1 == 4.0 / 3.0
    assert abs(c.s - 1.0 / 3.0) < 1e-15
    assert c.a_eff == 0.7
    assert abs(c.mn_base - 0.7 / 0.3) < 1e-15


def test_full_s_matches_slope_matching_relation(full_params):
    # s is defined so that the upper piece of the left branch meets the
    # affine piece with equal one-sided slopes: (1-q)*s/(q-b) == q/b
    c = validate(full_params)
    q, b = full_params.q, full_params.b
    lhs = (1.0 - q) * c.s / (q - b)
    assert abs(lhs - q / b) < 1e-15


def test_physical_derived_constants(phys_params):
    c = validate(phys_params)
    assert abs(c.r - 0.15) < 1e-15
    assert abs(c.m1 - 4.0 / 3.0) < 1e-15
    assert c.s is None
    # a_eff**(1/alpha) must recover b/q
    assert abs(c.a_eff ** 4 - 0.75) < 1e-14
    assert abs(c.a_eff - 0.9306048590) < 5e-10
    assert c.a_eff > 0.5
    assert c.mn_base > 1.0


def test_full_rejects_b_below_q_squared():
    p = ConstructionParams(variant=Variant.FULL, q=0.5, b=0.2, a=0.7)
    with pytest.raises(InvalidParam, match="b"):
        validate(p)


def test_full_rejects_a_out_of_range():
    for bad_a in (0.5, 0.3, 1.0, 1.5):
        p = ConstructionParams(variant=Variant.FULL, q=0.5, b=0.375, a=bad_a)
        with pytest.raises(InvalidParam, match="a"):
            validate(p)


def test_full_rejects_physical_knobs():
    p = ConstructionParams(variant=Variant.FULL, q=0.5, b=0.375, a=0.7, alpha=0.2)
    with pytest.raises(InvalidParam):
        validate(p)


def test_physical_rejects_missing_knobs():
    p = ConstructionParams(variant=Variant.PHYSICAL, q=0.4, b=0.3, alpha=0.25)
    with pytest.raises(InvalidParam):
        validate(p)


def test_physical_rejects_q_above_half():
    p = ConstructionParams(variant=Variant.PHYSICAL, q=0.6, b=0.3,
                           alpha=0.25, beta=0.2, epsilon=0.04)
    with pytest.raises(InvalidParam, match="q"):
        validate(p)


def test_physical_rejects_exponent_budget():
    p = ConstructionParams(variant=Variant.PHYSICAL, q=0.4, b=0.3,
                           alpha=0.3, beta=0.25, epsilon=0.04)
    with pytest.raises(InvalidParam, match="beta"):
        validate(p)


def test_physical_epsilon_failure_reports_margin():
    p = ConstructionParams(variant=Variant.PHYSICAL, q=0.4, b=0.3,
                           alpha=0.25, beta=0.2, epsilon=0.2)
    with pytest.raises(InvalidParam, match="margin"):
        validate(p)


def test_physical_small_contraction_rejected():
    # alpha large enough that (b/q)**alpha drops to 1/2 or below
    p = ConstructionParams(variant=Variant.PHYSICAL, q=0.4, b=0.05,
                           alpha=0.4, beta=0.05, epsilon=0.001)
    with pytest.raises(InvalidParam, match="alpha"):
        validate(p)


def test_full_p_rule_validation():
    base = dict(variant=Variant.FULL, q=0.5, b=0.375, a=0.7)
    with pytest.raises(InvalidParam, match="p_seq_spec"):
        validate(ConstructionParams(**base, p_seq_spec=lambda n: 0.9))  # constant
    with pytest.raises(InvalidParam, match="p_seq_spec"):
        validate(ConstructionParams(**base, p_seq_spec=lambda n: 1.0 - 0.1 / n if n < 10 else 0.5))
    with pytest.raises(InvalidParam, match="p_seq_spec"):
        validate(ConstructionParams(**base, p_seq_spec=lambda n: min(1.0, 0.5 + n * 0.1)))
    # a legitimate custom rule passes
    validate(ConstructionParams(**base, p_seq_spec=lambda n: 1.0 - 0.95 * 2.0 ** (2 - n)))


# -- scalar sequences ------------------------------------------------------


def test_p_ratio_full_default_rule(full_partition):
    assert full_partition.p_ratio(2) == 0.75
    assert full_partition.p_ratio(3) == 0.875
    assert default_full_p_rule(10) == 1.0 - 2.0 ** -10
    # beyond n=53 the tail drops below one ulp and the float value saturates;
    # validation accepts this because the sequence converged first
    assert full_partition.p_ratio(60) == 1.0


def test_p_ratio_physical_frozen_and_geometric(phys_partition):
    p2 = phys_partition.p_ratio(2)
    assert abs(p2 - 0.9286959) < 1e-6
    # the tails 1 - p_n form an exact geometric sequence with ratio (b/q)**beta
    t2, t3, t4 = (1.0 - phys_partition.p_ratio(n) for n in (2, 3, 4))
    assert abs(t2 * t4 - t3 * t3) < 2e-17  # a few ulps of t3**2
    assert abs(t3 / t2 - 0.75 ** 0.2) < 1e-15


def test_p_ratio_rejects_n_below_two(full_partition):
    with pytest.raises(IndexOutOfRange):
        full_partition.p_ratio(1)


def test_slope_m_first_branch(full_partition, phys_partition):
    assert full_partition.slope_m(1) == 4.0 / 3.0
    assert abs(phys_partition.slope_m(1) - 4.0 / 3.0) < 1e-15


def test_slope_m_matches_endpoint_arithmetic(full_partition, phys_partition):
    # the affine piece of branch n maps an interval of width len_left onto
    # the offset range [0, off_left], so its slope is off_left / len_left
    for part in (full_partition, phys_partition):
        for n in range(2, 51):
            cell = part.cell_K(n)
            expect = cell.off_left / cell.len_left
            got = part.slope_m(n)
            assert abs(got - expect) <= 1e-12 * expect, (part.params.variant, n)


def test_slope_m_exceeds_one_and_decays_to_base(full_partition, phys_partition):
    for part in (full_partition, phys_partition):
        base = part.consts.mn_base
        prev = math.inf
        for n in range(2, 120):
            m = part.slope_m(n)
            # equality with the base slope is reached once 1 - p_n underflows
            assert m >= base > 1.0
            assert m <= prev + 1e-15
            prev = m
        assert abs(part.slope_m(119) - base) < 1e-3 * base


# -- cell geometry ---------------------------------------------------------


def test_cell_K_frozen_endpoints(full_partition):
    k1 = full_partition.cell_K(1)
    assert (k1.k_left, k1.k_right) == (0.625, 1.0)
    assert k1.width == 0.375
    k2 = full_partition.cell_K(2)
    assert (k2.k_left, k2.k_right) == (0.5875, 0.625)
    assert k2.z_n == 0.625
    assert abs(k2.width - 0.0375) < 1e-17


def test_cell_sub_split_partitions_width(full_partition, phys_partition):
    for part in (full_partition, phys_partition):
        for n in range(2, 60):
            c = part.cell_K(n)
            assert abs((c.len_left + c.len_mid + c.len_right) - c.width) <= 1e-15 * c.width
            assert abs(c.len_left / c.width - c.p_n) <= 1e-14
            if part.params.variant is Variant.PHYSICAL:
                assert c.len_mid == c.len_right


def test_cells_abut_bitwise(full_partition, phys_partition):
    for part in (full_partition, phys_partition):
        for n in range(1, 401):
            assert part.cell_K(n + 1).k_right == part.cell_K(n).k_left


def test_cell_widths_telescope_to_return_interval(full_partition, phys_partition):
    for part in (full_partition, phys_partition):
        q = part.params.q
        for top in (5, 40, 200):
            widths = [part.cell_K(n).width for n in range(1, top + 1)]
            total = math.fsum(widths) + part.off(top - 1)
            assert abs(total - (1.0 - q)) < 5e-16


def test_cell_width_closed_form(full_partition):
    r, a = full_partition.consts.r, full_partition.consts.a_eff
    for n in range(2, 41):
        direct = full_partition.cell_K(n).width
        closed = r * (a ** -2 - a ** -1) * a ** n
        assert abs(direct - closed) <= 1e-14 * closed


def test_cell_J_frozen_endpoints(full_partition):
    assert full_partition.cell_J(1) == (0.5, 1.0)
    assert full_partition.cell_J(2) == (0.375, 0.5)
    assert full_partition.cell_J(3) == (0.28125, 0.375)


def test_cell_J_contracts_by_exact_ratio(full_partition, phys_partition):
    for part in (full_partition, phys_partition):
        q, b = part.params.q, part.params.b
        for n in range(2, 40):
            lo, hi = part.cell_J(n)
            lo2, hi2 = part.cell_J(n + 1)
            assert abs(hi2 - lo) <= 2e-15 * lo  # successive intervals abut
            assert abs(lo2 / lo - b / q) <= 2e-15
        # widths shrink strictly
        w = [part.cell_J(n)[1] - part.cell_J(n)[0] for n in range(2, 20)]
        assert all(w[i + 1] < w[i] for i in range(len(w) - 1))


def test_cell_J_bitwise_abutment_while_exact(full_partition):
    # with q=1/2, b=3/8 the powers of 3/4 are exact binary fractions up to
    # 3**33, so the abutment holds bit for bit in that range
    for n in range(2, 30):
        assert full_partition.cell_J(n + 1)[1] == full_partition.cell_J(n)[0]


def test_index_bounds(full_partition):
    with pytest.raises(IndexOutOfRange):
        full_partition.cell_K(0)
    with pytest.raises(IndexOutOfRange):
        full_partition.cell_J(0)
    with pytest.raises(IndexOutOfRange):
        full_partition.slope_m(0)


# -- point location ----------------------------------------------------------


def test_locate_I2_frozen(full_partition):
    assert full_partition.locate_I2(1.0) == (1, 0.375)
    n, off = full_partition.locate_I2(0.6)
    assert n == 2
    assert abs(off - (0.1 - 0.0875)) < 1e-16


def test_locate_I2_boundary_conventions(full_partition, phys_partition):
    # cells are half open on the left: a shared endpoint belongs to the
    # shallower cell (the one on its right... i.e. with the smaller index)
    for part in (full_partition, phys_partition):
        for n in range(2, 40):
            c = part.cell_K(n)
            assert part.locate_I2(c.k_right)[0] == n
            assert part.locate_I2(c.k_left)[0] == n + 1


def test_locate_I2_roundtrip_midpoints(full_partition, phys_partition):
    for part in (full_partition, phys_partition):
        for n in range(1, 61):
            c = part.cell_K(n)
            x = 0.5 * (c.k_left + c.k_right)
            got_n, off = part.locate_I2(x)
            assert got_n == n
            assert abs((part.params.q + c.off_left + off) - x) < 1e-15 if n > 1 else True


def test_locate_I2_rejects_outside(full_partition):
    for bad in (0.5, 0.3, 0.0, 1.0 + 1e-9):
        with pytest.raises(OutOfDomain):
            full_partition.locate_I2(bad)


def test_locate_offset_depth_cap(full_partition):
    with pytest.raises(DepthExceeded):
        full_partition.locate_offset(1e-315)


def test_locate_log_matches_locate_offset(full_partition, phys_partition):
    for part in (full_partition, phys_partition):
        for n in (2, 3, 7, 19, 40):
            c = part.cell_K(n)
            t = c.off_left + 0.37 * c.width
            got_n, lam = part.locate_log(math.log(t))
            assert got_n == n
            assert abs(lam - 0.37) < 1e-9
            # and the inverse translation recovers the offset
            assert abs(part.lam_to_offset(got_n, lam) - t) <= 1e-12 * t


def test_locate_log_reaches_depths_plain_floats_cannot(full_partition):
    ln_a = math.log(full_partition.consts.a_eff)
    ln_r = math.log(full_partition.consts.r)
    n, lam = full_partition.locate_log(ln_r + 2500.5 * ln_a)
    assert n == 2502
    a = full_partition.consts.a_eff
    assert abs(lam - (a ** 0.5 - a) / (1.0 - a)) < 1e-12


def test_locate_log_cell_one(full_partition):
    n, lam = full_partition.locate_log(math.log(0.3))
    assert n == 1
    assert abs(lam - (0.3 - 0.125) / 0.375) < 1e-15


# -- property-based checks -----------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(full_param_sets())
def test_property_full_partition_invariants(params):
    part = Partition.from_params(params)
    c = part.consts
    assert c.r > 0.0 and 0.0 < c.s < 1.0 and c.m1 > 1.0 and c.mn_base > 1.0
    widths = [part.cell_K(n).width for n in range(1, 31)]
    total = math.fsum(widths) + part.off(29)
    assert abs(total - (1.0 - params.q)) < 1e-14
    for n in range(1, 30):
        assert part.cell_K(n + 1).k_right == part.cell_K(n).k_left
        assert part.slope_m(max(n, 1)) > 1.0


@settings(max_examples=60, deadline=None)
@given(physical_param_sets())
def test_property_physical_partition_invariants(params):
    part = Partition.from_params(params)
    c = part.consts
    assert c.a_eff > 0.5 and c.mn_base > 1.0
    prev_p = 0.0
    for n in range(2, 40):
        p_n = part.p_ratio(n)
        assert 0.0 < p_n < 1.0
        assert p_n >= prev_p
        prev_p = p_n
        cell = part.cell_K(n)
        assert cell.len_mid == cell.len_right
        assert cell.len_left > 0.0
    for n in range(1, 35):
        assert part.cell_K(n + 1).k_right == part.cell_K(n).k_left


@settings(max_examples=60, deadline=None)
@given(full_param_sets(), st.floats(1e-12, 1.0 - 1e-12))
def test_property_locate_is_inverse_of_geometry(params, rel):
    part = Partition.from_params(params)
    for n in (1, 2, 5, 17):
        c = part.cell_K(n)
        x = c.k_left + rel * (c.k_right - c.k_left)
        assume(c.k_left < x <= c.k_right)
        got_n, _ = part.locate_I2(x)
        assert got_n == n


# -- JSON schema -----------------------------------------------------------------


def test_json_roundtrip_full():
    doc = {"variant": "full", "q": 0.5, "b": 0.375, "a": 0.7}
    p = params_from_json(doc)
    assert p.variant is Variant.FULL and p.a == 0.7 and p.n_max == 400
    out = params_to_json(p)
    assert out["variant"] == "full" and out["a"] == 0.7
    assert params_to_json(params_from_json(out)) == out


def test_json_roundtrip_physical():
    doc = {"variant": "physical", "q": 0.4, "b": 0.3,
           "alpha": 0.25, "beta": 0.2, "epsilon": 0.04, "n_max": 100}
    p = params_from_json(doc)
    assert p.variant is Variant.PHYSICAL and p.n_max == 100
    out = params_to_json(p)
    assert out["n_max"] == 100 and "a" not in out


def test_json_rejects_unknown_key():
    with pytest.raises(InvalidParam, match="extra"):
        params_from_json({"variant": "full", "q": 0.5, "b": 0.375, "a": 0.7, "extra": 1})


def test_json_rejects_bad_variant_and_missing_fields():
    with pytest.raises(InvalidParam, match="variant"):
        params_from_json({"q": 0.5, "b": 0.375})
    with pytest.raises(InvalidParam, match="variant"):
        params_from_json({"variant": "fullish", "q": 0.5, "b": 0.375})
    with pytest.raises(InvalidParam, match="q"):
        params_from_json({"variant": "full", "b": 0.375, "a": 0.7})


def test_json_rejects_wrong_types():
    with pytest.raises(InvalidParam, match="q"):
        params_from_json({"variant": "full", "q": True, "b": 0.375, "a": 0.7})
    with pytest.raises(InvalidParam, match="n_max"):
        params_from_json({"variant": "full", "q": 0.5, "b": 0.375, "a": 0.7, "n_max": 10.5})
    with pytest.raises(InvalidParam, match="b"):
        params_from_json({"variant": "full", "q": 0.5, "b": "0.375", "a": 0.7})


def test_json_cross_variant_keys_rejected_by_validate():
    p = params_from_json({"variant": "physical", "q": 0.4, "b": 0.3, "a": 0.7,
                          "alpha": 0.25, "beta": 0.2, "epsilon": 0.04})
    with pytest.raises(InvalidParam, match="a"):
        validate(p)
