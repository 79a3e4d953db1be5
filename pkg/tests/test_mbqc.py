from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from atg.codes import fixture
from atg.mbqc import (ErrorLayers, FoliatedRecord, foliate_naive, foliate_outcomes, foliated_from_errors,
                      foliation_graph, mbqc_check, recurrence_failures, repeated_from_errors, sample_error_layers,
                      simulate_repeated, single_error_locations, tableau_round_trip, verify_recurrence)
from atg.noise import NoiseConfig, make_rng

CODE = fixture("422")


def _zero(code, T) -> ErrorLayers:
    return ErrorLayers((0,) * (2 * T - 1), (0,) * T, (0,) * T)


def test_noiseless_records_are_zero():
    rec = simulate_repeated(CODE, 3, NoiseConfig(0.0, 1))
    assert rec.s_z == (0, 0, 0) and rec.s_x == (0, 0, 0)
    fr = foliated_from_errors(_zero(CODE, 3))
    assert foliate_outcomes(fr, CODE) == ((0,) * 3, (0,) * 3)
    assert verify_recurrence(fr, _zero(CODE, 3), CODE)


def test_data_error_propagates_forward():
    steane = fixture("steane")
    T = 4
    f = _zero(steane, T)
    # an X data error entering before Z round 3 (code layer 4)
    fc = list(f.f_code)
    fc[3] = 0b1
    rec = repeated_from_errors(steane, T, ErrorLayers(tuple(fc), f.f_x, f.f_z))
    syn = steane.h_z.mul_int(0b1)
    assert rec.s_z == (0, 0, syn, syn)
    assert rec.s_x == (0, 0, 0, 0)


def test_check_flip_is_local():
    T = 3
    f = _zero(CODE, T)
    rec = repeated_from_errors(CODE, T, ErrorLayers(f.f_code, f.f_x, (0, 1, 0)))
    assert rec.s_z == (0, 1, 0) and rec.s_x == (0, 0, 0)


def test_first_code_layer_feeds_every_x_round():
    steane = fixture("steane")
    e = 0b1000
    fr = FoliatedRecord((e, 0, 0, 0, 0), (0, 0, 0), (0b1, 0, 0b10))
    s_x, s_z = foliate_outcomes(fr, steane)
    assert s_x == (steane.h_x.mul_int(e),) * 3
    assert s_z == (0b1, 0, 0b10)


@given(st.integers(0, 2**31 - 1), st.integers(1, 5))
def test_prefix_sums_match_naive(seed, T):
    steane = fixture("steane")
    f = sample_error_layers(steane, T, 0.3, make_rng(seed))
    fr = foliated_from_errors(f)
    assert foliate_outcomes(fr, steane) == foliate_naive(fr, steane)


@given(st.integers(0, 2**31 - 1), st.integers(1, 4))
def test_foliation_is_linear(seed, T):
    rng = make_rng(seed)
    a = foliated_from_errors(sample_error_layers(CODE, T, 0.4, rng))
    b = foliated_from_errors(sample_error_layers(CODE, T, 0.4, rng))
    fa, fb, fab = foliate_outcomes(a, CODE), foliate_outcomes(b, CODE), foliate_outcomes(a ^ b, CODE)
    assert fab == tuple(tuple(x ^ y for x, y in zip(u, v)) for u, v in zip(fa, fb))


def test_recurrence_on_random_runs():
    for k in range(500):
        f = sample_error_layers(CODE, 3, 0.2, make_rng(9, (k,)))
        assert verify_recurrence(foliated_from_errors(f), f, CODE)


def test_corrupted_code_bit_fails_exactly_one_round():
    T = 3
    for k in range(50):
        f = sample_error_layers(CODE, T, 0.2, make_rng(3, (k,)))
        rec = foliated_from_errors(f)
        for t in range(2 * T - 1):
            fc = list(f.f_code)
            fc[t] ^= 0b1  # qubit 0 is in both checks of the [[4,2,2]] code
            bad = recurrence_failures(rec, ErrorLayers(tuple(fc), f.f_x, f.f_z), CODE)
            assert len(bad) == 1
            side, j = bad[0]
            assert (side, j) == (("X", t // 2 + 1) if t % 2 == 0 else ("Z", t // 2 + 2))


def test_foliation_matches_repeated_protocol():
    rep = mbqc_check(CODE, 3, 300, 4)
    assert rep.ok and rep.trials == 300
    assert mbqc_check(fixture("steane"), 2, 100, 1).ok


def test_shape_errors():
    with pytest.raises(ValueError):
        foliate_outcomes(FoliatedRecord((0, 0), (0, 0), (0, 0)), CODE)
    with pytest.raises(ValueError):
        foliation_graph(CODE, 0)


def test_foliation_graph_shape():
    fg = foliation_graph(CODE, 2)
    # code layers 1..4 plus one Z and one X check per round
    assert fg.n_vertices == 4 * 4 + 2 * 2
    assert fg.output_mask.bit_count() == 4
    f = next(iter(single_error_locations(CODE, 2)))
    assert fg.record_from_mask(fg.mask_from_errors(f)) == foliated_from_errors(f)


@pytest.mark.parametrize("name,T,count", [("422", 2, 17), ("422", 3, 27), ("steane", 2, 34)])
def test_tableau_round_trip(name, T, count):
    res = tableau_round_trip(fixture(name), T, seed=5)
    assert len(res) == count
    assert all(ok for _, ok in res)
