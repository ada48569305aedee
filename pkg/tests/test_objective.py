import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entdistill.objective import (
    ChannelModel,
    DegenerateProtocolError,
    combine,
    evaluate,
    evaluate_at,
    evaluate_noiseless_objective,
    noiseless_objective_at,
    output_state_at,
    receive_prob,
)
from entdistill.protocol import Protocol, ProtocolParams, dejmps, loccnet, na_loccnet
from entdistill.qstate import OUTCOMES, fidelity_to_bell, partial_trace_sacrificial

from . import reference as ref

PROTOCOLS = [dejmps(), loccnet(), na_loccnet()]
BITS = [(0, 0), (0, 1), (1, 0), (1, 1)]


def _theta(proto):
    return 1.3 if proto.num_params else None


def test_channel_range():
    ChannelModel(0.0)
    ChannelModel(0.5)
    for bad in (-0.01, 0.51, 0.7):
        with pytest.raises(ValueError):
            ChannelModel(bad)


def test_receive_prob_examples():
    ch = ChannelModel(0.0)
    for b in BITS:
        assert receive_prob(ch, b, b) == 1
    assert receive_prob(ChannelModel(0.25), (1, 1), (0, 0)) == 0.0625


@pytest.mark.parametrize("p", [0.0, 0.1, 0.25, 0.5])
def test_receive_prob_normalized(p):
    ch = ChannelModel(p)
    for sent in BITS:
        assert sum(receive_prob(ch, sent, r) for r in BITS) == pytest.approx(1, abs=1e-15)


@pytest.mark.parametrize("p", [0.0, 0.05, 0.3, 0.5])
def test_weights_reduce_to_four_term_form(p):
    ch = ChannelModel(p)
    expected = {(0, 0): (1 - p) ** 2, (1, 1): p ** 2, (1, 0): p * (1 - p), (0, 1): (1 - p) * p}
    for sent, w in expected.items():
        assert receive_prob(ch, sent, (0, 0)) == pytest.approx(w, abs=1e-15)


def test_receive_prob_rejects_bad_bits():
    with pytest.raises(ValueError):
        receive_prob(ChannelModel(0.1), (0, 2), (0, 0))


@pytest.mark.parametrize("proto", PROTOCOLS, ids=lambda p: p.name)
@pytest.mark.parametrize("F,p", [(0.6, 0.0), (0.6, 0.25), (0.3, 0.1), (0.9, 0.5)])
def test_evaluate_matches_reference(proto, F, p):
    theta = _theta(proto)
    u = {"dejmps": lambda: ref.dejmps_u(), "loccnet": lambda: ref.loccnet_u(theta),
         "na-loccnet": lambda: ref.na_loccnet_u(theta)}[proto.name]()
    want_f, want_p = ref.conditional(u, F, p, sorted(proto.success_set))
    got = evaluate_at(proto, theta, F, ChannelModel(p))
    assert got.avg_fidelity == pytest.approx(want_f, abs=1e-12)
    assert got.p_succ == pytest.approx(want_p, abs=1e-12)


def test_dejmps_frozen_values():
    # frozen from the numpy reference
    r0 = evaluate(dejmps(), None, 0.6, ChannelModel(0.0))
    assert r0.avg_fidelity == pytest.approx(16 / 17, abs=1e-12)
    assert r0.p_succ == pytest.approx(0.68, abs=1e-12)
    r25 = evaluate(dejmps(), None, 0.6, ChannelModel(0.25))
    assert r25.avg_fidelity == pytest.approx(0.7339449541284403, abs=1e-12)
    assert r25.p_succ == pytest.approx(0.545, abs=1e-12)
    r50 = evaluate(dejmps(), None, 0.6, ChannelModel(0.5))
    assert r50.avg_fidelity == pytest.approx(0.64, abs=1e-12)
    assert r50.p_succ == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("proto", [loccnet(), na_loccnet()], ids=lambda p: p.name)
def test_noiseless_reduction(proto):
    res = evaluate_at(proto, 2.1, 0.6, ChannelModel(0.0))
    assert res.avg_fidelity == pytest.approx(res.per_outcome[(0, 0)].fidelity, abs=1e-12)
    assert res.p_succ == pytest.approx(res.per_outcome[(0, 0)].probability, abs=1e-12)
    assert noiseless_objective_at(proto, 2.1, 0.6) == pytest.approx(res.avg_fidelity, abs=1e-15)


@pytest.mark.parametrize("proto", [loccnet(), na_loccnet()], ids=lambda p: p.name)
def test_maximal_noise_collapses_to_unconditional_average(proto):
    theta = 0.8
    res = evaluate_at(proto, theta, 0.6, ChannelModel(0.5))
    reduced = partial_trace_sacrificial(output_state_at(proto, theta, 0.6))
    assert res.p_succ == pytest.approx(0.25, abs=1e-10)
    assert res.avg_fidelity == pytest.approx(fidelity_to_bell(reduced), abs=1e-10)


@pytest.mark.parametrize("success", [{(0, 0)}, {(0, 1)}, {(0, 0), (1, 1)}, {(0, 1), (1, 0), (1, 1)}, set(BITS)])
def test_maximal_noise_ignores_success_set(success):
    proto = Protocol("x", na_loccnet().alice, na_loccnet().bob, success, 1)
    base = evaluate_at(na_loccnet(), 2.5, 0.7, ChannelModel(0.5)).avg_fidelity
    assert evaluate_at(proto, 2.5, 0.7, ChannelModel(0.5)).avg_fidelity == pytest.approx(base, abs=1e-10)


def test_dejmps_perfect_input():
    assert evaluate_noiseless_objective(dejmps(), None, 1.0) == pytest.approx(1.0, abs=1e-12)
    assert evaluate(dejmps(), None, 1.0, ChannelModel(0.0)).avg_fidelity == pytest.approx(1.0, abs=1e-12)


def test_noiseless_objective_continuous():
    import random

    rng = random.Random(3)
    for _ in range(5):
        t = rng.uniform(0, 2 * math.pi)
        a = noiseless_objective_at(na_loccnet(), t, 0.6)
        b = noiseless_objective_at(na_loccnet(), t + 1e-6, 0.6)
        assert abs(a - b) < 1e-4


def test_degenerate_success_probability():
    # F = 0 gives |0000>; RZY(pi) sends A1 and B1 to |1>, so (0,0) is never measured
    with pytest.raises(DegenerateProtocolError):
        evaluate(na_loccnet(), ProtocolParams(math.pi), 0.0, ChannelModel(0.0))
    with pytest.raises(DegenerateProtocolError):
        evaluate_noiseless_objective(na_loccnet(), ProtocolParams(math.pi), 0.0)
    # any channel noise makes it well defined again
    assert evaluate(na_loccnet(), ProtocolParams(math.pi), 0.0, ChannelModel(0.1)).p_succ > 0


def test_zero_probability_outcomes_carry_no_fidelity():
    res = evaluate(dejmps(), None, 1.0, ChannelModel(0.2))
    assert res.per_outcome[(0, 1)].fidelity is None
    assert res.per_outcome[(0, 1)].probability == pytest.approx(0, abs=1e-12)


def test_params_required_when_parameterized():
    with pytest.raises(ValueError):
        evaluate(loccnet(), None, 0.6, ChannelModel(0.1))


def test_result_json():
    payload = evaluate(dejmps(), None, 0.6, ChannelModel(0.1)).to_json()
    assert set(payload["per_outcome"]) == {"00", "01", "10", "11"}


@settings(max_examples=40, deadline=None)
@given(
    F=st.floats(0.0, 1.0),
    p=st.floats(0.0, 0.5),
    theta=st.floats(0.0, 2 * math.pi),
    which=st.sampled_from(PROTOCOLS),
)
def test_average_fidelity_is_a_probability(F, p, theta, which):
    try:
        res = evaluate_at(which, theta if which.num_params else None, F, ChannelModel(p))
    except DegenerateProtocolError:
        return
    num = sum(
        receive_prob(ChannelModel(p), xy, r) * m.probability * (m.fidelity or 0.0)
        for r in which.success_set
        for xy, m in res.per_outcome.items()
    )
    assert num <= res.p_succ + 1e-12
    assert -1e-12 <= res.avg_fidelity <= 1 + 1e-12
    assert 0 <= res.p_succ <= 1 + 1e-12
    assert sum(m.probability for m in res.per_outcome.values()) == pytest.approx(1, abs=1e-10)


def test_combine_uses_success_set_pattern():
    per = evaluate_at(na_loccnet(), 1.0, 0.6, ChannelModel(0.0)).per_outcome
    p = 0.2
    res = combine(per, {(0, 0)}, ChannelModel(p))
    P = {xy: per[xy].probability for xy in OUTCOMES}
    Fx = {xy: per[xy].fidelity for xy in OUTCOMES}
    den = (1 - p) ** 2 * P[0, 0] + p ** 2 * P[1, 1] + p * (1 - p) * P[1, 0] + (1 - p) * p * P[0, 1]
    num = ((1 - p) ** 2 * P[0, 0] * Fx[0, 0] + p ** 2 * P[1, 1] * Fx[1, 1]
           + p * (1 - p) * P[1, 0] * Fx[1, 0] + (1 - p) * p * P[0, 1] * Fx[0, 1])
    assert res.p_succ == pytest.approx(den, abs=1e-15)
    assert res.avg_fidelity == pytest.approx(num / den, abs=1e-15)
