import pytest

from entdistill import _backend
from entdistill.objective import ChannelModel, evaluate
from entdistill.oracle import OracleConfig, chunk_uniforms, mc_evaluate, within_sigma
from entdistill.protocol import Protocol, ProtocolParams, dejmps, loccnet, na_loccnet
from entdistill.qstate import OUTCOMES

IDENTITY = Protocol("identity", (), (), {(0, 0)}, 0)


def test_perfect_input_identity_circuit_is_exact():
    res = mc_evaluate(IDENTITY, None, 1.0, ChannelModel(0.0), OracleConfig(20_000, seed=1))
    assert res.avg_fidelity == 1.0
    assert res.se_avg_fidelity == 0.0


@pytest.mark.parametrize("proto", [dejmps(), loccnet(), na_loccnet()], ids=lambda p: p.name)
def test_maximal_noise_success_rate(proto):
    params = ProtocolParams(2.0) if proto.num_params else None
    res = mc_evaluate(proto, params, 0.6, ChannelModel(0.5), OracleConfig(200_000, seed=11))
    expected = 0.25 * len(proto.success_set)
    assert within_sigma(expected, res.p_succ, res.se_p_succ)


def test_dejmps_matches_exact_at_one_million_samples():
    exact = evaluate(dejmps(), None, 0.6, ChannelModel(0.0))
    res = mc_evaluate(dejmps(), None, 0.6, ChannelModel(0.0), OracleConfig(1_000_000, seed=7))
    assert within_sigma(exact.avg_fidelity, res.avg_fidelity, res.se_avg_fidelity)
    assert within_sigma(exact.p_succ, res.p_succ, res.se_p_succ)
    for xy in OUTCOMES:
        prob = exact.per_outcome[xy].probability
        se = (prob * (1 - prob) / res.num_samples) ** 0.5
        assert within_sigma(prob, res.per_outcome_freq[xy], se)


def test_same_seed_same_estimates():
    cfg = OracleConfig(100_000, seed=99)
    a = mc_evaluate(na_loccnet(), ProtocolParams(1.0), 0.6, ChannelModel(0.2), cfg)
    b = mc_evaluate(na_loccnet(), ProtocolParams(1.0), 0.6, ChannelModel(0.2), cfg)
    assert a == b


def test_different_seeds_differ():
    a = mc_evaluate(dejmps(), None, 0.6, ChannelModel(0.2), OracleConfig(50_000, seed=1))
    b = mc_evaluate(dejmps(), None, 0.6, ChannelModel(0.2), OracleConfig(50_000, seed=2))
    assert a.num_success != b.num_success


def test_worker_count_does_not_change_results():
    base = OracleConfig(300_000, seed=5)
    serial = mc_evaluate(loccnet(), ProtocolParams(4.3), 0.6, ChannelModel(0.1), base)
    threaded = mc_evaluate(loccnet(), ProtocolParams(4.3), 0.6, ChannelModel(0.1), OracleConfig(300_000, seed=5, workers=4))
    assert serial == threaded


def test_chunk_streams_are_keyed_by_seed_and_index():
    a = chunk_uniforms(3, 0, 10)
    assert (a == chunk_uniforms(3, 0, 10)).all()
    assert not (a == chunk_uniforms(3, 1, 10)).any()
    assert not (a == chunk_uniforms(4, 0, 10)).any()


@pytest.mark.skipif(len(_backend.available()) < 2, reason="compiled kernels not built")
def test_backends_produce_identical_estimates():
    cfg = OracleConfig(70_000, seed=21)
    out = {}
    for name in _backend.available():
        with _backend.use(name):
            out[name] = mc_evaluate(na_loccnet(), ProtocolParams(1.77), 0.6, ChannelModel(0.25), cfg)
    py, cy = out["python"], out["cython"]
    assert py.num_success == cy.num_success
    assert py.per_outcome_freq == cy.per_outcome_freq
    assert py.avg_fidelity == pytest.approx(cy.avg_fidelity, abs=1e-12)


def test_config_validation():
    with pytest.raises(ValueError):
        OracleConfig(0)
    with pytest.raises(ValueError):
        OracleConfig(10, seed=-1)


def test_within_sigma():
    assert within_sigma(0.5, 0.503, 0.001)
    assert not within_sigma(0.5, 0.504, 0.001)
    assert within_sigma(1.0, 1.0, 0.0)
