"""Channel model and distillation figures of merit.

Alice and Bob each send their sacrificial-qubit measurement bit to Charlie
over an independent binary symmetric channel.  Charlie keeps the preserved
pair when the *received* pair lies in the protocol's success set, so the
conditional fidelity averages the per-outcome fidelities F^xy with weights
P(received | sent = xy) * P^xy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

from .protocol import Protocol, ProtocolParams, bind, bind_angle
from .qstate import (
    OUTCOMES,
    ZERO_PROB,
    DensityMatrix,
    circuit_unitary,
    evolve,
    fidelity_to_bell,
    measure_sacrificial,
    s_state,
    tensor,
)


class DegenerateProtocolError(ArithmeticError):
    """The conditioning event has (numerically) zero probability."""


@dataclass(frozen=True)
class ChannelModel:
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 0.5:
            raise ValueError(f"bit flip probability must lie in [0, 0.5], got {self.p}")

    def transition(self, sent: int, received: int) -> float:
        return 1.0 - self.p if sent == received else self.p


NOISELESS = ChannelModel(0.0)


def receive_prob(ch: ChannelModel, sent: tuple[int, int], received: tuple[int, int]) -> float:
    """Probability that Charlie receives ``received`` when the parties sent ``sent``."""
    for bit in (*sent, *received):
        if bit not in (0, 1):
            raise ValueError(f"message bits must be 0 or 1, got {sent} -> {received}")
    return ch.transition(sent[0], received[0]) * ch.transition(sent[1], received[1])


class OutcomeMetrics(NamedTuple):
    probability: float
    fidelity: float | None  # None when the outcome cannot occur


@dataclass(frozen=True)
class EvaluationResult:
    avg_fidelity: float
    p_succ: float
    per_outcome: dict[tuple[int, int], OutcomeMetrics] = field(compare=False)

    def to_json(self) -> dict:
        return {
            "avg_fidelity": self.avg_fidelity,
            "p_succ": self.p_succ,
            "per_outcome": {
                f"{x}{y}": {"probability": m.probability, "fidelity": m.fidelity}
                for (x, y), m in sorted(self.per_outcome.items())
            },
        }


@lru_cache(maxsize=64)
def input_state(F: float) -> DensityMatrix:
    """Two S-state copies on (A0, B0) and (A1, B1)."""
    s = s_state(F)
    return tensor(s, s)


def _theta(proto: Protocol, params: ProtocolParams | None) -> float | None:
    bind(proto, params)  # arity check
    return None if params is None else params.theta


def output_state_at(proto: Protocol, theta: float | None, F: float) -> DensityMatrix:
    """rho_out = U (rho (x) rho) U^dagger with ``theta`` used verbatim."""
    u = circuit_unitary(bind_angle(proto, theta))
    return evolve(input_state(F), u, check=False)


def output_state(proto: Protocol, params: ProtocolParams | None, F: float) -> DensityMatrix:
    return output_state_at(proto, _theta(proto, params), F)


def outcome_metrics(rho_out: DensityMatrix) -> dict[tuple[int, int], OutcomeMetrics]:
    out = {}
    for xy, (prob, state) in measure_sacrificial(rho_out, check=False).items():
        out[xy] = OutcomeMetrics(prob, None if state is None else fidelity_to_bell(state))
    return out


def combine(
    per_outcome: dict[tuple[int, int], OutcomeMetrics],
    success_set,
    ch: ChannelModel,
) -> EvaluationResult:
    """Channel-weighted success probability and conditional average fidelity."""
    num = 0.0
    den = 0.0
    for received in sorted(success_set):
        for sent in OUTCOMES:
            prob, fid = per_outcome[sent]
            w = receive_prob(ch, sent, received) * prob
            den += w
            if fid is not None:
                num += w * fid
    if den <= ZERO_PROB:
        raise DegenerateProtocolError(
            f"success probability {den:.3g} vanishes; conditional fidelity undefined"
        )
    return EvaluationResult(num / den, den, per_outcome)


def evaluate_at(proto: Protocol, theta: float | None, F: float, ch: ChannelModel) -> EvaluationResult:
    return combine(outcome_metrics(output_state_at(proto, theta, F)), proto.success_set, ch)


def evaluate(
    proto: Protocol, params: ProtocolParams | None, F: float, ch: ChannelModel
) -> EvaluationResult:
    """Average fidelity conditioned on success, and success probability.

    ``params`` must be given exactly when the protocol has a free parameter.
    """
    return evaluate_at(proto, _theta(proto, params), F, ch)


def noiseless_objective_at(proto: Protocol, theta: float | None, F: float) -> float:
    prob, fid = outcome_metrics(output_state_at(proto, theta, F))[(0, 0)]
    if fid is None:
        raise DegenerateProtocolError(f"outcome (0, 0) has probability {prob:.3g}; F^00 undefined")
    return fid


def evaluate_noiseless_objective(proto: Protocol, params: ProtocolParams | None, F: float) -> float:
    """F^00: fidelity of the preserved pair given measured outcome (0, 0)."""
    return noiseless_objective_at(proto, _theta(proto, params), F)
