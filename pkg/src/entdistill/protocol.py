"""Distillation protocols as data.

A protocol is Alice's gate list over register positions {A0, A1}, Bob's over
{B0, B1}, the set of received message pairs that count as success, and the
number of free parameters (0 or 1; the single angle is shared by both
parties).  Protocols round-trip through a small JSON circuit format.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .qstate import A0, A1, B0, B1, GATE_KINDS, Circuit, GatePlacement, OUTCOMES

THETA = "theta"
TWO_PI = 2 * math.pi

ALICE_QUBITS = frozenset({A0, A1})
BOB_QUBITS = frozenset({B0, B1})


class ProtocolError(ValueError):
    pass


@dataclass(frozen=True)
class GateSpec:
    """A gate whose angle may be the shared free parameter (``"theta"``)."""

    kind: str
    targets: tuple[int, ...]
    angle: float | str | None = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if isinstance(self.angle, str) and self.angle != THETA:
            raise ProtocolError(f"symbolic angle must be {THETA!r}, got {self.angle!r}")
        # validate arity and angle presence via a placeholder binding
        self.resolve(0.0)

    @property
    def is_parameterized(self) -> bool:
        return self.angle == THETA

    def resolve(self, theta: float | None) -> GatePlacement:
        angle = theta if self.is_parameterized else self.angle
        return GatePlacement(self.kind, self.targets, angle)

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, "targets": list(self.targets), "angle": self.angle}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> GateSpec:
        try:
            kind = obj["kind"]
            targets = obj["targets"]
        except KeyError as exc:
            raise ProtocolError(f"gate entry missing {exc.args[0]!r}: {obj}") from None
        if kind not in GATE_KINDS:
            raise ProtocolError(f"unknown gate kind {kind!r}")
        angle = obj.get("angle")
        if angle is not None and not isinstance(angle, str):
            angle = float(angle)
        return cls(kind, tuple(targets), angle)


@dataclass(frozen=True)
class Protocol:
    name: str
    alice: tuple[GateSpec, ...]
    bob: tuple[GateSpec, ...]
    success_set: frozenset[tuple[int, int]]
    num_params: int

    def __post_init__(self):
        object.__setattr__(self, "alice", tuple(self.alice))
        object.__setattr__(self, "bob", tuple(self.bob))
        object.__setattr__(self, "success_set", frozenset(tuple(r) for r in self.success_set))
        if not self.success_set:
            raise ProtocolError("success set must be nonempty")
        for r in self.success_set:
            if r not in OUTCOMES:
                raise ProtocolError(f"invalid received message pair {r}")
        for party, gates, allowed in (("alice", self.alice, ALICE_QUBITS), ("bob", self.bob, BOB_QUBITS)):
            for g in gates:
                if not set(g.targets) <= allowed:
                    raise ProtocolError(
                        f"{party} gate {g.kind}{g.targets} touches qubits outside {sorted(allowed)}"
                    )
        uses_theta = any(g.is_parameterized for g in self.alice + self.bob)
        if self.num_params not in (0, 1):
            raise ProtocolError("num_params must be 0 or 1")
        if uses_theta != (self.num_params == 1):
            raise ProtocolError(
                f"num_params={self.num_params} but circuit {'uses' if uses_theta else 'does not use'} theta"
            )

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "alice": [g.to_json() for g in self.alice],
            "bob": [g.to_json() for g in self.bob],
            "success_set": [list(r) for r in sorted(self.success_set)],
            "num_params": self.num_params,
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> Protocol:
        try:
            return cls(
                name=str(obj["name"]),
                alice=tuple(GateSpec.from_json(g) for g in obj["alice"]),
                bob=tuple(GateSpec.from_json(g) for g in obj["bob"]),
                success_set=frozenset(tuple(r) for r in obj["success_set"]),
                num_params=int(obj["num_params"]),
            )
        except KeyError as exc:
            raise ProtocolError(f"circuit description missing {exc.args[0]!r}") from None


@dataclass(frozen=True)
class ProtocolParams:
    theta: float

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise ProtocolError(f"theta must be finite, got {self.theta}")
        theta = math.fmod(self.theta, TWO_PI) % TWO_PI
        object.__setattr__(self, "theta", 0.0 if theta >= TWO_PI else theta)


def bind_angle(proto: Protocol, theta: float | None) -> Circuit:
    """Concrete 4-qubit circuit with ``theta`` substituted verbatim (no reduction)."""
    gates = [g.resolve(theta) for g in proto.alice] + [g.resolve(theta) for g in proto.bob]
    return Circuit(4, tuple(gates))


def bind(proto: Protocol, params: ProtocolParams | None = None) -> Circuit:
    if proto.num_params == 0:
        if params is not None:
            raise ProtocolError(f"protocol {proto.name!r} has no free parameters")
        return bind_angle(proto, None)
    if params is None:
        raise ProtocolError(f"protocol {proto.name!r} needs a theta parameter")
    return bind_angle(proto, params.theta)


def party_circuits(proto: Protocol, theta: float | None = None) -> tuple[Circuit, Circuit]:
    """Alice's and Bob's gates as separate 4-qubit circuits."""
    return (
        Circuit(4, tuple(g.resolve(theta) for g in proto.alice)),
        Circuit(4, tuple(g.resolve(theta) for g in proto.bob)),
    )


# -- built-in registry ---------------------------------------------------------

def dejmps() -> Protocol:
    h = math.pi / 2
    return Protocol(
        name="dejmps",
        alice=(GateSpec("RX", (A0,), h), GateSpec("RX", (A1,), h), GateSpec("CNOT", (A0, A1))),
        bob=(GateSpec("RX", (B0,), -h), GateSpec("RX", (B1,), -h), GateSpec("CNOT", (B0, B1))),
        success_set=frozenset({(0, 0), (1, 1)}),
        num_params=0,
    )


def loccnet() -> Protocol:
    # CNOTs controlled by the sacrificial qubit, Bob's extra CNOT back onto it,
    # then RY(theta) on each sacrificial qubit before measurement
    return Protocol(
        name="loccnet",
        alice=(GateSpec("CNOT", (A1, A0)), GateSpec("RY", (A1,), THETA)),
        bob=(GateSpec("CNOT", (B1, B0)), GateSpec("CNOT", (B0, B1)), GateSpec("RY", (B1,), THETA)),
        success_set=frozenset({(0, 0)}),
        num_params=1,
    )


def na_loccnet() -> Protocol:
    return Protocol(
        name="na-loccnet",
        alice=(GateSpec("CNOT", (A0, A1)), GateSpec("RZY", (A0, A1), THETA)),
        bob=(GateSpec("CNOT", (B0, B1)), GateSpec("RZY", (B0, B1), THETA)),
        success_set=frozenset({(0, 0)}),
        num_params=1,
    )


REGISTRY = {"dejmps": dejmps, "loccnet": loccnet, "na-loccnet": na_loccnet}


def get_protocol(name: str) -> Protocol:
    key = name.lower().replace("_", "-")
    if key not in REGISTRY:
        raise ProtocolError(f"unknown protocol {name!r}; available: {', '.join(REGISTRY)}")
    return REGISTRY[key]()


def load_protocol(path: str | Path) -> Protocol:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"{path}: invalid JSON ({exc})") from None
    return Protocol.from_json(obj)


def save_protocol(proto: Protocol, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(proto.to_json(), fh, indent=2)
        fh.write("\n")
