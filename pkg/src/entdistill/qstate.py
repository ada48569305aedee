"""Density matrices, gates and the four-qubit distillation register.

Register convention: the four qubits are ordered (A0, B0, A1, B1) and position
0 is the most significant bit of a computational-basis index, so the index of
|a0 b0 a1 b1> is ``8*a0 + 4*b0 + 2*a1 + b1``.  (A0, B0) is the preserved pair,
(A1, B1) the sacrificial pair that gets measured.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

from .linalg import (
    ComplexMatrix,
    DimensionError,
    add,
    conjugate_by,
    identity,
    is_hermitian,
    is_unitary,
    kron,
    matmul,
    scale,
    trace,
)

A0, B0, A1, B1 = 0, 1, 2, 3

STATE_ATOL = 1e-9
ZERO_PROB = 1e-12


class InvalidStateError(ValueError):
    """Matrix is not a valid density matrix at the required tolerance."""


I2 = identity(2)
X = ComplexMatrix.from_rows([[0, 1], [1, 0]])
Y = ComplexMatrix.from_rows([[0, -1j], [1j, 0]])
Z = ComplexMatrix.from_rows([[1, 0], [0, -1]])
ZY = kron(Z, Y)
CNOT = ComplexMatrix.from_rows([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])


@dataclass(frozen=True)
class DensityMatrix:
    num_qubits: int
    mat: ComplexMatrix

    def __post_init__(self):
        dim = 1 << self.num_qubits
        if self.mat.shape != (dim, dim):
            raise DimensionError(f"{self.num_qubits}-qubit state needs a {dim}x{dim} matrix, got {self.mat.shape}")

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits

    def __getitem__(self, idx):
        return self.mat[idx]

    def validate(self, atol: float = STATE_ATOL) -> DensityMatrix:
        """Raise ``InvalidStateError`` unless Hermitian with unit trace."""
        if not is_hermitian(self.mat, atol):
            raise InvalidStateError("density matrix is not Hermitian")
        tr = trace(self.mat)
        if abs(tr - 1) > atol:
            raise InvalidStateError(f"density matrix trace is {tr}, expected 1")
        for i in range(self.dim):
            if self.mat[i, i].real < -atol:
                raise InvalidStateError(f"negative diagonal entry at {i}")
        return self


def min_expectation_probe(rho: DensityMatrix, samples: int = 1000, seed: int = 0) -> float:
    """Smallest ``Re(v^dagger rho v)`` over random complex unit vectors.

    A cheap positive-semidefiniteness probe; no eigendecomposition needed.
    """
    rng = random.Random(seed)
    n = rho.dim
    e = rho.mat.entries
    worst = math.inf
    for _ in range(samples):
        v = [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(n)]
        norm = math.sqrt(sum(abs(z) ** 2 for z in v))
        v = [z / norm for z in v]
        val = 0j
        for i in range(n):
            vi = v[i].conjugate()
            row = e[i * n:(i + 1) * n]
            val += vi * sum(row[j] * v[j] for j in range(n))
        worst = min(worst, val.real)
    return worst


def tensor(*states: DensityMatrix) -> DensityMatrix:
    out = states[0]
    for s in states[1:]:
        out = DensityMatrix(out.num_qubits + s.num_qubits, kron(out.mat, s.mat))
    return out


def basis_state(bits: str) -> DensityMatrix:
    """|bits><bits| for a bit string such as ``"0110"`` (first char = position 0)."""
    n = len(bits)
    k = int(bits, 2)
    dim = 1 << n
    entries = [0j] * (dim * dim)
    entries[k * dim + k] = 1 + 0j
    return DensityMatrix(n, ComplexMatrix(dim, dim, tuple(entries)))


def bell_phi_plus() -> DensityMatrix:
    e = [0j] * 16
    for i in (0, 3):
        for j in (0, 3):
            e[i * 4 + j] = 0.5 + 0j
    return DensityMatrix(2, ComplexMatrix(4, 4, tuple(e)))


@lru_cache(maxsize=256)
def s_state(F: float) -> DensityMatrix:
    """F |phi+><phi+| + (1 - F) |00><00|."""
    if not 0.0 <= F <= 1.0:
        raise ValueError(f"input fidelity must lie in [0, 1], got {F}")
    e = [0j] * 16
    e[0] = complex(1 - F / 2)
    e[3] = e[12] = e[15] = complex(F / 2)
    return DensityMatrix(2, ComplexMatrix(4, 4, tuple(e)))


# -- gates -------------------------------------------------------------------

_ARITY = {"RX": 1, "RY": 1, "RZ": 1, "RZY": 2, "CNOT": 2}
GATE_KINDS = tuple(_ARITY)


@dataclass(frozen=True)
class GatePlacement:
    """A gate bound to register positions.

    ``targets`` is ``(q,)`` for single-qubit rotations, ``(z_qubit, y_qubit)``
    for RZY and ``(control, target)`` for CNOT.
    """

    kind: str
    targets: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in _ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}; expected one of {GATE_KINDS}")
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if len(self.targets) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind} acts on {_ARITY[self.kind]} qubit(s), got targets {self.targets}")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"{self.kind} targets must be distinct, got {self.targets}")
        if self.kind == "CNOT":
            if self.angle is not None:
                raise ValueError("CNOT takes no angle")
        elif self.angle is None:
            raise ValueError(f"{self.kind} requires an angle")
        else:
            object.__setattr__(self, "angle", float(self.angle))

    def check_register(self, num_qubits: int) -> None:
        for t in self.targets:
            if not 0 <= t < num_qubits:
                raise ValueError(f"{self.kind} target {t} outside a {num_qubits}-qubit register")


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[GatePlacement, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            g.check_register(self.num_qubits)

    def __len__(self) -> int:
        return len(self.gates)


def rx(theta: float) -> ComplexMatrix:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return ComplexMatrix.from_rows([[c, -1j * s], [-1j * s, c]])


def ry(theta: float) -> ComplexMatrix:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return ComplexMatrix.from_rows([[c, -s], [s, c]])


def rz(theta: float) -> ComplexMatrix:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return ComplexMatrix.from_rows([[c - 1j * s, 0], [0, c + 1j * s]])


def rzy(theta: float) -> ComplexMatrix:
    # exp(-i t/2 Z(x)Y) has this closed form because (Z(x)Y)^2 = I
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return add(scale(identity(4), c), scale(ZY, -1j * s))


_ROTATIONS = {"RX": rx, "RY": ry, "RZ": rz, "RZY": rzy}


def gate_matrix(g: GatePlacement) -> ComplexMatrix:
    """Local 2x2 or 4x4 matrix; first listed target is the more significant bit."""
    if g.kind == "CNOT":
        return CNOT
    return _ROTATIONS[g.kind](g.angle)


@lru_cache(maxsize=64)
def _embedding_pattern(targets: tuple[int, ...], num_qubits: int) -> tuple[tuple[int, int], ...]:
    """(register flat index, local flat index) pairs of the nonzero slots."""
    k = len(targets)
    dim = 1 << num_qubits
    shifts = [num_qubits - 1 - t for t in targets]
    mask = 0
    for sh in shifts:
        mask |= 1 << sh

    def local_index(i):
        out = 0
        for sh in shifts:
            out = (out << 1) | ((i >> sh) & 1)
        return out

    lk = 1 << k
    pattern = []
    for i in range(dim):
        rest = i & ~mask
        for j in range(dim):
            if j & ~mask == rest:
                pattern.append((i * dim + j, local_index(i) * lk + local_index(j)))
    return tuple(pattern)


@lru_cache(maxsize=4096)
def embed_gate(g: GatePlacement, num_qubits: int) -> ComplexMatrix:
    """Full-register unitary acting as ``gate_matrix(g)`` on ``g.targets``.

    Built by basis-index remapping, so non-adjacent and reversed targets need
    no SWAPs.
    """
    g.check_register(num_qubits)
    le = gate_matrix(g).entries
    dim = 1 << num_qubits
    entries = [0j] * (dim * dim)
    for out_idx, loc_idx in _embedding_pattern(g.targets, num_qubits):
        entries[out_idx] = le[loc_idx]
    return ComplexMatrix(dim, dim, tuple(entries))


def circuit_unitary(c: Circuit) -> ComplexMatrix:
    """Product of embedded gates; later gates multiply on the left."""
    if not c.gates:
        return identity(1 << c.num_qubits)
    u = embed_gate(c.gates[0], c.num_qubits)
    for g in c.gates[1:]:
        u = matmul(embed_gate(g, c.num_qubits), u)
    return u


def evolve(rho: DensityMatrix, u: ComplexMatrix, check: bool = True) -> DensityMatrix:
    """Return ``u rho u^dagger``."""
    if u.shape != rho.mat.shape:
        raise DimensionError(f"unitary {u.shape} does not match {rho.num_qubits}-qubit state")
    if check and not is_unitary(u, STATE_ATOL):
        raise ValueError("evolution operator is not unitary")
    return DensityMatrix(rho.num_qubits, conjugate_by(u, rho.mat))


# -- measurement and fidelity -----------------------------------------------

OUTCOMES = ((0, 0), (0, 1), (1, 0), (1, 1))


class Outcome(NamedTuple):
    probability: float
    state: DensityMatrix | None  # None when the outcome has (numerically) zero probability


def _block(rho4: DensityMatrix, k: int) -> list[complex]:
    """Unnormalized (A0,B0) block for sacrificial outcome index ``k = 2x + y``."""
    e = rho4.mat.entries
    return [e[(4 * i + k) * 16 + 4 * j + k] for i in range(4) for j in range(4)]


def _bell_overlap(block: Sequence[complex]) -> complex:
    return (block[0] + block[3] + block[12] + block[15]) / 2


def measure_sacrificial(rho4: DensityMatrix, check: bool = True) -> dict[tuple[int, int], Outcome]:
    """Computational-basis measurement of (A1, B1); x is A1's bit, y is B1's."""
    if rho4.num_qubits != 4:
        raise InvalidStateError(f"expected a 4-qubit state, got {rho4.num_qubits} qubits")
    if check:
        rho4.validate()
    result = {}
    for x, y in OUTCOMES:
        block = _block(rho4, 2 * x + y)
        prob = (block[0] + block[5] + block[10] + block[15]).real
        if prob <= ZERO_PROB:
            result[(x, y)] = Outcome(max(prob, 0.0), None)
        else:
            mat = ComplexMatrix(4, 4, tuple(z / prob for z in block))
            result[(x, y)] = Outcome(prob, DensityMatrix(2, mat))
    return result


def fidelity_to_bell(rho2: DensityMatrix) -> float:
    """<phi+| rho |phi+> for a two-qubit state."""
    if rho2.num_qubits != 2:
        raise InvalidStateError(f"expected a 2-qubit state, got {rho2.num_qubits} qubits")
    val = _bell_overlap(rho2.mat.entries)
    if abs(val.imag) > 1e-10:
        raise InvalidStateError(f"Bell overlap has imaginary part {val.imag}; state not Hermitian")
    return val.real


def partial_trace_sacrificial(rho4: DensityMatrix) -> DensityMatrix:
    """Trace out (A1, B1), keeping (A0, B0)."""
    if rho4.num_qubits != 4:
        raise InvalidStateError(f"expected a 4-qubit state, got {rho4.num_qubits} qubits")
    acc = [0j] * 16
    for k in range(4):
        for idx, z in enumerate(_block(rho4, k)):
            acc[idx] += z
    return DensityMatrix(2, ComplexMatrix(4, 4, tuple(acc)))
