"""Monte-Carlo trajectory oracle.

Independent of the density-matrix pipeline: each sample draws the two input
pairs as pure states (|phi+> with probability F, else |00>), evolves the
16-dim statevector through the bound circuit, samples the sacrificial
measurement from Born probabilities and the two channel flips, and scores the
normalized post-measurement preserved pair when Charlie declares success.

Random numbers come from numpy's counter-based Philox generator.  The sample
index space is cut into fixed-size chunks and chunk ``c`` uses the key
``(seed, c)``, so results do not depend on how chunks are scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _backend
from .objective import ChannelModel
from .protocol import Protocol, ProtocolParams, bind
from .qstate import OUTCOMES, circuit_unitary

CHUNK = 1 << 16
DRAWS_PER_SAMPLE = 5
ACCEPTANCE_MIN_SAMPLES = 10_000


@dataclass(frozen=True)
class OracleConfig:
    num_samples: int = 1_000_000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.num_samples < 1:
            raise ValueError("num_samples must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class OracleResult:
    avg_fidelity: float
    p_succ: float
    per_outcome_freq: dict[tuple[int, int], float]
    se_avg_fidelity: float
    se_p_succ: float
    num_samples: int
    num_success: int
    seed: int


def chunk_uniforms(seed: int, chunk: int, n: int) -> np.ndarray:
    gen = np.random.Generator(np.random.Philox(key=[seed, chunk]))
    return gen.random(DRAWS_PER_SAMPLE * n)


def _run_chunk(u_entries, F, p, success, seed, chunk, n):
    uniforms = chunk_uniforms(seed, chunk, n)
    if _backend.kernels is not _backend._ckernels:
        uniforms = uniforms.tolist()
    return _backend.kernels.trajectories(u_entries, F, p, success, uniforms, n)


def mc_evaluate(
    proto: Protocol,
    params: ProtocolParams | None,
    F: float,
    ch: ChannelModel,
    cfg: OracleConfig = OracleConfig(),
) -> OracleResult:
    if not 0.0 <= F <= 1.0:
        raise ValueError(f"input fidelity must lie in [0, 1], got {F}")
    u = circuit_unitary(bind(proto, params))
    success = tuple(int(r in proto.success_set) for r in OUTCOMES)
    sizes = []
    remaining = cfg.num_samples
    while remaining > 0:
        sizes.append(min(CHUNK, remaining))
        remaining -= sizes[-1]
    jobs = [(u.entries, F, ch.p, success, cfg.seed, c, n) for c, n in enumerate(sizes)]
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(lambda job: _run_chunk(*job), jobs))
    else:
        parts = [_run_chunk(*job) for job in jobs]

    # reduce in chunk order so the float sums are schedule-independent
    n_succ = 0
    sum_f = 0.0
    sum_f2 = 0.0
    counts = [0, 0, 0, 0]
    for ns, sf, sf2, cts in parts:
        n_succ += ns
        sum_f += sf
        sum_f2 += sf2
        for k in range(4):
            counts[k] += cts[k]

    N = cfg.num_samples
    p_hat = n_succ / N
    se_p = math.sqrt(p_hat * (1 - p_hat) / N)
    if n_succ:
        mean_f = sum_f / n_succ
        var = max(sum_f2 / n_succ - mean_f * mean_f, 0.0)
        if n_succ > 1:
            var *= n_succ / (n_succ - 1)
        se_f = math.sqrt(var / n_succ)
    else:
        mean_f, se_f = math.nan, math.inf
    return OracleResult(
        avg_fidelity=mean_f,
        p_succ=p_hat,
        per_outcome_freq={xy: counts[k] / N for k, xy in enumerate(OUTCOMES)},
        se_avg_fidelity=se_f,
        se_p_succ=se_p,
        num_samples=N,
        num_success=n_succ,
        seed=cfg.seed,
    )


def within_sigma(exact: float, estimate: float, se: float, k: float = 3.0) -> bool:
    """``|exact - estimate| <= k * se``, with a rounding floor for zero-variance estimates."""
    return abs(exact - estimate) <= k * se + 1e-12
