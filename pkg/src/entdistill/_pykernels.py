"""Pure-Python kernels.

Same call signatures as the compiled ``_ckernels`` module.  Matrices travel as
flat row-major sequences of ``complex``.  Used when the extension is not built
or when ``ENTDISTILL_PURE_PYTHON`` is set.
"""

import math

NAME = "python"

_SQRT_HALF = math.sqrt(0.5)


def matmul(a, b, n, k, m):
    out = [0j] * (n * m)
    for i in range(n):
        row = a[i * k:(i + 1) * k]
        for j in range(m):
            acc = 0j
            for t in range(k):
                acc += row[t] * b[t * m + j]
            out[i * m + j] = acc
    return out


def kron(a, ar, ac, b, br, bc):
    cols = ac * bc
    out = [0j] * (ar * br * cols)
    for i in range(ar):
        for j in range(ac):
            aij = a[i * ac + j]
            if aij == 0:
                continue
            for k in range(br):
                base = (i * br + k) * cols + j * bc
                brow = k * bc
                for l in range(bc):
                    out[base + l] = aij * b[brow + l]
    return out


def sandwich(u, rho, n):
    """Return ``u @ rho @ u^dagger`` for n x n operands."""
    tmp = matmul(u, rho, n, n, n)
    out = [0j] * (n * n)
    for i in range(n):
        row = tmp[i * n:(i + 1) * n]
        for j in range(n):
            acc = 0j
            urow = j * n
            for t in range(n):
                acc += row[t] * u[urow + t].conjugate()
            out[i * n + j] = acc
    return out


def _evolve_pure(u, c0, c1):
    psi0 = (_SQRT_HALF, 0.0, 0.0, _SQRT_HALF) if c0 else (1.0, 0.0, 0.0, 0.0)
    psi1 = (_SQRT_HALF, 0.0, 0.0, _SQRT_HALF) if c1 else (1.0, 0.0, 0.0, 0.0)
    psi = [complex(psi0[i // 4] * psi1[i % 4]) for i in range(16)]
    out = []
    for i in range(16):
        acc = 0j
        for j in range(16):
            acc += u[i * 16 + j] * psi[j]
        out.append(acc)
    probs = []
    fids = []
    for k in range(4):
        pk = 0.0
        for ab in range(4):
            z = out[4 * ab + k]
            pk += z.real * z.real + z.imag * z.imag
        probs.append(pk)
        if pk > 0.0:
            amp = out[k] + out[12 + k]
            fids.append((amp.real * amp.real + amp.imag * amp.imag) / (2.0 * pk))
        else:
            fids.append(0.0)
    cum = []
    acc = 0.0
    for pk in probs:
        acc += pk
        cum.append(acc)
    last = max(k for k in range(4) if probs[k] > 0.0)
    return cum, fids, last


def trajectories(u, fidelity, flip, success, uniforms, n):
    """Run ``n`` statevector trajectories, five uniforms per sample.

    The four possible initial product states are evolved once and reused;
    every trajectory from the same initial state is deterministic up to the
    measurement draw, so this is the same computation as evolving per sample.

    Returns ``(n_success, sum_fid, sum_fid_sq, outcome_counts)``.
    """
    table = {(c0, c1): _evolve_pure(u, c0, c1) for c0 in (0, 1) for c1 in (0, 1)}
    n_succ = 0
    sum_f = 0.0
    sum_f2 = 0.0
    counts = [0, 0, 0, 0]
    for s in range(n):
        base = 5 * s
        c0 = 1 if uniforms[base] < fidelity else 0
        c1 = 1 if uniforms[base + 1] < fidelity else 0
        cum, fids, last = table[(c0, c1)]
        draw = uniforms[base + 2]
        k = last
        for idx in range(4):
            if draw < cum[idx]:
                k = idx
                break
        counts[k] += 1
        rx = (k >> 1) ^ (1 if uniforms[base + 3] < flip else 0)
        ry = (k & 1) ^ (1 if uniforms[base + 4] < flip else 0)
        if success[2 * rx + ry]:
            n_succ += 1
            f = fids[k]
            sum_f += f
            sum_f2 += f * f
    return n_succ, sum_f, sum_f2, counts
