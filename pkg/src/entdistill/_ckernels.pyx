# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels mirroring ``_pykernels``.

Dense complex products for the exact pipeline and the per-sample statevector
loop of the Monte-Carlo oracle.
"""

from libc.math cimport sqrt
from libc.stdlib cimport free, malloc

NAME = "cython"

cdef double SQRT_HALF = sqrt(0.5)


cdef double complex* _load(seq, Py_ssize_t n) except NULL:
    cdef double complex* buf = <double complex*> malloc(n * sizeof(double complex))
    cdef Py_ssize_t i
    if buf == NULL:
        raise MemoryError()
    try:
        for i in range(n):
            buf[i] = seq[i]
    except BaseException:
        free(buf)
        raise
    return buf


cdef list _dump(double complex* buf, Py_ssize_t n):
    cdef Py_ssize_t i
    return [buf[i] for i in range(n)]


cdef void _matmul(double complex* a, double complex* b, double complex* out,
                  Py_ssize_t n, Py_ssize_t k, Py_ssize_t m) noexcept nogil:
    cdef Py_ssize_t i, j, t
    cdef double complex acc
    for i in range(n):
        for j in range(m):
            acc = 0
            for t in range(k):
                acc = acc + a[i * k + t] * b[t * m + j]
            out[i * m + j] = acc


def matmul(a, b, Py_ssize_t n, Py_ssize_t k, Py_ssize_t m):
    cdef double complex* pa = _load(a, n * k)
    cdef double complex* pb = NULL
    cdef double complex* po = NULL
    try:
        pb = _load(b, k * m)
        po = <double complex*> malloc(n * m * sizeof(double complex))
        if po == NULL:
            raise MemoryError()
        _matmul(pa, pb, po, n, k, m)
        return _dump(po, n * m)
    finally:
        free(pa)
        free(pb)
        free(po)


def kron(a, Py_ssize_t ar, Py_ssize_t ac, b, Py_ssize_t br, Py_ssize_t bc):
    cdef double complex* pa = _load(a, ar * ac)
    cdef double complex* pb = NULL
    cdef double complex* po = NULL
    cdef Py_ssize_t i, j, k, l, cols = ac * bc
    cdef double complex aij
    try:
        pb = _load(b, br * bc)
        po = <double complex*> malloc(ar * br * cols * sizeof(double complex))
        if po == NULL:
            raise MemoryError()
        for i in range(ar):
            for k in range(br):
                for j in range(ac):
                    aij = pa[i * ac + j]
                    for l in range(bc):
                        po[(i * br + k) * cols + j * bc + l] = aij * pb[k * bc + l]
        return _dump(po, ar * br * cols)
    finally:
        free(pa)
        free(pb)
        free(po)


def sandwich(u, rho, Py_ssize_t n):
    """Return ``u @ rho @ u^dagger`` for n x n operands."""
    cdef double complex* pu = _load(u, n * n)
    cdef double complex* pr = NULL
    cdef double complex* tmp = NULL
    cdef double complex* po = NULL
    cdef Py_ssize_t i, j, t
    cdef double complex acc, w
    try:
        pr = _load(rho, n * n)
        tmp = <double complex*> malloc(n * n * sizeof(double complex))
        po = <double complex*> malloc(n * n * sizeof(double complex))
        if tmp == NULL or po == NULL:
            raise MemoryError()
        _matmul(pu, pr, tmp, n, n, n)
        for i in range(n):
            for j in range(n):
                acc = 0
                for t in range(n):
                    w = pu[j * n + t]
                    acc = acc + tmp[i * n + t] * (w.real - 1j * w.imag)
                po[i * n + j] = acc
        return _dump(po, n * n)
    finally:
        free(pu)
        free(pr)
        free(tmp)
        free(po)


def trajectories(u, double fidelity, double flip, success, const double[::1] uniforms,
                 Py_ssize_t n):
    """Run ``n`` statevector trajectories, five uniforms per sample.

    Each sample builds its initial 16-dim product state, applies the full
    circuit unitary, and draws outcome and channel flips.

    Returns ``(n_success, sum_fid, sum_fid_sq, outcome_counts)``.
    """
    if uniforms.shape[0] < 5 * n:
        raise ValueError("need five uniforms per sample")
    cdef double complex* pu = _load(u, 256)
    cdef double complex psi[16]
    cdef double complex out[16]
    cdef double amp0[4]
    cdef double amp1[4]
    cdef double cum[4]
    cdef double probs[4]
    cdef int succ[4]
    cdef long long counts[4]
    cdef long long n_succ = 0
    cdef double sum_f = 0.0, sum_f2 = 0.0, pk, acc_p, f, draw
    cdef double complex acc, z
    cdef Py_ssize_t s, i, j, k, ab, base
    cdef int c0, c1, last, rx, ry
    for k in range(4):
        succ[k] = 1 if success[k] else 0
        counts[k] = 0
    try:
        with nogil:
            for s in range(n):
                base = 5 * s
                c0 = uniforms[base] < fidelity
                c1 = uniforms[base + 1] < fidelity
                if c0:
                    amp0[0] = SQRT_HALF; amp0[1] = 0.0; amp0[2] = 0.0; amp0[3] = SQRT_HALF
                else:
                    amp0[0] = 1.0; amp0[1] = 0.0; amp0[2] = 0.0; amp0[3] = 0.0
                if c1:
                    amp1[0] = SQRT_HALF; amp1[1] = 0.0; amp1[2] = 0.0; amp1[3] = SQRT_HALF
                else:
                    amp1[0] = 1.0; amp1[1] = 0.0; amp1[2] = 0.0; amp1[3] = 0.0
                for i in range(16):
                    psi[i] = amp0[i // 4] * amp1[i % 4]
                for i in range(16):
                    acc = 0
                    for j in range(16):
                        acc = acc + pu[i * 16 + j] * psi[j]
                    out[i] = acc
                acc_p = 0.0
                last = 0
                for k in range(4):
                    pk = 0.0
                    for ab in range(4):
                        z = out[4 * ab + k]
                        pk = pk + z.real * z.real + z.imag * z.imag
                    probs[k] = pk
                    acc_p = acc_p + pk
                    cum[k] = acc_p
                    if pk > 0.0:
                        last = <int> k
                draw = uniforms[base + 2]
                k = last
                for i in range(4):
                    if draw < cum[i]:
                        k = i
                        break
                counts[k] += 1
                rx = (<int> k >> 1) ^ (uniforms[base + 3] < flip)
                ry = (<int> k & 1) ^ (uniforms[base + 4] < flip)
                if succ[2 * rx + ry]:
                    n_succ += 1
                    z = out[k] + out[12 + k]
                    f = (z.real * z.real + z.imag * z.imag) / (2.0 * probs[k])
                    sum_f = sum_f + f
                    sum_f2 = sum_f2 + f * f
    finally:
        free(pu)
    return n_succ, sum_f, sum_f2, [counts[0], counts[1], counts[2], counts[3]]
