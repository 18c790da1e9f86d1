# cython: language_level=3
"""Compiled kernels for subsystem gathers and local unitaries.

Amplitudes are addressed through offset tables: for a chosen ordered set of
subsystems, ``offsets[r]`` is the flat-index contribution of the r-th digit
combination.  A flat index splits as ``row_offsets[r] + col_offsets[c]`` for
any partition of the subsystems into rows and columns.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def offsets(Py_ssize_t[::1] dims, Py_ssize_t[::1] idx):
    """Flat-index offsets of every digit combination of ``idx`` (first is most significant)."""
    cdef Py_ssize_t n = dims.shape[0]
    cdef Py_ssize_t m = idx.shape[0]
    cdef Py_ssize_t i, j, k, a, d, stride, size, b, nb
    cdef bint qubits = True
    for i in range(n):
        if dims[i] != 2:
            qubits = False
            break

    size = 1
    for j in range(m):
        size *= dims[idx[j]]
    out_arr = np.zeros(size, dtype=np.intp)
    cdef Py_ssize_t[::1] out = out_arr
    cdef Py_ssize_t[::1] pos

    if qubits:
        # bit j of the combination (msb first) lands on bit (n-1-idx[j]) of the flat index
        pos = np.empty(m, dtype=np.intp)
        for j in range(m):
            pos[j] = n - 1 - idx[j]
        with nogil:
            for b in range(size):
                nb = 0
                for j in range(m):
                    if (b >> (m - 1 - j)) & 1:
                        nb |= (<Py_ssize_t>1) << pos[j]
                out[b] = nb
        return out_arr

    cdef Py_ssize_t[::1] strides = np.empty(n, dtype=np.intp)
    stride = 1
    for i in range(n - 1, -1, -1):
        strides[i] = stride
        stride *= dims[i]
    cdef Py_ssize_t filled = 1
    with nogil:
        for j in range(m):
            d = dims[idx[j]]
            stride = strides[idx[j]]
            # expand in place from the back so earlier entries are read before overwrite
            for a in range(filled - 1, -1, -1):
                for k in range(d - 1, -1, -1):
                    out[a * d + k] = out[a] + k * stride
            filled *= d
    return out_arr


def gather(const double complex[::1] src,
           const Py_ssize_t[::1] row_off,
           const Py_ssize_t[::1] col_off):
    """Return the matrix ``M[r, c] = src[row_off[r] + col_off[c]]``."""
    cdef Py_ssize_t nr = row_off.shape[0]
    cdef Py_ssize_t nc = col_off.shape[0]
    cdef Py_ssize_t r, c, base
    out_arr = np.empty((nr, nc), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    with nogil:
        for r in range(nr):
            base = row_off[r]
            for c in range(nc):
                out[r, c] = src[base + col_off[c]]
    return out_arr


def apply_local(const double complex[::1] src,
                const Py_ssize_t[::1] tgt_off,
                const Py_ssize_t[::1] rest_off,
                const double complex[:, ::1] u):
    """Apply ``u`` on the target digits, identity on the rest; returns a new vector."""
    cdef Py_ssize_t dt = tgt_off.shape[0]
    cdef Py_ssize_t nc = rest_off.shape[0]
    cdef Py_ssize_t r, s, c, base
    cdef double complex acc
    dst_arr = np.empty(src.shape[0], dtype=np.complex128)
    cdef double complex[::1] dst = dst_arr
    buf_arr = np.empty(dt, dtype=np.complex128)
    cdef double complex[::1] buf = buf_arr
    with nogil:
        for c in range(nc):
            base = rest_off[c]
            for s in range(dt):
                buf[s] = src[base + tgt_off[s]]
            for r in range(dt):
                acc = 0
                for s in range(dt):
                    acc = acc + u[r, s] * buf[s]
                dst[base + tgt_off[r]] = acc
    return dst_arr
