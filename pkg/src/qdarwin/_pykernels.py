"""Numpy fallback for the compiled kernels.

Works through reshape/transpose on the full index tensor rather than offset
tables, so it doubles as an independent cross-check of ``_ckernels``.
"""
from __future__ import annotations

import numpy as np


def offsets(dims: np.ndarray, idx: np.ndarray) -> np.ndarray:
    dims = [int(d) for d in dims]
    strides = np.cumprod([1] + dims[::-1])[:-1][::-1]
    out = np.zeros(1, dtype=np.intp)
    for j in idx:
        out = (out[:, None] + np.arange(dims[j], dtype=np.intp) * strides[j]).ravel()
    return out


def gather(amps: np.ndarray, dims: tuple[int, ...], rows: tuple[int, ...],
           cols: tuple[int, ...]) -> np.ndarray:
    psi = amps.reshape(dims)
    nr = int(np.prod([dims[i] for i in rows], dtype=np.int64))
    return np.ascontiguousarray(np.transpose(psi, rows + cols).reshape(nr, -1))


def apply_local(amps: np.ndarray, dims: tuple[int, ...], targets: tuple[int, ...],
                u: np.ndarray) -> np.ndarray:
    rest = tuple(i for i in range(len(dims)) if i not in targets)
    perm = targets + rest
    psi = np.transpose(amps.reshape(dims), perm).reshape(u.shape[0], -1)
    psi = (u @ psi).reshape([dims[i] for i in perm])
    return np.ascontiguousarray(np.transpose(psi, np.argsort(perm))).reshape(-1)
