"""Backend selection for the hot subsystem kernels.

The compiled extension is used when it imports; otherwise the numpy fallback.
Set ``QDARWIN_BACKEND=python`` to force the fallback.
"""
from __future__ import annotations

import os
from functools import lru_cache

import numpy as np

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = ("cython", "python") if _ckernels is not None else ("python",)

if os.environ.get("QDARWIN_BACKEND", "").lower() == "python" or _ckernels is None:
    BACKEND = "python"
else:
    BACKEND = "cython"


@lru_cache(maxsize=4096)
def offsets(dims: tuple[int, ...], idx: tuple[int, ...]) -> np.ndarray:
    """Cached flat-index offsets for the subsystems ``idx`` of a layout with ``dims``."""
    d = np.asarray(dims, dtype=np.intp)
    i = np.asarray(idx, dtype=np.intp)
    if _ckernels is not None:
        out = _ckernels.offsets(d, i)
    else:
        out = _pykernels.offsets(d, i)
    out.setflags(write=False)
    return out


def gather(amps: np.ndarray, dims: tuple[int, ...], rows: tuple[int, ...],
           cols: tuple[int, ...], backend: str | None = None) -> np.ndarray:
    """Reshape amplitudes into a ``rows x cols`` matrix over the given subsystems.

    ``rows + cols`` must be a permutation of all subsystem indices.
    """
    if (backend or BACKEND) == "cython":
        return _ckernels.gather(amps, offsets(dims, rows), offsets(dims, cols))
    return _pykernels.gather(amps, dims, rows, cols)


def apply_local(amps: np.ndarray, dims: tuple[int, ...], targets: tuple[int, ...],
                u: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Return a new amplitude vector with ``u`` applied to ``targets``."""
    if (backend or BACKEND) == "cython":
        rest = tuple(i for i in range(len(dims)) if i not in targets)
        return _ckernels.apply_local(amps, offsets(dims, targets), offsets(dims, rest),
                                     np.ascontiguousarray(u, dtype=np.complex128))
    return _pykernels.apply_local(amps, dims, targets, u)
