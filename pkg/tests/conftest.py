import itertools
import math

import numpy as np
import pytest

from qdarwin.hilbert import StateVector, SubsystemLayout


def brute_partial_trace(amps, dims, keep):
    """Reduced density matrix by explicit summation over the traced digits."""
    keep = list(keep)
    gone = [i for i in range(len(dims)) if i not in keep]
    kd = [dims[i] for i in keep]
    out = np.zeros((math.prod(kd),) * 2, dtype=complex)
    psi = np.asarray(amps).reshape(dims)
    for r in itertools.product(*(range(d) for d in kd)):
        for c in itertools.product(*(range(d) for d in kd)):
            acc = 0j
            for g in itertools.product(*(range(dims[i]) for i in gone)):
                ir, ic = [0] * len(dims), [0] * len(dims)
                for pos, k in enumerate(keep):
                    ir[k], ic[k] = r[pos], c[pos]
                for pos, k in enumerate(gone):
                    ir[k] = ic[k] = g[pos]
                acc += psi[tuple(ir)] * np.conj(psi[tuple(ic)])
            out[np.ravel_multi_index(r, kd), np.ravel_multi_index(c, kd)] = acc
    return out


def brute_entropy(rho):
    w = np.linalg.eigvalsh(rho)
    w = w[w > 1e-12]
    return float(-np.sum(w * np.log2(w)))


def random_state(layout: SubsystemLayout, rng) -> StateVector:
    n = layout.total_dim
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return StateVector(layout, v / np.linalg.norm(v))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
