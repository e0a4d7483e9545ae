"""Pure-numpy kernels, the fallback when the compiled extension is absent.

Same call signatures as ``qudiv._kernels``. Inputs are (n, d) complex
arrays of unit-norm kets; ``out`` arrays are accumulated in place.
Internally the batch is blocked to bound the (n, d^2, d^2) temporaries.
"""

from __future__ import annotations

import numpy as np

# Cap on d**4-sized temporaries per block (~120 MB of complex128 across
# the three intermediates at this setting).
_BLOCK_ENTRIES = 2_000_000


def _blocks(n: int, d: int):
    step = max(1, _BLOCK_ENTRIES // max(1, d**4))
    for start in range(0, n, step):
        yield start, min(n, start + step)


def pair_divergence_accum(kets_a: np.ndarray, kets_b: np.ndarray, out: np.ndarray) -> None:
    """Accumulate sum_s (E_a(s) (x) I - I (x) E_b(s))^2 into ``out``.

    E_a/E_b are the rank-1 projectors onto the sample kets; the square is
    evaluated literally by matrix multiplication so this path stays an
    independent check on any algebraic simplification elsewhere.
    """
    n, d = kets_a.shape
    eye = np.eye(d, dtype=np.complex128)
    for start, stop in _blocks(n, d):
        a = kets_a[start:stop]
        b = kets_b[start:stop]
        ea = a[:, :, None] * a[:, None, :].conj()
        eb = b[:, :, None] * b[:, None, :].conj()
        left = np.einsum("sjk,pq->sjpkq", ea, eye).reshape(len(a), d * d, d * d)
        right = np.einsum("jk,spq->sjpkq", eye, eb).reshape(len(a), d * d, d * d)
        diff = left - right
        out += np.einsum("sij,sjk->ik", diff, diff)


def moment_accum(kets: np.ndarray, out1: np.ndarray, out2: np.ndarray) -> None:
    """Accumulate sum_s |phi><phi| into ``out1`` and its two-copy tensor
    square into ``out2`` (joint-space d^2 x d^2 layout)."""
    n, d = kets.shape
    for start, stop in _blocks(n, d):
        a = kets[start:stop]
        ac = a.conj()
        out1 += np.einsum("sj,sk->jk", a, ac)
        second = np.einsum("sj,sk,sp,sq->jpkq", a, ac, a, ac, optimize=True)
        out2 += second.reshape(d * d, d * d)
