"""Backend agreement: the compiled kernels and the numpy fallback must
compute the same sums, and both must match a naive per-sample reference."""

import numpy as np
import pytest

from qudiv import _kernels_py

try:
    from qudiv import _kernels
except ImportError:
    _kernels = None

needs_ext = pytest.mark.skipif(_kernels is None, reason="compiled kernels not built")


def random_kets(n, d, seed):
    rng = np.random.default_rng(seed)
    kets = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    return kets / np.linalg.norm(kets, axis=1)[:, None]


def naive_pair_sum(kets_a, kets_b):
    d = kets_a.shape[1]
    eye = np.eye(d, dtype=complex)
    out = np.zeros((d * d, d * d), dtype=complex)
    for a, b in zip(kets_a, kets_b):
        ea = np.outer(a, a.conj())
        eb = np.outer(b, b.conj())
        diff = np.kron(ea, eye) - np.kron(eye, eb)
        out += diff @ diff
    return out


def naive_moment_sums(kets):
    d = kets.shape[1]
    first = np.zeros((d, d), dtype=complex)
    second = np.zeros((d * d, d * d), dtype=complex)
    for ket in kets:
        proj = np.outer(ket, ket.conj())
        first += proj
        second += np.kron(proj, proj)
    return first, second


@pytest.mark.parametrize("d", [2, 3, 4])
def test_fallback_matches_naive(d):
    kets_a = random_kets(64, d, 1)
    kets_b = random_kets(64, d, 2)
    out = np.zeros((d * d, d * d), dtype=complex)
    _kernels_py.pair_divergence_accum(kets_a, kets_b, out)
    assert np.max(np.abs(out - naive_pair_sum(kets_a, kets_b))) <= 1e-12

    first = np.zeros((d, d), dtype=complex)
    second = np.zeros((d * d, d * d), dtype=complex)
    _kernels_py.moment_accum(kets_a, first, second)
    ref1, ref2 = naive_moment_sums(kets_a)
    assert np.max(np.abs(first - ref1)) <= 1e-12
    assert np.max(np.abs(second - ref2)) <= 1e-12


@needs_ext
@pytest.mark.parametrize("d", [2, 3, 4])
def test_backends_agree(d):
    kets_a = random_kets(300, d, 3)
    kets_b = random_kets(300, d, 4)
    out_py = np.zeros((d * d, d * d), dtype=complex)
    out_cy = np.zeros((d * d, d * d), dtype=complex)
    _kernels_py.pair_divergence_accum(kets_a, kets_b, out_py)
    _kernels.pair_divergence_accum(kets_a, kets_b, out_cy)
    assert np.max(np.abs(out_py - out_cy)) <= 1e-12

    first_py = np.zeros((d, d), dtype=complex)
    second_py = np.zeros((d * d, d * d), dtype=complex)
    first_cy = np.zeros((d, d), dtype=complex)
    second_cy = np.zeros((d * d, d * d), dtype=complex)
    _kernels_py.moment_accum(kets_a, first_py, second_py)
    _kernels.moment_accum(kets_a, first_cy, second_cy)
    assert np.max(np.abs(first_py - first_cy)) <= 1e-12
    assert np.max(np.abs(second_py - second_cy)) <= 1e-12


@needs_ext
def test_extension_shape_validation():
    kets = random_kets(8, 2, 5)
    with pytest.raises(ValueError):
        _kernels.pair_divergence_accum(kets, kets[:4], np.zeros((4, 4), dtype=complex))
    with pytest.raises(ValueError):
        _kernels.pair_divergence_accum(kets, kets, np.zeros((3, 3), dtype=complex))
