"""Isotropic (Haar) measure over pure states.

States are parametrized by generalized polar/azimuthal angles

    xi = (theta_1 .. theta_{D-1}, phi_1 .. phi_{D-1}),
    theta_k in [0, pi/2),  phi_k in [0, 2*pi),

with components

    c_0     = cos(theta_1)
    c_k     = e^{i phi_k} sin(theta_1)..sin(theta_k) cos(theta_{k+1}),  1 <= k <= D-2
    c_{D-1} = e^{i phi_{D-1}} sin(theta_1)..sin(theta_{D-1})

and volume density (with respect to d(xi))

    (D! / pi^{D-1}) * prod_k cos(theta_k) sin^{2(D-k)-1}(theta_k),

which integrates to D over the full angle box. The sine exponent falls
with k because theta_1 multiplies every component after the first: the
exponent of each angle is one less than twice the number of components
it appears in. (Pairing the exponents with the angles in the opposite
order leaves the total volume unchanged but skews the sampled states;
the moment checks against the Gaussian sampler detect that immediately.)
Sampling the probability measure (density / D) factorizes per angle:
theta_k has CDF sin^{2(D-k)}(theta), inverted exactly, and each phi_k is
uniform.

Two samplers are provided on purpose: the angle-based one exercises the
parametrization above, while the Gaussian one (normalize a vector of iid
standard complex normals) is a structurally independent construction of
the same measure, used as a cross-check.

Determinism and sharding: batches are generated in fixed-size chunks,
chunk c seeded by ``SeedSequence(seed, spawn_key=(sampler_code, c))``.
Worker count only distributes chunks, never changes the chunk grid or the
reduction order, so results are identical for any shard count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .exceptions import EmptyBatchError, InvalidDimensionError, NumericalInconsistencyError
from .hilbert import TOL_EXACT, PureState, _canonical_phase

CHUNK_SIZE = 16384
_HALF_PI = math.pi / 2.0
_TWO_PI = 2.0 * math.pi
_SAMPLER_CODES = {"angles": 0, "gaussian": 1}

__all__ = [
    "CHUNK_SIZE",
    "HypersphericalCoords",
    "SampleBatch",
    "coords_to_state",
    "volume_density",
    "volume_density_grid",
    "sample_haar_angles",
    "sample_haar_gaussian",
    "moment_check",
    "chunk_ranges",
    "ordered_chunk_map",
]


@dataclass(frozen=True)
class HypersphericalCoords:
    """Angle vector for one pure state; dimension is ``len(thetas) + 1``."""

    thetas: np.ndarray
    phis: np.ndarray

    def __post_init__(self) -> None:
        thetas = np.ascontiguousarray(self.thetas, dtype=float)
        phis = np.ascontiguousarray(self.phis, dtype=float)
        if thetas.ndim != 1 or phis.ndim != 1 or thetas.size != phis.size or thetas.size < 1:
            raise InvalidDimensionError("need equal-length, non-empty theta and phi vectors")
        if np.any(thetas < 0.0) or np.any(thetas >= _HALF_PI):
            raise InvalidDimensionError("thetas must lie in [0, pi/2)")
        if np.any(phis < 0.0) or np.any(phis >= _TWO_PI):
            raise InvalidDimensionError("phis must lie in [0, 2*pi)")
        thetas.setflags(write=False)
        phis.setflags(write=False)
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "phis", phis)

    @property
    def dim(self) -> int:
        return self.thetas.size + 1


def _states_from_angles(thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """Vectorized state construction; thetas/phis have shape (n, d-1)."""
    n, dm1 = thetas.shape
    d = dm1 + 1
    sin_cum = np.cumprod(np.sin(thetas), axis=1)
    cos = np.cos(thetas)
    phase = np.exp(1j * phis)
    kets = np.empty((n, d), dtype=np.complex128)
    kets[:, 0] = cos[:, 0]
    for k in range(1, d - 1):
        kets[:, k] = phase[:, k - 1] * sin_cum[:, k - 1] * cos[:, k]
    kets[:, d - 1] = phase[:, d - 2] * sin_cum[:, d - 2]
    return kets


def coords_to_state(xi: HypersphericalCoords) -> PureState:
    """Map one angle vector to its pure state."""
    kets = _states_from_angles(xi.thetas[None, :], xi.phis[None, :])
    return PureState(kets[0])


def volume_density_grid(thetas: np.ndarray, d: int) -> np.ndarray:
    """Volume density evaluated on an array of theta vectors.

    ``thetas`` has shape (..., d-1); the density does not depend on the
    phis. Vectorized for quadrature grids.
    """
    thetas = np.asarray(thetas, dtype=float)
    if thetas.shape[-1] != d - 1:
        raise InvalidDimensionError(f"expected {d - 1} thetas per point, got {thetas.shape[-1]}")
    k = np.arange(1, d)
    factors = np.cos(thetas) * np.sin(thetas) ** (2 * (d - k) - 1)
    return math.factorial(d) / math.pi ** (d - 1) * np.prod(factors, axis=-1)


def volume_density(xi: HypersphericalCoords, d: int) -> float:
    """Volume density at one angle vector."""
    if xi.dim != d:
        raise InvalidDimensionError(f"coords are for dimension {xi.dim}, not {d}")
    return float(volume_density_grid(xi.thetas, d))


@dataclass(frozen=True)
class SampleBatch:
    """A deterministic batch of unit-norm sample states (rows of ``states``)."""

    dim: int
    states: np.ndarray
    seed: int
    sampler_id: str

    def __post_init__(self) -> None:
        states = np.ascontiguousarray(self.states, dtype=np.complex128)
        if states.ndim != 2 or states.shape[1] != self.dim:
            raise InvalidDimensionError(f"states must be (n, {self.dim}), got {states.shape}")
        if states.shape[0] == 0:
            raise EmptyBatchError("batch contains no states")
        if self.sampler_id not in _SAMPLER_CODES:
            raise InvalidDimensionError(f"unknown sampler_id {self.sampler_id!r}")
        norms = np.linalg.norm(states, axis=1)
        worst = float(np.max(np.abs(norms - 1.0)))
        if worst > TOL_EXACT:
            raise NumericalInconsistencyError(f"batch contains a state with norm error {worst:g}")
        states = _canonical_rows(states)
        states.setflags(write=False)
        object.__setattr__(self, "states", states)

    @property
    def n(self) -> int:
        return self.states.shape[0]

    def state(self, i: int) -> PureState:
        return PureState(self.states[i])


def _canonical_rows(states: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(states) > TOL_EXACT, axis=1)
    pivots = states[np.arange(states.shape[0]), idx]
    return states * (pivots.conj() / np.abs(pivots))[:, None]


def chunk_ranges(n: int):
    """Fixed chunk grid (c, start, stop) covering range(n)."""
    return [
        (c, start, min(n, start + CHUNK_SIZE))
        for c, start in enumerate(range(0, n, CHUNK_SIZE))
    ]


def ordered_chunk_map(fn, n_chunks: int, shards: int = 1) -> list:
    """Apply ``fn`` to every chunk index, reducing in chunk order.

    ``shards`` only sets the worker count; the result list is always
    ordered by chunk index, so it is byte-stable across shard counts.
    """
    if shards <= 1 or n_chunks <= 1:
        return [fn(c) for c in range(n_chunks)]
    with ThreadPoolExecutor(max_workers=shards) as pool:
        return list(pool.map(fn, range(n_chunks)))


def _chunk_rng(seed: int, sampler_id: str, chunk_index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(seed, spawn_key=(_SAMPLER_CODES[sampler_id], chunk_index))
    return np.random.Generator(np.random.PCG64(seq))


def _angles_chunk(d: int, m: int, rng: np.random.Generator):
    """Draw m angle vectors by exact inverse CDF per angle."""
    u_theta = rng.random((m, d - 1))
    u_phi = rng.random((m, d - 1))
    k = np.arange(1, d)
    thetas = np.arcsin(u_theta ** (1.0 / (2.0 * (d - k))))
    # u < 1 puts theta below pi/2 exactly; rounding can still land on the
    # boundary, which the coordinate range excludes.
    np.minimum(thetas, np.nextafter(_HALF_PI, 0.0), out=thetas)
    phis = _TWO_PI * u_phi
    return thetas, phis


def _check_sampling_args(d: int, n: int) -> None:
    if d < 2:
        raise InvalidDimensionError(f"need dimension >= 2, got {d}")
    if n < 1:
        raise EmptyBatchError(f"need at least one sample, got {n}")


def sample_haar_angles(d: int, n: int, seed: int, shards: int = 1) -> SampleBatch:
    """Sample n states through the angle parametrization."""
    _check_sampling_args(d, n)

    def one_chunk(c: int) -> np.ndarray:
        _, start, stop = ranges[c]
        thetas, phis = _angles_chunk(d, stop - start, _chunk_rng(seed, "angles", c))
        return _states_from_angles(thetas, phis)

    ranges = chunk_ranges(n)
    parts = ordered_chunk_map(one_chunk, len(ranges), shards)
    return SampleBatch(dim=d, states=np.vstack(parts), seed=seed, sampler_id="angles")


def sample_haar_gaussian(d: int, n: int, seed: int, shards: int = 1) -> SampleBatch:
    """Sample n states by normalizing iid standard complex Gaussian vectors."""
    _check_sampling_args(d, n)

    def one_chunk(c: int) -> np.ndarray:
        _, start, stop = ranges[c]
        z = _chunk_rng(seed, "gaussian", c).standard_normal((stop - start, d, 2))
        kets = z[:, :, 0] + 1j * z[:, :, 1]
        return kets / np.linalg.norm(kets, axis=1)[:, None]

    ranges = chunk_ranges(n)
    parts = ordered_chunk_map(one_chunk, len(ranges), shards)
    return SampleBatch(dim=d, states=np.vstack(parts), seed=seed, sampler_id="gaussian")


def moment_check(batch: SampleBatch, shards: int = 1):
    """First and second moment operators of a batch.

    Returns (mean of |phi><phi|, mean of |phi><phi| (x) |phi><phi|). For
    the isotropic measure these converge to I/d and twice the symmetric
    projector over d(d+1).
    """
    d = batch.dim

    def one_chunk(c: int):
        _, start, stop = ranges[c]
        first = np.zeros((d, d), dtype=np.complex128)
        second = np.zeros((d * d, d * d), dtype=np.complex128)
        kernels.moment_accum(batch.states[start:stop], first, second)
        return first, second

    ranges = chunk_ranges(batch.n)
    first = np.zeros((d, d), dtype=np.complex128)
    second = np.zeros((d * d, d * d), dtype=np.complex128)
    for part_first, part_second in ordered_chunk_map(one_chunk, len(ranges), shards):
        first += part_first
        second += part_second
    return first / batch.n, second / batch.n
