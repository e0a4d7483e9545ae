"""Divergence operators quantifying how differently two subsystems respond
to the same measurement.

Three constructions of the same object:

* ``divergence_discrete``: (1/2) sum_i (E_A(i) (x) 1 - 1 (x) E_B(i))^2 for
  finite POVMs paired by outcome index.
* ``divergence_isotropic_mc``: Monte Carlo integration of the continuous
  isotropic-POVM version over Haar samples. Contains no subspace-projector
  logic, so it is the independent check on the closed form below.
* ``divergence_isotropic_closed``: ((d-1)/(d+1)) P_sym + P_antisym.

The closed form's orientation (the small eigenvalue on the symmetric
subspace) is the one consistent with the physics: symmetric joint states
minimize the divergence, the antisymmetric ones maximize it. Reports tag
this choice as ``eq6_orientation = "text_consistent"`` and the Monte Carlo
agreement test is what pins it down.

The mean divergence of any joint state against the closed form lies in
[(d-1)/(d+1), 1]; a value outside (beyond 1e-9) signals a broken
construction and raises.

``Remap`` re-pairs the two continuous measurements through a state map
``f(phi) = kernel . conj(phi)`` (or ``kernel . phi`` for the plain linear
variant, which is what makes the identity function representable). Kernels
proportional to a unitary leave the isotropic measure invariant, which the
remapped integral requires. For a maximally entangled joint pure state,
``correlation_remap`` returns the kernel that makes the remapped mean
divergence vanish.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .exceptions import (
    InvalidDimensionError,
    NotMaximallyEntangledError,
    NumericalInconsistencyError,
    PairingError,
)
from .haar import SampleBatch, chunk_ranges, ordered_chunk_map, sample_haar_angles, sample_haar_gaussian
from .hilbert import (
    TOL_ACCUM,
    DensityMatrix,
    Povm,
    PureState,
    antisym_projector,
    as_operator,
    expectation,
    hermiticity_defect,
    sym_projector,
    tensor,
)

BOUND_TOL = 1e-9

_SAMPLERS = {"angles": sample_haar_angles, "gaussian": sample_haar_gaussian}

__all__ = [
    "BOUND_TOL",
    "DivergenceOperator",
    "Remap",
    "divergence_bounds",
    "divergence_discrete",
    "divergence_isotropic_mc",
    "divergence_isotropic_closed",
    "mean_divergence",
    "identity_remap",
    "conjugation_remap",
    "inversion_remap",
    "correlation_remap",
    "divergence_remapped_mc",
    "haar_discretized_povm",
]


def divergence_bounds(d: int) -> tuple[float, float]:
    """Attainable range of the isotropic mean divergence."""
    return (d - 1) / (d + 1), 1.0


@dataclass(frozen=True)
class DivergenceOperator:
    """Hermitian operator on the joint space, with provenance metadata.

    ``provenance`` is one of ``discrete``, ``monte_carlo``, ``closed_form``.
    Exact constructions must have spectrum inside [0, 1]; Monte Carlo
    estimates are exempt because sampling noise can overshoot.
    """

    dim_local: int
    matrix: np.ndarray
    provenance: str
    mc_meta: dict | None = None

    def __post_init__(self) -> None:
        if self.provenance not in ("discrete", "monte_carlo", "closed_form"):
            raise InvalidDimensionError(f"unknown provenance {self.provenance!r}")
        op = as_operator(self.matrix)
        d2 = self.dim_local * self.dim_local
        if op.shape[0] != d2:
            raise InvalidDimensionError(
                f"operator dimension {op.shape[0]} is not dim_local**2 = {d2}"
            )
        defect = hermiticity_defect(op)
        if defect > TOL_ACCUM:
            raise NumericalInconsistencyError(f"divergence operator hermiticity defect {defect:g}")
        if self.provenance in ("discrete", "closed_form"):
            eigs = np.linalg.eigvalsh(op)
            if eigs[0] < -BOUND_TOL or eigs[-1] > 1.0 + BOUND_TOL:
                raise NumericalInconsistencyError(
                    f"spectrum [{eigs[0]:g}, {eigs[-1]:g}] escapes [0, 1]"
                )
        op.setflags(write=False)
        object.__setattr__(self, "matrix", op)

    @property
    def dim_joint(self) -> int:
        return self.matrix.shape[0]

    def spectrum(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def divergence_discrete(povm_a: Povm, povm_b: Povm) -> DivergenceOperator:
    """Divergence operator of two finite POVMs paired by outcome index."""
    if povm_a.dim != povm_b.dim:
        raise PairingError(f"local dimensions differ: {povm_a.dim} vs {povm_b.dim}")
    if povm_a.n_outcomes != povm_b.n_outcomes:
        raise PairingError(
            f"outcome counts differ: {povm_a.n_outcomes} vs {povm_b.n_outcomes}"
        )
    d = povm_a.dim
    eye = np.eye(d, dtype=np.complex128)
    total = np.zeros((d * d, d * d), dtype=np.complex128)
    for ea, eb in zip(povm_a.effects, povm_b.effects):
        diff = tensor(ea, eye) - tensor(eye, eb)
        total += diff @ diff
    return DivergenceOperator(dim_local=d, matrix=total / 2.0, provenance="discrete")


def _pair_mc_sum(states_a: np.ndarray, states_b: np.ndarray, shards: int) -> np.ndarray:
    """Ordered chunked accumulation of sum_s (E_a (x) 1 - 1 (x) E_b)^2."""
    n, d = states_a.shape

    def one_chunk(c: int) -> np.ndarray:
        _, start, stop = ranges[c]
        part = np.zeros((d * d, d * d), dtype=np.complex128)
        kernels.pair_divergence_accum(states_a[start:stop], states_b[start:stop], part)
        return part

    ranges = chunk_ranges(n)
    total = np.zeros((d * d, d * d), dtype=np.complex128)
    for part in ordered_chunk_map(one_chunk, len(ranges), shards):
        total += part
    return total


def _make_batch(d: int, n: int, seed: int, sampler: str, shards: int) -> SampleBatch:
    try:
        sample = _SAMPLERS[sampler]
    except KeyError:
        raise InvalidDimensionError(f"unknown sampler {sampler!r}") from None
    return sample(d, n, seed, shards)


def divergence_isotropic_mc(
    d: int,
    n: int,
    seed: int,
    sampler: str = "angles",
    shards: int = 1,
) -> DivergenceOperator:
    """Monte Carlo estimate of the isotropic continuous divergence.

    Averages (1/2)(E(phi) (x) 1 - 1 (x) E(phi))^2 over Haar samples and
    rescales by d, the total isotropic volume.
    """
    batch = _make_batch(d, n, seed, sampler, shards)
    total = _pair_mc_sum(batch.states, batch.states, shards)
    estimate = total * (d / (2.0 * n))
    return DivergenceOperator(
        dim_local=d,
        matrix=estimate,
        provenance="monte_carlo",
        mc_meta={"n_samples": n, "seed": seed, "sampler": sampler},
    )


def divergence_isotropic_closed(d: int) -> DivergenceOperator:
    """Closed form ((d-1)/(d+1)) P_sym + P_antisym.

    Spectrum: (d-1)/(d+1) with multiplicity d(d+1)/2 and 1 with
    multiplicity d(d-1)/2.
    """
    if d < 2:
        raise InvalidDimensionError(f"need dimension >= 2, got {d}")
    low, high = divergence_bounds(d)
    matrix = low * sym_projector(d) + high * antisym_projector(d)
    return DivergenceOperator(dim_local=d, matrix=matrix, provenance="closed_form")


def mean_divergence(rho: DensityMatrix, source: DivergenceOperator) -> float:
    """Tr[rho . C]; enforces the [(d-1)/(d+1), 1] bounds for closed form."""
    value = expectation(rho, source.matrix)
    if source.provenance == "closed_form":
        low, high = divergence_bounds(source.dim_local)
        if value < low - BOUND_TOL or value > high + BOUND_TOL:
            raise NumericalInconsistencyError(
                f"mean divergence {value!r} escapes [{low}, {high}]: "
                "the projector construction is broken"
            )
    return value


@dataclass(frozen=True)
class Remap:
    """Measurement re-pairing map f(phi) = kernel . conj(phi) (or
    kernel . phi when ``conjugate`` is False).

    The kernel must be proportional to a unitary; that is what keeps the
    pushforward of the isotropic measure isotropic.
    """

    dim: int
    kernel: np.ndarray
    conjugate: bool = True

    def __post_init__(self) -> None:
        kernel = as_operator(self.kernel)
        if kernel.shape[0] != self.dim:
            raise InvalidDimensionError(
                f"kernel dimension {kernel.shape[0]} does not match {self.dim}"
            )
        gram = kernel.conj().T @ kernel
        scale = float(np.real(np.trace(gram))) / self.dim
        if scale <= 0.0 or np.max(np.abs(gram - scale * np.eye(self.dim))) > TOL_ACCUM * max(scale, 1.0):
            raise NumericalInconsistencyError(
                "remap kernel is not proportional to a unitary; it would distort the measure"
            )
        kernel.setflags(write=False)
        object.__setattr__(self, "kernel", kernel)

    def apply_batch(self, states: np.ndarray) -> np.ndarray:
        """Map an (n, d) array of kets; rows are renormalized and given
        canonical phase."""
        source = states.conj() if self.conjugate else states
        image = source @ self.kernel.T
        image /= np.linalg.norm(image, axis=1)[:, None]
        from .haar import _canonical_rows

        return _canonical_rows(image)

    def apply(self, state: PureState) -> PureState:
        return PureState(self.apply_batch(state.amplitudes[None, :])[0])


def identity_remap(d: int) -> Remap:
    """f(phi) = phi; reduces the remapped divergence to the plain one."""
    return Remap(dim=d, kernel=np.eye(d, dtype=np.complex128), conjugate=False)


def conjugation_remap(d: int) -> Remap:
    """f(phi) = conj(phi); matches the |00..> + |11..> style joint state."""
    return Remap(dim=d, kernel=np.eye(d, dtype=np.complex128), conjugate=True)


def inversion_remap() -> Remap:
    """Qubit inversion: maps every state to its orthogonal complement."""
    kernel = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=np.complex128)
    return Remap(dim=2, kernel=kernel, conjugate=True)


def correlation_remap(psi: PureState) -> Remap:
    """Remap aligning the two halves of a maximally entangled pure state.

    Reshaping the joint amplitudes into a d x d matrix M (row = left
    subsystem) must give sqrt(d) M unitary; the kernel is sqrt(d) M and
    the joint density P(phi, f(phi)) is then flat at 1/d.
    """
    d = int(round(np.sqrt(psi.dim)))
    if d * d != psi.dim or d < 2:
        raise InvalidDimensionError(f"state dimension {psi.dim} is not a square of d >= 2")
    m = psi.amplitudes.reshape(d, d)
    kernel = np.sqrt(d) * m
    singular = np.linalg.svd(kernel, compute_uv=False)
    if np.max(np.abs(singular - 1.0)) > 1e-8:
        raise NotMaximallyEntangledError(
            "state is not maximally entangled: singular values of the scaled "
            f"reshape are {singular.tolist()}"
        )
    return Remap(dim=d, kernel=kernel, conjugate=True)


def divergence_remapped_mc(
    rho: DensityMatrix,
    remap: Remap,
    n: int,
    seed: int,
    sampler: str = "angles",
    shards: int = 1,
) -> float:
    """Mean of the remapped divergence on ``rho`` by Monte Carlo.

    Integrates Tr[rho (E(phi) (x) 1 - 1 (x) E(f(phi)))^2] / 2 over the
    isotropic measure (rescaled by d as in the unremapped case). Zero for
    a maximally entangled state paired with its correlation remap.
    """
    d = remap.dim
    if rho.dim != d * d:
        raise InvalidDimensionError(f"state dimension {rho.dim} is not {d * d}")
    batch = _make_batch(d, n, seed, sampler, shards)
    total = _pair_mc_sum(batch.states, remap.apply_batch(batch.states), shards)
    operator = total * (d / (2.0 * n))
    value = complex(np.einsum("ij,ji->", rho.matrix, operator))
    if abs(value.imag) > TOL_ACCUM:
        raise NumericalInconsistencyError(f"remapped mean has imaginary part {value.imag:g}")
    return float(value.real)


def haar_discretized_povm(d: int, k: int, seed: int, sampler: str = "angles") -> Povm:
    """Finite rank-1 POVM approximating the isotropic continuous one.

    k Haar samples weighted d/k almost resolve the identity; the residual
    is removed by the symmetric correction T^{-1/2} E T^{-1/2}, which the
    strict completeness invariant of ``Povm`` requires. As k grows,
    ``divergence_discrete`` of this POVM converges to the closed form.
    """
    batch = _make_batch(d, k, seed, sampler, shards=1)
    projectors = np.einsum("sj,sk->sjk", batch.states, batch.states.conj())
    total = (d / k) * projectors.sum(axis=0)
    eigs, vecs = np.linalg.eigh(total)
    if eigs[0] <= 0.0:
        raise NumericalInconsistencyError("discretization is rank deficient; increase k")
    inv_sqrt = (vecs / np.sqrt(eigs)) @ vecs.conj().T
    effects = (d / k) * np.einsum("ij,sjk,kl->sil", inv_sqrt, projectors, inv_sqrt)
    # Re-symmetrize entries before the Povm hermiticity gate.
    effects = (effects + effects.conj().transpose(0, 2, 1)) / 2.0
    return Povm(d, tuple(effects))
