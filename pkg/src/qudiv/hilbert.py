"""Dense complex linear algebra for small Hilbert spaces.

Operators are plain ``numpy.ndarray`` square complex matrices; the joint
index convention is left-factor major throughout: the pair (j_A, j_B)
maps to the flat index ``j_A * dim_B + j_B``, which is exactly numpy's
``kron`` ordering.

Two tolerance tiers are used everywhere in the package:

* ``TOL_EXACT = 1e-12`` for single algebraic constructions,
* ``TOL_ACCUM = 1e-10`` for quantities assembled from many operations
  (mixtures, sums of effects, Monte Carlo accumulators).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidDimensionError, NumericalInconsistencyError

TOL_EXACT = 1e-12
TOL_ACCUM = 1e-10
# Eigenvalues of nominally PSD matrices may dip slightly negative after
# mixing/rounding; this is the accepted slack.
TOL_PSD = -1e-10

__all__ = [
    "TOL_EXACT",
    "TOL_ACCUM",
    "TOL_PSD",
    "PureState",
    "DensityMatrix",
    "Povm",
    "as_operator",
    "hermiticity_defect",
    "is_hermitian",
    "tensor",
    "swap_operator",
    "sym_projector",
    "antisym_projector",
    "expectation",
]


def as_operator(matrix: np.ndarray) -> np.ndarray:
    """Coerce input to a square complex128 matrix."""
    op = np.ascontiguousarray(matrix, dtype=np.complex128)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise InvalidDimensionError(f"operator must be square, got shape {op.shape}")
    return op


def hermiticity_defect(op: np.ndarray) -> float:
    """Largest entrywise deviation of ``op`` from its conjugate transpose."""
    return float(np.max(np.abs(op - op.conj().T)))


def is_hermitian(op: np.ndarray, tol: float = TOL_EXACT) -> bool:
    return hermiticity_defect(op) <= tol


def _canonical_phase(amplitudes: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the first non-negligible amplitude is
    real and non-negative. Makes states defined only up to phase testable
    for equality."""
    idx = int(np.argmax(np.abs(amplitudes) > TOL_EXACT))
    pivot = amplitudes[idx]
    if abs(pivot) <= TOL_EXACT:
        return amplitudes
    return amplitudes * (pivot.conj() / abs(pivot))


@dataclass(frozen=True)
class PureState:
    """A normalized state vector with canonical global phase.

    The constructor requires a vector already normalized to 1e-12; use
    :meth:`normalized` to rescale arbitrary input.
    """

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.size < 1:
            raise InvalidDimensionError("state vector must be a non-empty 1-d array")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > TOL_EXACT:
            raise NumericalInconsistencyError(f"state norm {norm!r} is not 1 within {TOL_EXACT}")
        amps = _canonical_phase(amps)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, vector: np.ndarray) -> "PureState":
        vec = np.asarray(vector, dtype=np.complex128)
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            raise NumericalInconsistencyError("cannot normalize the zero vector")
        return cls(vec / norm)

    @classmethod
    def basis(cls, dim: int, index: int) -> "PureState":
        vec = np.zeros(dim, dtype=np.complex128)
        vec[index] = 1.0
        return cls(vec)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def projector(self) -> np.ndarray:
        """Rank-1 projector |psi><psi|."""
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def overlap(self, other: "PureState") -> complex:
        """Inner product <self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def isclose(self, other: "PureState", tol: float = TOL_EXACT) -> bool:
        """Equality of canonical representatives (i.e. equality of rays)."""
        return self.dim == other.dim and bool(
            np.allclose(self.amplitudes, other.amplitudes, rtol=0.0, atol=tol)
        )


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, PSD (to roundoff slack), unit-trace operator."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        op = as_operator(self.matrix)
        defect = hermiticity_defect(op)
        if defect > TOL_EXACT:
            raise NumericalInconsistencyError(f"density matrix hermiticity defect {defect:g}")
        tr = complex(np.trace(op))
        if abs(tr - 1.0) > TOL_EXACT:
            raise NumericalInconsistencyError(f"density matrix trace {tr!r} is not 1")
        min_eig = float(np.linalg.eigvalsh(op)[0])
        if min_eig < TOL_PSD:
            raise NumericalInconsistencyError(f"density matrix minimum eigenvalue {min_eig:g}")
        op.setflags(write=False)
        object.__setattr__(self, "matrix", op)

    @classmethod
    def from_pure(cls, state: PureState) -> "DensityMatrix":
        return cls(state.projector())

    @classmethod
    def from_mixture(cls, weights, states) -> "DensityMatrix":
        """Convex mixture of pure states; weights are normalized here."""
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0) or w.sum() <= 0:
            raise NumericalInconsistencyError("mixture weights must be non-negative and not all zero")
        w = w / w.sum()
        op = sum(wi * s.projector() for wi, s in zip(w, states))
        return cls(op)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=np.complex128) / dim)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Povm:
    """Finite list of positive effects summing to the identity."""

    dim: int
    effects: tuple = field(default_factory=tuple)

    def __post_init__(self) -> None:
        effects = tuple(as_operator(e) for e in self.effects)
        if not effects:
            raise InvalidDimensionError("a POVM needs at least one effect")
        total = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for i, eff in enumerate(effects):
            if eff.shape[0] != self.dim:
                raise InvalidDimensionError(
                    f"effect {i} has dimension {eff.shape[0]}, expected {self.dim}"
                )
            defect = hermiticity_defect(eff)
            if defect > TOL_EXACT:
                raise NumericalInconsistencyError(f"effect {i} hermiticity defect {defect:g}")
            min_eig = float(np.linalg.eigvalsh(eff)[0])
            if min_eig < TOL_PSD:
                raise NumericalInconsistencyError(f"effect {i} minimum eigenvalue {min_eig:g}")
            eff.setflags(write=False)
            total += eff
        completeness = float(np.max(np.abs(total - np.eye(self.dim))))
        if completeness > TOL_ACCUM:
            raise NumericalInconsistencyError(
                f"effects sum deviates from identity by {completeness:g}"
            )
        object.__setattr__(self, "effects", effects)

    @classmethod
    def projective(cls, states) -> "Povm":
        """Projective POVM onto an orthonormal family of pure states."""
        states = tuple(states)
        return cls(states[0].dim, tuple(s.projector() for s in states))

    @classmethod
    def computational(cls, dim: int) -> "Povm":
        return cls.projective(PureState.basis(dim, j) for j in range(dim))

    @property
    def n_outcomes(self) -> int:
        return len(self.effects)


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product with the left factor owning the major index."""
    return np.kron(as_operator(a), as_operator(b))


def swap_operator(d: int) -> np.ndarray:
    """Exchange operator on the joint space: SWAP |j>|k> = |k>|j>."""
    if d < 2:
        raise InvalidDimensionError(f"swap needs local dimension >= 2, got {d}")
    swap = np.zeros((d * d, d * d), dtype=np.complex128)
    for j in range(d):
        for k in range(d):
            swap[k * d + j, j * d + k] = 1.0
    return swap


def sym_projector(d: int) -> np.ndarray:
    """Projector onto the symmetric subspace, (I + SWAP) / 2."""
    return (np.eye(d * d, dtype=np.complex128) + swap_operator(d)) / 2.0


def antisym_projector(d: int) -> np.ndarray:
    """Projector onto the antisymmetric subspace, (I - SWAP) / 2."""
    return (np.eye(d * d, dtype=np.complex128) - swap_operator(d)) / 2.0


def expectation(rho: DensityMatrix, op: np.ndarray, *, tol: float = TOL_ACCUM) -> float:
    """Tr[rho . op] for Hermitian ``op``, returned as a real number.

    The imaginary part must vanish to ``tol``; a larger residual means the
    inputs violate their contracts and raises rather than silently
    truncating.
    """
    op = as_operator(op)
    if op.shape[0] != rho.dim:
        raise InvalidDimensionError(
            f"operator dimension {op.shape[0]} does not match state dimension {rho.dim}"
        )
    defect = hermiticity_defect(op)
    if defect > tol:
        raise NumericalInconsistencyError(f"operator hermiticity defect {defect:g} exceeds {tol:g}")
    value = complex(np.einsum("ij,ji->", rho.matrix, op))
    if abs(value.imag) > tol:
        raise NumericalInconsistencyError(f"expectation has imaginary part {value.imag:g}")
    return float(value.real)
