"""Canonical joint states and worked physical scenarios.

Polarization encoding is pinned for bit-exact reports: H -> index 0,
V -> index 1, |+45> = (|H> + |V>)/sqrt(2), and at a 45-degree polarizing
beamsplitter outcome 0 means transmit (+45), outcome 1 means reflect.

Outcome sampling is inverse-CDF over the analytic Born probabilities.
Probabilities at or below roundoff are snapped to exactly zero before the
CDF is built, so zero-probability events are structurally unreachable,
not just statistically rare.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .divergence import Remap, identity_remap
from .exceptions import (
    InvalidDimensionError,
    NumericalInconsistencyError,
    UnsupportedOutcomeCountError,
)
from .haar import sample_haar_angles
from .hilbert import (
    TOL_ACCUM,
    DensityMatrix,
    Povm,
    PureState,
    antisym_projector,
    sym_projector,
    tensor,
)

# Probabilities this small are roundoff residue of an exact zero.
PROB_SNAP = 1e-12

BELL_KINDS = ("bell_phi_plus", "bell_phi_minus", "bell_psi_plus", "bell_psi_minus")

__all__ = [
    "PROB_SNAP",
    "BELL_KINDS",
    "TrialRecord",
    "JointStateSpec",
    "bell_state",
    "plus45_state",
    "minus45_state",
    "diagonal_povm",
    "resolve",
    "bell_basis_check",
    "joint_probability_grid",
    "measure_joint",
    "singlet_beamsplitter",
    "factorization_check",
    "factorization_check_joint",
    "QrngResult",
    "qrng_generate",
    "prediction_game",
]


class TrialRecord(NamedTuple):
    trial: int
    outcome_a: int
    outcome_b: int


def bell_state(kind: str) -> PureState:
    """One of the four Bell states in the H/V encoding."""
    amplitudes = {
        "bell_phi_plus": (1.0, 0.0, 0.0, 1.0),
        "bell_phi_minus": (1.0, 0.0, 0.0, -1.0),
        "bell_psi_plus": (0.0, 1.0, 1.0, 0.0),
        "bell_psi_minus": (0.0, 1.0, -1.0, 0.0),
    }
    if kind not in amplitudes:
        raise InvalidDimensionError(f"unknown Bell state {kind!r}")
    return PureState(np.array(amplitudes[kind], dtype=np.complex128) / math.sqrt(2.0))


def plus45_state() -> PureState:
    return PureState(np.array([1.0, 1.0], dtype=np.complex128) / math.sqrt(2.0))


def minus45_state() -> PureState:
    return PureState(np.array([1.0, -1.0], dtype=np.complex128) / math.sqrt(2.0))


def diagonal_povm() -> Povm:
    """Projective POVM of the 45-degree beamsplitter: (transmit, reflect)."""
    return Povm.projective([plus45_state(), minus45_state()])


@dataclass(frozen=True)
class JointStateSpec:
    """Declarative description of a joint state on a d x d system."""

    kind: str
    dim_local: int
    state_a: PureState | None = None
    state_b: PureState | None = None
    unitary: np.ndarray | None = None
    rho: DensityMatrix | None = None

    def __post_init__(self) -> None:
        if self.kind in BELL_KINDS:
            if self.dim_local != 2:
                raise InvalidDimensionError("Bell states need local dimension 2")
        elif self.kind == "product":
            if self.state_a is None or self.state_b is None:
                raise InvalidDimensionError("product spec needs both local states")
            if self.state_a.dim != self.dim_local or self.state_b.dim != self.dim_local:
                raise InvalidDimensionError("product states must match dim_local")
        elif self.kind == "max_entangled":
            if self.unitary is None or self.unitary.shape != (self.dim_local, self.dim_local):
                raise InvalidDimensionError("max_entangled spec needs a d x d unitary")
        elif self.kind == "custom":
            if self.rho is None or self.rho.dim != self.dim_local**2:
                raise InvalidDimensionError("custom spec needs a joint density matrix")
        else:
            raise InvalidDimensionError(f"unknown spec kind {self.kind!r}")

    @classmethod
    def bell(cls, kind: str) -> "JointStateSpec":
        return cls(kind=kind, dim_local=2)

    @classmethod
    def product(cls, state_a: PureState, state_b: PureState) -> "JointStateSpec":
        return cls(kind="product", dim_local=state_a.dim, state_a=state_a, state_b=state_b)

    @classmethod
    def max_entangled(cls, unitary: np.ndarray) -> "JointStateSpec":
        unitary = np.asarray(unitary, dtype=np.complex128)
        return cls(kind="max_entangled", dim_local=unitary.shape[0], unitary=unitary)

    @classmethod
    def custom(cls, rho: DensityMatrix) -> "JointStateSpec":
        dim_local = int(round(math.sqrt(rho.dim)))
        if dim_local * dim_local != rho.dim:
            raise InvalidDimensionError(f"joint dimension {rho.dim} is not a perfect square")
        return cls(kind="custom", dim_local=dim_local, rho=rho)


def resolve(spec: JointStateSpec) -> DensityMatrix:
    """Build the joint density matrix a spec describes."""
    d = spec.dim_local
    if spec.kind in BELL_KINDS:
        return DensityMatrix.from_pure(bell_state(spec.kind))
    if spec.kind == "product":
        joint = np.kron(spec.state_a.amplitudes, spec.state_b.amplitudes)
        return DensityMatrix.from_pure(PureState(joint))
    if spec.kind == "max_entangled":
        unitary = spec.unitary
        defect = float(np.max(np.abs(unitary.conj().T @ unitary - np.eye(d))))
        if defect > TOL_ACCUM:
            raise NumericalInconsistencyError(f"max_entangled matrix is not unitary ({defect:g})")
        return DensityMatrix.from_pure(PureState(unitary.reshape(-1) / math.sqrt(d)))
    return spec.rho


def bell_basis_check() -> dict:
    """Verify the Bell basis resolves the symmetric/antisymmetric split.

    The three symmetric Bell projectors must sum to the symmetric-subspace
    projector and the singlet projector must equal the antisymmetric one.
    """
    sym_sum = sum(
        bell_state(k).projector()
        for k in ("bell_phi_plus", "bell_phi_minus", "bell_psi_plus")
    )
    singlet = bell_state("bell_psi_minus").projector()
    sym_dev = float(np.max(np.abs(sym_sum - sym_projector(2))))
    antisym_dev = float(np.max(np.abs(singlet - antisym_projector(2))))
    idem_dev = max(
        float(np.max(np.abs(p @ p - p)))
        for p in (bell_state(k).projector() for k in BELL_KINDS)
    )
    tol = 1e-12
    return {
        "sym_deviation": sym_dev,
        "antisym_deviation": antisym_dev,
        "projector_idempotency_deviation": idem_dev,
        "sym_trace": float(np.trace(sym_sum).real),
        "antisym_trace": float(np.trace(singlet).real),
        "tolerance": tol,
        "passed": bool(sym_dev <= tol and antisym_dev <= tol and idem_dev <= tol),
    }


def joint_probability_grid(rho: DensityMatrix, povm_a: Povm, povm_b: Povm) -> np.ndarray:
    """Born probabilities P(i, j) = Tr[(E_a(i) (x) E_b(j)) rho].

    Validates realness and normalization, then snaps roundoff-sized
    entries to exactly zero.
    """
    da, db = povm_a.dim, povm_b.dim
    if rho.dim != da * db:
        raise InvalidDimensionError(f"joint dimension {rho.dim} is not {da}*{db}")
    rho4 = rho.matrix.reshape(da, db, da, db)
    stack_a = np.stack(povm_a.effects)
    stack_b = np.stack(povm_b.effects)
    grid = np.einsum("iax,jby,xyab->ij", stack_a, stack_b, rho4)
    worst_imag = float(np.max(np.abs(grid.imag)))
    if worst_imag > TOL_ACCUM:
        raise NumericalInconsistencyError(f"joint probabilities have imaginary part {worst_imag:g}")
    probs = grid.real
    if float(probs.min()) < -TOL_ACCUM:
        raise NumericalInconsistencyError(f"negative joint probability {probs.min():g}")
    total = float(probs.sum())
    if abs(total - 1.0) > TOL_ACCUM:
        raise NumericalInconsistencyError(f"joint probabilities sum to {total!r}")
    probs[probs <= PROB_SNAP] = 0.0
    return probs


def _sample_outcome_grid(probs: np.ndarray, n: int, seed: int) -> np.ndarray:
    """Inverse-CDF sampling over a probability grid; returns (n, 2) indices."""
    cdf = np.cumsum(probs.ravel())
    cdf /= cdf[-1]
    cdf[-1] = 1.0
    u = np.random.default_rng(seed).random(n)
    flat = np.searchsorted(cdf, u, side="right")
    return np.stack(divmod(flat, probs.shape[1]), axis=1)


def measure_joint(
    rho: DensityMatrix, povm_a: Povm, povm_b: Povm, n: int, seed: int
) -> list[TrialRecord]:
    """Simulate n joint measurements of ``rho``."""
    if n < 1:
        raise InvalidDimensionError(f"need at least one trial, got {n}")
    probs = joint_probability_grid(rho, povm_a, povm_b)
    outcomes = _sample_outcome_grid(probs, n, seed)
    return [TrialRecord(t, int(a), int(b)) for t, (a, b) in enumerate(outcomes)]


def singlet_beamsplitter(n: int, seed: int) -> dict:
    """Send singlet pairs through identically oriented 45-degree
    beamsplitters and tally the (anti)correlations."""
    rho = resolve(JointStateSpec.bell("bell_psi_minus"))
    povm = diagonal_povm()
    probs = joint_probability_grid(rho, povm, povm)
    outcomes = _sample_outcome_grid(probs, n, seed)
    same = int(np.sum(outcomes[:, 0] == outcomes[:, 1]))
    return {
        "n_trials": n,
        "same_outcome_count": same,
        "different_outcome_count": n - same,
        "marginal_a_transmit": float(np.mean(outcomes[:, 0] == 0)),
        "marginal_b_transmit": float(np.mean(outcomes[:, 1] == 0)),
        "complement_violations": int(np.sum(outcomes[:, 1] != 1 - outcomes[:, 0])),
    }


def factorization_check_joint(rho: DensityMatrix, remap: Remap, n_states: int, seed: int) -> float:
    """Max over sampled phi of |P_AB(phi, f(phi)) - P_A(phi) P_B(f(phi))|.

    Probabilities are evaluated analytically (the Born rule), so for a
    product joint state the deviation is pure roundoff; only the probe
    states phi are sampled.
    """
    d = remap.dim
    if rho.dim != d * d:
        raise InvalidDimensionError(f"joint dimension {rho.dim} is not {d * d}")
    kets_a = sample_haar_angles(d, n_states, seed).states
    kets_b = remap.apply_batch(kets_a)
    rho4 = rho.matrix.reshape(d, d, d, d)
    marg_a = np.einsum("xyay->xa", rho4)
    marg_b = np.einsum("xyxb->yb", rho4)
    p_a = np.einsum("sx,xa,sa->s", kets_a.conj(), marg_a, kets_a).real
    p_b = np.einsum("sy,yb,sb->s", kets_b.conj(), marg_b, kets_b).real
    joint_kets = np.einsum("sx,sy->sxy", kets_a, kets_b).reshape(n_states, d * d)
    p_ab = np.einsum("si,ij,sj->s", joint_kets.conj(), rho.matrix, joint_kets).real
    return float(np.max(np.abs(p_ab - p_a * p_b)))


def factorization_check(
    rho_a: DensityMatrix, rho_b: DensityMatrix, remap: Remap, n_states: int, seed: int
) -> float:
    """Factorization deviation for an explicit product state."""
    if rho_a.dim != rho_b.dim:
        raise InvalidDimensionError("local dimensions differ")
    joint = DensityMatrix(tensor(rho_a.matrix, rho_b.matrix))
    return factorization_check_joint(joint, remap, n_states, seed)


class QrngResult(NamedTuple):
    bits: np.ndarray
    p_one: float
    ones_frequency: float
    longest_run: int


def _longest_run(bits: np.ndarray) -> int:
    if bits.size == 0:
        return 0
    boundaries = np.flatnonzero(np.diff(bits)) + 1
    edges = np.concatenate(([0], boundaries, [bits.size]))
    return int(np.max(np.diff(edges)))


def qrng_generate(state: PureState, povm: Povm, n: int, seed: int) -> QrngResult:
    """Generate n bits by measuring a pure state with a binary POVM."""
    if povm.n_outcomes != 2:
        raise UnsupportedOutcomeCountError(
            f"bit generation needs a binary POVM, got {povm.n_outcomes} outcomes"
        )
    if state.dim != povm.dim:
        raise InvalidDimensionError(f"state dimension {state.dim} does not match POVM {povm.dim}")
    amplitude = state.amplitudes
    p_one = complex(np.vdot(amplitude, povm.effects[1] @ amplitude))
    if abs(p_one.imag) > TOL_ACCUM:
        raise NumericalInconsistencyError(f"outcome probability has imaginary part {p_one.imag:g}")
    p = p_one.real
    if p <= PROB_SNAP:
        p = 0.0
    if p >= 1.0 - PROB_SNAP:
        p = 1.0
    u = np.random.default_rng(seed).random(n)
    bits = (u < p).astype(np.uint8)
    ones = int(bits.sum())
    return QrngResult(
        bits=bits,
        p_one=p,
        ones_frequency=ones / n,
        longest_run=_longest_run(bits),
    )


def _projective_basis(povm: Povm) -> list[PureState]:
    """Extract the basis states of a rank-1 projective POVM."""
    states = []
    for i, effect in enumerate(povm.effects):
        eigs, vecs = np.linalg.eigh(effect)
        candidate = PureState(vecs[:, -1])
        if np.max(np.abs(effect - candidate.projector())) > TOL_ACCUM:
            raise UnsupportedOutcomeCountError(
                f"effect {i} is not a rank-1 projector; the fixed-basis prediction "
                "strategy is only defined for projective measurements"
            )
        states.append(candidate)
    return states


def prediction_game(
    spec: JointStateSpec, remap: Remap | None, povm: Povm, n: int, seed: int
) -> float:
    """Fraction of trials where measuring B predicts A's outcome.

    The adversary measures subsystem B in the remap-transformed basis
    {f(e_0), f(e_1)} and announces B's outcome index as the prediction
    for A. Strictly correlated joint states make this exact; product
    states pin it to chance.
    """
    if spec.dim_local != 2:
        raise InvalidDimensionError("the prediction game is defined for qubit pairs")
    if povm.n_outcomes != 2:
        raise UnsupportedOutcomeCountError("the prediction game needs a binary POVM")
    rho = resolve(spec)
    f = remap if remap is not None else identity_remap(spec.dim_local)
    basis_a = _projective_basis(povm)
    povm_b = Povm.projective([f.apply(state) for state in basis_a])
    probs = joint_probability_grid(rho, povm, povm_b)
    outcomes = _sample_outcome_grid(probs, n, seed)
    return float(np.mean(outcomes[:, 0] == outcomes[:, 1]))
