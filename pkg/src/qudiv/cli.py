"""Command-line interface.

Every command is seeded and reproducible: identical flags give
byte-identical reports except for ``wall_time_ms``. Exit codes: 0 pass,
1 usage/config error, 2 contract or tolerance failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .divergence import (
    Remap,
    conjugation_remap,
    divergence_bounds,
    divergence_isotropic_closed,
    divergence_isotropic_mc,
    divergence_remapped_mc,
    identity_remap,
    inversion_remap,
    mean_divergence,
)
from .exceptions import (
    EmptyBatchError,
    InvalidDimensionError,
    NotMaximallyEntangledError,
    NumericalInconsistencyError,
    PairingError,
    UnsupportedOutcomeCountError,
)
from .haar import moment_check, sample_haar_angles, sample_haar_gaussian
from .hilbert import DensityMatrix, Povm, PureState, sym_projector
from .report import build_report, render
from .scenarios import (
    BELL_KINDS,
    JointStateSpec,
    diagonal_povm,
    plus45_state,
    minus45_state,
    prediction_game,
    qrng_generate,
    resolve,
    singlet_beamsplitter,
)

DEFAULT_SEED = 12345
DEFAULT_MC_TOL = 0.01
DEFAULT_EXACT_TOL = 1e-9

_STATE_CHOICES = BELL_KINDS + ("product-identical", "maximally-mixed")
_SPEC_CHOICES = BELL_KINDS + ("product-identical", "product-plus45", "product-00")
_QRNG_STATES = ("plus45", "minus45", "h", "v", "haar")
_SAMPLERS = ("angles", "gaussian")


class _UsageError(Exception):
    """Flag combination is invalid; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    # argparse defaults to exit code 2 on usage errors; the contract here
    # reserves 2 for contract failures and uses 1 for usage.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _positive_int(floor: int, name: str):
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer") from None
        if value < floor:
            raise argparse.ArgumentTypeError(f"{name} must be >= {floor}")
        return value

    return parse


def _seed_arg(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("seed must be an integer") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be in [0, 2**64)")
    return value


def _tol_arg(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("tolerance must be a number") from None
    if not value > 0.0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return value


def _add_common(sub: argparse.ArgumentParser, *, samples: int, tol: float) -> None:
    sub.add_argument("--samples", type=_positive_int(1, "samples"), default=samples)
    sub.add_argument("--seed", type=_seed_arg, default=DEFAULT_SEED)
    sub.add_argument("--tol", type=_tol_arg, default=tol)
    sub.add_argument("--shards", type=_positive_int(1, "shards"), default=1)
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--out", type=Path, default=None)


def build_parser() -> _Parser:
    parser = _Parser(prog="qudiv", description=__doc__)
    parser.add_argument("--version", action="version", version=f"qudiv {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser(
        "verify-decomposition",
        help="compare the Monte Carlo divergence operator against the closed form",
    )
    sub.add_argument("--dim", type=_positive_int(2, "dim"), default=2)
    sub.add_argument("--sampler", choices=_SAMPLERS, default="angles")
    _add_common(sub, samples=200_000, tol=DEFAULT_MC_TOL)

    sub = commands.add_parser(
        "mean-divergence", help="mean divergence of a named joint state (closed form)"
    )
    sub.add_argument("--dim", type=_positive_int(2, "dim"), default=2)
    sub.add_argument("--state", choices=_STATE_CHOICES, required=True)
    _add_common(sub, samples=1, tol=DEFAULT_EXACT_TOL)

    sub = commands.add_parser(
        "singlet-demo", help="singlet pairs through identical 45-degree beamsplitters"
    )
    _add_common(sub, samples=100_000, tol=DEFAULT_MC_TOL)

    sub = commands.add_parser("qrng", help="generate bits by measuring a pure state")
    sub.add_argument("--state", choices=_QRNG_STATES, default="plus45")
    _add_common(sub, samples=10_000, tol=DEFAULT_MC_TOL)

    sub = commands.add_parser(
        "predict", help="adversary predicts A's outcome from a measurement on B"
    )
    sub.add_argument("--spec", choices=_SPEC_CHOICES, required=True)
    sub.add_argument("--remap", choices=("inversion", "identity", "conjugation", "none"), default="none")
    sub.add_argument("--povm", choices=("computational", "diagonal"), default="computational")
    _add_common(sub, samples=10_000, tol=DEFAULT_MC_TOL)

    sub = commands.add_parser(
        "sample", help="sample the isotropic measure and check its moments"
    )
    sub.add_argument("--dim", type=_positive_int(2, "dim"), default=2)
    sub.add_argument("--sampler", choices=_SAMPLERS, default="angles")
    _add_common(sub, samples=100_000, tol=DEFAULT_MC_TOL)

    sub = commands.add_parser(
        "remapped", help="Monte Carlo mean of the remapped divergence"
    )
    sub.add_argument("--dim", type=_positive_int(2, "dim"), default=2)
    sub.add_argument("--spec", choices=_SPEC_CHOICES, required=True)
    sub.add_argument("--remap", choices=("inversion", "identity", "conjugation"), required=True)
    sub.add_argument("--sampler", choices=_SAMPLERS, default="angles")
    _add_common(sub, samples=100_000, tol=DEFAULT_MC_TOL)

    return parser


def _spec_from_flag(name: str, dim: int, seed: int) -> JointStateSpec:
    if name in BELL_KINDS:
        if dim != 2:
            raise _UsageError(f"{name} requires --dim 2")
        return JointStateSpec.bell(name)
    if name == "product-identical":
        phi = sample_haar_angles(dim, 1, seed).state(0)
        return JointStateSpec.product(phi, phi)
    if name == "product-plus45":
        if dim != 2:
            raise _UsageError("product-plus45 requires --dim 2")
        return JointStateSpec.product(plus45_state(), plus45_state())
    if name == "product-00":
        if dim != 2:
            raise _UsageError("product-00 requires --dim 2")
        zero = PureState.basis(2, 0)
        return JointStateSpec.product(zero, zero)
    if name == "maximally-mixed":
        return JointStateSpec.custom(DensityMatrix.maximally_mixed(dim * dim))
    raise _UsageError(f"unknown state {name!r}")


def _remap_from_flag(name: str, dim: int) -> Remap | None:
    if name == "none":
        return None
    if name == "identity":
        return identity_remap(dim)
    if name == "conjugation":
        return conjugation_remap(dim)
    if name == "inversion":
        if dim != 2:
            raise _UsageError("the inversion remap is defined for --dim 2")
        return inversion_remap()
    raise _UsageError(f"unknown remap {name!r}")


def _qrng_state(name: str, seed: int) -> PureState:
    if name == "plus45":
        return plus45_state()
    if name == "minus45":
        return minus45_state()
    if name == "h":
        return PureState.basis(2, 0)
    if name == "v":
        return PureState.basis(2, 1)
    return sample_haar_angles(2, 1, seed).state(0)


def _grouped_spectrum(eigenvalues: np.ndarray, gap: float = 1e-6) -> list[dict]:
    groups: list[list[float]] = []
    for value in np.sort(eigenvalues):
        if groups and value - groups[-1][-1] <= gap:
            groups[-1].append(float(value))
        else:
            groups.append([float(value)])
    return [
        {"eigenvalue": float(np.mean(group)), "multiplicity": len(group)}
        for group in groups
    ]


def _run_verify_decomposition(args) -> tuple[dict, dict, bool]:
    config = {
        "dim": args.dim,
        "samples": args.samples,
        "seed": args.seed,
        "sampler": args.sampler,
        "tol": args.tol,
    }
    closed = divergence_isotropic_closed(args.dim)
    estimate = divergence_isotropic_mc(args.dim, args.samples, args.seed, args.sampler, args.shards)
    deviation = float(np.max(np.abs(closed.matrix - estimate.matrix)))
    low, high = divergence_bounds(args.dim)
    passed = deviation < args.tol
    result = {
        "max_entrywise_deviation": deviation,
        "spectrum": _grouped_spectrum(closed.spectrum()),
        "lower_bound": low,
        "upper_bound": high,
        "pass": passed,
    }
    return config, result, passed


def _run_mean_divergence(args) -> tuple[dict, dict, bool]:
    config = {
        "dim": args.dim,
        "state": args.state,
        "seed": args.seed,
        "tol": args.tol,
    }
    rho = resolve(_spec_from_flag(args.state, args.dim, args.seed))
    closed = divergence_isotropic_closed(args.dim)
    value = mean_divergence(rho, closed)
    low, high = divergence_bounds(args.dim)
    within = low - args.tol <= value <= high + args.tol
    result = {
        "value": value,
        "lower_bound": low,
        "upper_bound": high,
        "within_bounds": within,
        "pass": within,
    }
    return config, result, within


def _run_singlet_demo(args) -> tuple[dict, dict, bool]:
    config = {"samples": args.samples, "seed": args.seed, "tol": args.tol}
    stats = singlet_beamsplitter(args.samples, args.seed)
    passed = stats["same_outcome_count"] == 0 and stats["complement_violations"] == 0
    result = dict(stats)
    result["pass"] = passed
    return config, result, passed


def _run_qrng(args) -> tuple[dict, dict, bool]:
    config = {"state": args.state, "samples": args.samples, "seed": args.seed}
    outcome = qrng_generate(
        _qrng_state(args.state, args.seed), Povm.computational(2), args.samples, args.seed
    )
    result = {
        "n_bits": int(outcome.bits.size),
        "p_one": outcome.p_one,
        "ones_frequency": outcome.ones_frequency,
        "longest_run": outcome.longest_run,
        "bits_hex": np.packbits(outcome.bits).tobytes().hex(),
        "pass": True,
    }
    return config, result, True


def _run_predict(args) -> tuple[dict, dict, bool]:
    config = {
        "spec": args.spec,
        "remap": args.remap,
        "povm": args.povm,
        "samples": args.samples,
        "seed": args.seed,
    }
    spec = _spec_from_flag(args.spec, 2, args.seed)
    remap = _remap_from_flag(args.remap, 2)
    povm = Povm.computational(2) if args.povm == "computational" else diagonal_povm()
    rate = prediction_game(spec, remap, povm, args.samples, args.seed)
    result = {"success_rate": rate, "n_trials": args.samples, "pass": True}
    return config, result, True


def _run_sample(args) -> tuple[dict, dict, bool]:
    config = {
        "dim": args.dim,
        "samples": args.samples,
        "seed": args.seed,
        "sampler": args.sampler,
        "tol": args.tol,
    }
    sampler = sample_haar_angles if args.sampler == "angles" else sample_haar_gaussian
    batch = sampler(args.dim, args.samples, args.seed, args.shards)
    first, second = moment_check(batch, args.shards)
    d = args.dim
    first_err = float(np.max(np.abs(first - np.eye(d) / d)))
    second_err = float(np.max(np.abs(second - 2.0 * sym_projector(d) / (d * (d + 1)))))
    passed = first_err < args.tol and second_err < args.tol
    result = {
        "first_moment_max_error": first_err,
        "second_moment_max_error": second_err,
        "pass": passed,
    }
    return config, result, passed


def _run_remapped(args) -> tuple[dict, dict, bool]:
    config = {
        "dim": args.dim,
        "spec": args.spec,
        "remap": args.remap,
        "sampler": args.sampler,
        "samples": args.samples,
        "seed": args.seed,
        "tol": args.tol,
    }
    rho = resolve(_spec_from_flag(args.spec, args.dim, args.seed))
    remap = _remap_from_flag(args.remap, args.dim)
    value = divergence_remapped_mc(rho, remap, args.samples, args.seed, args.sampler, args.shards)
    closed = divergence_isotropic_closed(args.dim)
    result = {
        "value": value,
        "abs_value": abs(value),
        "unremapped_mean": mean_divergence(rho, closed),
        "pass": True,
    }
    return config, result, True


_RUNNERS = {
    "verify-decomposition": _run_verify_decomposition,
    "mean-divergence": _run_mean_divergence,
    "singlet-demo": _run_singlet_demo,
    "qrng": _run_qrng,
    "predict": _run_predict,
    "sample": _run_sample,
    "remapped": _run_remapped,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        config, result, passed = _RUNNERS[args.command](args)
    except _UsageError as exc:
        print(f"qudiv {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except (
        EmptyBatchError,
        InvalidDimensionError,
        NotMaximallyEntangledError,
        NumericalInconsistencyError,
        PairingError,
        UnsupportedOutcomeCountError,
    ) as exc:
        print(f"qudiv {args.command}: contract violation: {exc}", file=sys.stderr)
        return 2
    wall_time_ms = (time.perf_counter() - start) * 1000.0
    report = build_report(args.command, config, result, wall_time_ms, __version__)
    text = render(report, args.format)
    if args.out is not None:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if passed else 2


if __name__ == "__main__":
    sys.exit(main())
