import math

import numpy as np
import pytest
from scipy import stats

from oracles import quadrature_moments_d2
from qudiv.exceptions import EmptyBatchError, InvalidDimensionError
from qudiv.haar import (
    HypersphericalCoords,
    SampleBatch,
    _angles_chunk,
    _chunk_rng,
    _states_from_angles,
    coords_to_state,
    moment_check,
    sample_haar_angles,
    sample_haar_gaussian,
    volume_density,
    volume_density_grid,
)
from qudiv.hilbert import sym_projector


class TestCoords:
    def test_all_angles_zero(self):
        xi = HypersphericalCoords(np.zeros(3), np.zeros(3))
        state = coords_to_state(xi)
        assert np.array_equal(state.amplitudes, np.array([1, 0, 0, 0], dtype=complex))

    def test_d2_equal_superposition(self):
        xi = HypersphericalCoords(np.array([math.pi / 4]), np.array([0.0]))
        state = coords_to_state(xi)
        expected = np.array([1.0, 1.0]) / math.sqrt(2.0)
        assert np.max(np.abs(state.amplitudes - expected)) <= 1e-15

    def test_d3_worked_point(self):
        # hand evaluation: (cos 60, e^{i 90} sin 60 cos 45, sin 60 sin 45)
        xi = HypersphericalCoords(
            np.array([math.pi / 3, math.pi / 4]), np.array([math.pi / 2, 0.0])
        )
        state = coords_to_state(xi)
        expected = np.array([0.5, 1j * math.sqrt(6) / 4.0, math.sqrt(6) / 4.0])
        assert np.max(np.abs(state.amplitudes - expected)) <= 1e-15
        assert np.linalg.norm(state.amplitudes) == pytest.approx(1.0, abs=1e-15)

    def test_range_validation(self):
        with pytest.raises(InvalidDimensionError):
            HypersphericalCoords(np.array([math.pi / 2]), np.array([0.0]))
        with pytest.raises(InvalidDimensionError):
            HypersphericalCoords(np.array([0.1]), np.array([2.0 * math.pi]))
        with pytest.raises(InvalidDimensionError):
            HypersphericalCoords(np.array([0.1, 0.2]), np.array([0.3]))

    def test_unit_norm_over_random_coords(self):
        rng = np.random.default_rng(5)
        for d in range(2, 7):
            thetas = rng.random((10_000, d - 1)) * (math.pi / 2.0)
            phis = rng.random((10_000, d - 1)) * (2.0 * math.pi)
            kets = _states_from_angles(thetas, phis)
            norms = np.linalg.norm(kets, axis=1)
            assert np.max(np.abs(norms - 1.0)) <= 1e-14


class TestVolumeDensity:
    def test_d2_worked_point(self):
        xi = HypersphericalCoords(np.array([math.pi / 4]), np.array([0.0]))
        assert volume_density(xi, 2) == pytest.approx(1.0 / math.pi, abs=1e-15)

    def test_vanishes_at_theta_zero(self):
        xi = HypersphericalCoords(np.array([0.0, 0.4]), np.array([0.1, 0.2]))
        assert volume_density(xi, 3) == 0.0

    @pytest.mark.parametrize("d", [2, 3])
    def test_quadrature_normalization(self, d):
        # Full-volume trapezoid over the thetas; the phi directions are
        # flat and contribute (2*pi)^(d-1) exactly.
        grid = np.linspace(0.0, math.pi / 2.0, 2001)
        mesh = np.stack(np.meshgrid(*([grid] * (d - 1)), indexing="ij"), axis=-1)
        values = volume_density_grid(mesh, d)
        for _ in range(d - 1):
            values = np.trapezoid(values, grid, axis=-1)
        total = values * (2.0 * math.pi) ** (d - 1)
        assert total == pytest.approx(d, abs=1e-3)


class TestSamplers:
    @pytest.mark.parametrize("sampler", [sample_haar_angles, sample_haar_gaussian])
    def test_deterministic(self, sampler):
        a = sampler(3, 4000, 99)
        b = sampler(3, 4000, 99)
        assert np.array_equal(a.states, b.states)
        assert not np.array_equal(a.states, sampler(3, 4000, 100).states)

    @pytest.mark.parametrize("sampler", [sample_haar_angles, sample_haar_gaussian])
    def test_shard_count_does_not_change_samples(self, sampler):
        a = sampler(2, 50_000, 3, shards=1)
        b = sampler(2, 50_000, 3, shards=4)
        assert np.array_equal(a.states, b.states)

    def test_samplers_are_distinct_streams(self):
        a = sample_haar_angles(2, 100, 7)
        g = sample_haar_gaussian(2, 100, 7)
        assert not np.allclose(a.states, g.states)

    def test_unit_norms(self):
        for sampler in (sample_haar_angles, sample_haar_gaussian):
            batch = sampler(5, 2000, 1)
            assert np.max(np.abs(np.linalg.norm(batch.states, axis=1) - 1.0)) <= 1e-12

    def test_theta_range(self):
        thetas, phis = _angles_chunk(4, 10_000, _chunk_rng(2, "angles", 0))
        assert np.all(thetas >= 0.0) and np.all(thetas < math.pi / 2.0)
        assert np.all(phis >= 0.0) and np.all(phis < 2.0 * math.pi)

    def test_empty_and_invalid(self):
        with pytest.raises(EmptyBatchError):
            sample_haar_angles(2, 0, 1)
        with pytest.raises(InvalidDimensionError):
            sample_haar_gaussian(1, 10, 1)

    def test_first_haar_moment_scalar(self):
        # mean of d * |<e0|phi>|^2 is 1 for the isotropic measure
        batch = sample_haar_angles(2, 100_000, 21)
        fidelity = np.abs(batch.states[:, 0]) ** 2
        assert 2.0 * fidelity.mean() == pytest.approx(1.0, abs=0.01)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_theta_inverse_cdf_ks(self, k):
        # theta_k of the d=4 sampler must follow CDF sin^{2(d-k)}(theta)
        d = 4
        thetas, _ = _angles_chunk(d, 10_000, _chunk_rng(11, "angles", 0))
        statistic = stats.kstest(
            thetas[:, k - 1], lambda t: np.sin(t) ** (2 * (d - k))
        ).statistic
        assert statistic < 1.628 / math.sqrt(10_000)  # 1% critical value


class TestMoments:
    def test_single_state_batch(self):
        batch = SampleBatch(
            dim=2, states=np.array([[1.0, 0.0]], dtype=complex), seed=0, sampler_id="angles"
        )
        first, second = moment_check(batch)
        assert np.array_equal(first, np.diag([1.0, 0.0]).astype(complex))
        expected2 = np.zeros((4, 4), dtype=complex)
        expected2[0, 0] = 1.0
        assert np.array_equal(second, expected2)

    @pytest.mark.parametrize("sampler", [sample_haar_angles, sample_haar_gaussian])
    @pytest.mark.parametrize("d", [2, 3])
    def test_moments_match_isotropic_values(self, sampler, d):
        first, second = moment_check(sampler(d, 100_000, 17))
        assert np.max(np.abs(first - np.eye(d) / d)) < 0.01
        assert np.max(np.abs(second - 2.0 * sym_projector(d) / (d * (d + 1)))) < 0.01

    def test_moments_match_grid_quadrature(self):
        # sampling-free check of the same integrals
        first, second = quadrature_moments_d2()
        assert np.max(np.abs(first - np.eye(2) / 2.0)) < 1e-4
        assert np.max(np.abs(second - sym_projector(2) / 3.0)) < 1e-4

    def test_sampler_equivalence_within_standard_error(self):
        n = 100_000
        batch_a = sample_haar_angles(2, n, 31)
        batch_g = sample_haar_gaussian(2, n, 31)
        moments_a = moment_check(batch_a)
        moments_g = moment_check(batch_g)
        ses = []
        for batch in (batch_a, batch_g):
            kets = batch.states
            outer = kets[:, :, None] * kets[:, None, :].conj()
            pair = np.einsum("sjk,spq->sjpkq", outer, outer).reshape(n, 4, 4)
            ses.append(
                [
                    np.sqrt(sample.real.var(axis=0) + sample.imag.var(axis=0)) / math.sqrt(n)
                    for sample in (outer, pair)
                ]
            )
        for which in (0, 1):
            combined = np.sqrt(ses[0][which] ** 2 + ses[1][which] ** 2)
            gap = np.abs(moments_a[which] - moments_g[which])
            assert np.all(gap <= 3.0 * combined + 1e-12)
