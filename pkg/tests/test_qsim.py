import numpy as np
import pytest

from ridgelab.errors import (
    DimensionError,
    NotIsometric,
    StateNotNormalized,
    TooLargeForDense,
)
from ridgelab.experiment import ramp_profile
from ridgelab.qsim import (
    QuditState,
    RidgeletOperator,
    build_r_dense,
    measure_samples,
    qrt_apply,
    qrt_stage_count,
)
from ridgelab.transforms import normalize_activation


def random_state(p, d, rng):
    raw = rng.standard_normal(p**d) + 1j * rng.standard_normal(p**d)
    return QuditState.from_values(p, d, raw)


class TestDenseOperator:
    def test_p3_gram(self, pairs):
        op = build_r_dense(pairs(3), 1)
        assert op.matrix.shape == (9, 3)
        gram = op.matrix.T @ op.matrix
        assert np.max(np.abs(gram - np.eye(3))) < 1e-12

    def test_p127_norm_preservation(self, pairs, rng):
        op = build_r_dense(pairs(127), 1)
        assert op.matrix.shape == (16129, 127)
        f = rng.standard_normal(127)
        assert abs(np.linalg.norm(op.apply(f)) - np.linalg.norm(f)) < 1e-10

    def test_entries_match_profile(self, pairs):
        pair = pairs(5)
        op = build_r_dense(pair, 1)
        for a in range(5):
            for b in range(5):
                for x in range(5):
                    expected = 5**-0.5 * pair.r[(a * x - b) % 5]
                    assert abs(op.matrix[a + 5 * b, x] - expected) < 1e-14

    def test_unnormalized_profile_rejected(self):
        bad = ramp_profile(5)  # positive sum, not centered
        with pytest.raises(NotIsometric):
            RidgeletOperator.from_vector(bad, 5, 1)
        uncentered = normalize_activation(ramp_profile(5)) + 0.1
        with pytest.raises(NotIsometric):
            RidgeletOperator.from_vector(uncentered, 5, 1)

    def test_size_guard(self, monkeypatch):
        monkeypatch.setenv("RIDGELAB_DENSE_LIMIT", "10")
        with pytest.raises(TooLargeForDense):
            RidgeletOperator.from_vector(normalize_activation(ramp_profile(5)), 5, 1)


class TestPipeline:
    def test_basis_states_match_columns(self, pairs):
        op = build_r_dense(pairs(3), 1)
        for x0 in range(3):
            out = qrt_apply(QuditState.basis(3, 1, x0), pairs(3))
            assert np.max(np.abs(out.amps - op.matrix[:, x0])) < 1e-12

    @pytest.mark.parametrize("p,d", [(3, 1), (3, 2), (5, 1), (5, 2), (7, 1), (7, 2)])
    def test_matches_dense_oracle(self, pairs, rng, p, d):
        op = build_r_dense(pairs(p), d)
        for _ in range(10):
            state = random_state(p, d, rng)
            out = qrt_apply(state, pairs(p))
            assert np.linalg.norm(out.amps - op.apply(state.amps)) < 1e-10

    def test_output_norm(self, pairs, rng):
        out = qrt_apply(random_state(5, 2, rng), pairs(5))
        assert abs(np.linalg.norm(out.amps) - 1.0) < 1e-10
        assert out.num_registers == 3

    def test_linearity(self, pairs, rng):
        pair = pairs(5)
        s1, s2 = random_state(5, 1, rng), random_state(5, 1, rng)
        alpha, beta = 0.3 - 0.4j, 0.7 + 0.2j
        combo = alpha * s1.amps + beta * s2.amps
        state = QuditState.from_values(5, 1, combo)
        scale = np.linalg.norm(combo)
        lhs = qrt_apply(state, pair).amps * scale
        rhs = alpha * qrt_apply(s1, pair).amps + beta * qrt_apply(s2, pair).amps
        assert np.max(np.abs(lhs - rhs)) < 1e-10

    def test_zero_frequency_slice_is_empty(self, pairs, rng):
        # replicate stages 1 and 2 with numpy's own FFT and check that the
        # auxiliary register carries no mass at frequency zero
        p, d = 5, 1
        pair = pairs(p)
        state = random_state(p, d, rng)
        joint = np.kron(pair.r.astype(complex), state.amps).reshape(p, p**d)
        stage2 = np.fft.fft(joint, axis=1, norm="ortho")  # forward on input
        stage2 = np.fft.ifft(stage2, axis=0, norm="ortho")  # inverse on aux
        mass = float(np.sum(np.abs(stage2[0]) ** 2))
        assert mass < 1e-12

    def test_modulus_mismatch(self, pairs, rng):
        with pytest.raises(DimensionError):
            qrt_apply(random_state(5, 1, rng), pairs(7))

    def test_unnormalized_state_rejected(self):
        with pytest.raises(StateNotNormalized):
            QuditState(5, 1, np.full(5, 0.9, dtype=complex))


class TestStageCount:
    def test_small_counts(self):
        assert qrt_stage_count(1) == 4
        assert qrt_stage_count(2) == 5
        assert qrt_stage_count(10) == 13

    def test_linear_in_d(self):
        for d in range(1, 17):
            assert (qrt_stage_count(d) - 3) / d == 1.0

    def test_invalid_dimension(self):
        with pytest.raises(ValueError):
            qrt_stage_count(0)


class TestMeasurement:
    def test_basis_state_is_deterministic(self):
        state = QuditState.basis(5, 1, 3)
        draws = measure_samples(state, 1000, seed=1)
        assert np.all(draws == 3)

    def test_zero_draws(self, pairs, rng):
        assert measure_samples(random_state(3, 1, rng), 0, seed=1).size == 0

    def test_uniform_superposition_frequencies(self):
        p, n = 5, 100_000
        state = QuditState(p, 1, np.full(p, p**-0.5, dtype=complex))
        draws = measure_samples(state, n, seed=42)
        counts = np.bincount(draws, minlength=p)
        sigma = np.sqrt(n * (1 / p) * (1 - 1 / p))
        assert np.max(np.abs(counts - n / p)) < 4 * sigma

    def test_transformed_state_distribution(self, pairs, rng):
        # chi-square against the dense-oracle amplitudes
        from scipy import stats

        p = 5
        op = build_r_dense(pairs(p), 1)
        f = rng.standard_normal(p)
        amps = op.apply(f / np.linalg.norm(f))
        state = QuditState.from_values(p, 2, amps)
        n = 100_000
        draws = measure_samples(state, n, seed=7)
        probs = np.abs(state.amps) ** 2
        counts = np.bincount(draws, minlength=p**2)
        keep = probs * n > 5
        expected = probs[keep] * counts[keep].sum() / probs[keep].sum()
        _, pval = stats.chisquare(counts[keep], expected)
        assert pval > 1e-3

    def test_reproducible(self, pairs, rng):
        state = random_state(7, 1, rng)
        a = measure_samples(state, 500, seed=123)
        b = measure_samples(state, 500, seed=123)
        assert np.array_equal(a, b)
