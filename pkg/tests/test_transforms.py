import numpy as np
import pytest

from ridgelab import transforms, zp_core
from ridgelab.errors import (
    DegenerateActivation,
    DimensionError,
    NotAdmissible,
)
from ridgelab.experiment import ramp_profile, tanh_profile
from ridgelab.transforms import (
    ActivationPair,
    GridFunction,
    RidgeletCoeffs,
    admissibility_constant,
    dft1,
    dftD,
    fourier_slice_check,
    normalize_activation,
    ridgelet_analyze,
    ridgelet_synthesize,
)


def dense_dft_matrix(p):
    """O(p^2) summation oracle for the unitary transform."""
    jk = np.outer(np.arange(p), np.arange(p))
    return np.exp(-2j * np.pi * jk / p) / np.sqrt(p)


class TestDft1:
    def test_impulse_to_constant(self):
        x = np.zeros(5)
        x[0] = 1.0
        assert np.allclose(dft1(x), np.full(5, 5**-0.5), atol=1e-13)

    def test_constant_to_impulse(self):
        x = np.full(7, 7**-0.5)
        out = dft1(x)
        expected = np.zeros(7)
        expected[0] = 1.0
        assert np.allclose(out, expected, atol=1e-13)

    def test_dense_oracle_p127(self, rng):
        p = 127
        x = rng.standard_normal(p) + 1j * rng.standard_normal(p)
        assert np.max(np.abs(dft1(x) - dense_dft_matrix(p) @ x)) < 1e-10

    @pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 127])
    def test_round_trip_and_unitarity(self, p, rng):
        x = rng.standard_normal(p) + 1j * rng.standard_normal(p)
        fx = dft1(x)
        assert np.max(np.abs(dft1(fx, "inverse") - x)) < 1e-12
        assert abs(np.linalg.norm(fx) - np.linalg.norm(x)) < 1e-10

    def test_shape_rejected(self):
        with pytest.raises(DimensionError):
            dft1(np.zeros((3, 3)))

    def test_bad_direction(self):
        with pytest.raises(ValueError):
            dft1(np.zeros(5), "sideways")


class TestDftD:
    def test_d1_reduces_to_dft1(self, rng):
        x = rng.standard_normal(7)
        f = GridFunction(7, 1, x)
        assert np.allclose(dftD(f).values, dft1(x), atol=1e-13)

    def test_delta_origin(self):
        values = np.zeros(9)
        values[0] = 1.0
        out = dftD(GridFunction(3, 2, values))
        assert np.allclose(out.values, np.full(9, 1 / 3), atol=1e-13)

    def test_brute_force_double_sum(self, rng):
        p, d = 5, 2
        values = rng.standard_normal(p**d) + 1j * rng.standard_normal(p**d)
        coords = zp_core.all_coords(p, d)
        expected = np.zeros(p**d, dtype=complex)
        for ui in range(p**d):
            u = coords[ui]
            acc = 0.0j
            for xi in range(p**d):
                acc += values[xi] * np.exp(-2j * np.pi * (u @ coords[xi]) / p)
            expected[ui] = acc / p
        out = dftD(GridFunction(p, d, values))
        assert np.max(np.abs(out.values - expected)) < 1e-10

    def test_round_trip(self, rng):
        f = GridFunction(3, 3, rng.standard_normal(27))
        back = dftD(dftD(f), "inverse")
        assert np.max(np.abs(back.values - f.values)) < 1e-12


class TestNormalizeActivation:
    def test_ramp_profile(self):
        raw = ramp_profile(127)
        out = normalize_activation(raw)
        assert abs(out.sum()) < 1e-12
        assert abs(np.linalg.norm(out) - 1.0) < 1e-12
        manual = (raw - raw.mean()) / np.linalg.norm(raw - raw.mean())
        assert np.allclose(out, manual, atol=1e-14)

    def test_idempotent(self, rng):
        out = normalize_activation(rng.standard_normal(11))
        again = normalize_activation(out)
        assert np.allclose(out, again, atol=1e-12)

    def test_delta_p5(self):
        raw = np.zeros(5)
        raw[0] = 1.0
        out = normalize_activation(raw)
        # (delta - 1/5) has norm sqrt(0.8)
        expected = np.array([0.8, -0.2, -0.2, -0.2, -0.2]) / np.sqrt(0.8)
        assert np.allclose(out, expected, atol=1e-14)
        assert abs(out.sum()) < 1e-12
        assert abs(np.linalg.norm(out) - 1.0) < 1e-12

    def test_constant_rejected(self):
        with pytest.raises(DegenerateActivation):
            normalize_activation(np.full(9, 3.7))


class TestAdmissibility:
    def test_self_pairing_is_one(self):
        g = normalize_activation(ramp_profile(127))
        assert abs(admissibility_constant(g, g) - 1.0) < 1e-12

    def test_orthogonal_spectra_rejected(self):
        p = 7
        x = np.arange(p)
        g = normalize_activation(np.cos(2 * np.pi * x / p))
        r = normalize_activation(np.cos(4 * np.pi * x / p))
        with pytest.raises(NotAdmissible):
            admissibility_constant(g, r)

    def test_parseval_oracle(self):
        g = normalize_activation(ramp_profile(127))
        r = normalize_activation(tanh_profile(127))
        c = admissibility_constant(g, r)
        assert abs(c.imag) < 1e-12
        assert abs(c - float(np.dot(g, r))) < 1e-12

    def test_pair_build_caches_spectra(self):
        pair = ActivationPair.build(ramp_profile(11), tanh_profile(11))
        assert np.allclose(pair.g_hat, dft1(pair.g), atol=1e-14)
        assert np.allclose(pair.r_hat, dft1(pair.r), atol=1e-14)
        assert not pair.self_paired
        assert ActivationPair.build(ramp_profile(11)).self_paired


def triple_loop_analyze(f, pair):
    """Literal evaluation of the analysis sum, pure Python."""
    p, d = f.p, f.d
    coords = zp_core.all_coords(p, d)
    out = np.zeros(p ** (d + 1), dtype=complex)
    for ai in range(p**d):
        for b in range(p):
            acc = 0.0j
            for xi in range(p**d):
                phase = (int(coords[ai] @ coords[xi]) - b) % p
                acc += f.values[xi] * pair.r[phase]
            out[ai + b * p**d] = acc * p ** (-d / 2)
    return out


class TestRidgeletAnalyze:
    def test_zero_function(self, pairs):
        out = ridgelet_analyze(GridFunction.zeros(5, 1), pairs(5))
        assert np.max(np.abs(out.values)) < 1e-15

    def test_delta_input(self, pairs):
        p, d, x0 = 7, 1, 3
        values = np.zeros(p)
        values[x0] = 1.0
        out = ridgelet_analyze(GridFunction(p, d, values), pairs(7))
        pair = pairs(7)
        for a in range(p):
            for b in range(p):
                expected = p ** (-d / 2) * pair.r[(a * x0 - b) % p]
                assert abs(out.values[a + b * p] - expected) < 1e-12

    def test_paths_agree_p5(self, pairs, rng):
        f = GridFunction(5, 1, rng.standard_normal(5))
        fast = ridgelet_analyze(f, pairs(5), path="fourier").values
        direct = ridgelet_analyze(f, pairs(5), path="direct").values
        assert np.max(np.abs(fast - direct)) < 1e-10

    def test_paths_agree_sweep(self, pairs, rng):
        for p, d in [(3, 1), (3, 2), (5, 2), (7, 1), (11, 1)]:
            f = GridFunction(p, d, rng.standard_normal(p**d))
            fast = ridgelet_analyze(f, pairs(p), path="fourier").values
            direct = ridgelet_analyze(f, pairs(p), path="direct").values
            assert np.max(np.abs(fast - direct)) < 1e-10, (p, d)

    def test_triple_loop_anchor(self, pairs, rng):
        # anchors both in-package paths to a literal pure-Python sum
        f = GridFunction(3, 1, rng.standard_normal(3))
        expected = triple_loop_analyze(f, pairs(3))
        for path in ("direct", "fourier"):
            got = ridgelet_analyze(f, pairs(3), path=path).values
            assert np.max(np.abs(got - expected)) < 1e-12, path

    def test_modulus_mismatch(self, pairs):
        with pytest.raises(DimensionError):
            ridgelet_analyze(GridFunction.zeros(5, 1), pairs(7))

    def test_isometry_norms(self, pairs, rng):
        for p, d in [(3, 1), (5, 1), (7, 2)]:
            f = GridFunction(p, d, rng.standard_normal(p**d))
            out = ridgelet_analyze(f, pairs(p))
            assert abs(np.linalg.norm(out.values) - np.linalg.norm(f.values)) < 1e-10


class TestRidgeletSynthesize:
    def test_zero_weights(self, pairs):
        out = ridgelet_synthesize(RidgeletCoeffs.zeros(5, 1), pairs(5))
        assert np.max(np.abs(out.values)) < 1e-15

    def test_single_node(self, pairs):
        p, a0, b0 = 7, 2, 5
        w = np.zeros(p**2)
        w[a0 + b0 * p] = 1.0
        out = ridgelet_synthesize(RidgeletCoeffs(p, 1, w), pairs(7))
        pair = pairs(7)
        x = np.arange(p)
        expected = p**-0.5 * pair.g[(a0 * x - b0) % p]
        assert np.allclose(out.values, expected, atol=1e-13)

    def test_reconstruction_p7(self, pairs, rng):
        f = GridFunction(7, 1, rng.standard_normal(7))
        for kind in ("ramp", "mixed"):
            pair = pairs(7, kind)
            back = ridgelet_synthesize(ridgelet_analyze(f, pair), pair)
            err = np.max(np.abs(back.values / pair.c_gr - f.values))
            assert err < 1e-9 * np.max(np.abs(f.values)), kind


class TestSliceIdentity:
    def test_zero_function(self, pairs):
        assert fourier_slice_check(GridFunction.zeros(5, 1), pairs(5)) == 0.0

    def test_random_function(self, pairs, rng):
        f = GridFunction(7, 1, rng.standard_normal(7))
        assert fourier_slice_check(f, pairs(7, "mixed")) < 1e-9

    def test_sweep_50_functions(self, pairs, rng):
        worst = 0.0
        for p in (3, 5, 7):
            for d in (1, 2):
                for _ in range(50):
                    f = GridFunction(p, d, rng.standard_normal(p**d))
                    worst = max(worst, fourier_slice_check(f, pairs(p)))
        assert worst < 1e-9


class TestCsvForm:
    def test_grid_round_trip(self, tmp_path, rng):
        f = GridFunction(5, 2, rng.standard_normal(25) + 1j * rng.standard_normal(25))
        path = tmp_path / "grid.csv"
        transforms.save_grid_csv(f, path)
        back = transforms.load_grid_csv(path)
        assert back.p == 5 and back.d == 2
        assert np.array_equal(back.values, f.values)

    def test_coeffs_round_trip(self, tmp_path, rng):
        w = RidgeletCoeffs(3, 1, rng.standard_normal(9))
        path = tmp_path / "coeffs.csv"
        transforms.save_coeffs_csv(w, path)
        back = transforms.load_coeffs_csv(path)
        assert back.p == 3 and back.d == 1
        assert np.array_equal(back.values, w.values)

    def test_header_layout(self, tmp_path):
        f = GridFunction(3, 1, np.arange(3, dtype=float))
        path = tmp_path / "grid.csv"
        transforms.save_grid_csv(f, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "p,d"
        assert lines[1] == "3,1"
        assert lines[2] == "index,re,im"
        assert len(lines) == 3 + 3

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("q,d\n3,1\nindex,re,im\n0,0.0,0.0\n")
        with pytest.raises(ValueError):
            transforms.load_values_csv(path)


class TestContainers:
    def test_wrong_length(self):
        with pytest.raises(DimensionError):
            GridFunction(5, 2, np.zeros(24))
        with pytest.raises(DimensionError):
            RidgeletCoeffs(5, 1, np.zeros(24))

    def test_nonfinite_rejected(self):
        values = np.zeros(5)
        values[2] = np.nan
        with pytest.raises(ValueError):
            GridFunction(5, 1, values)

    def test_ensure_real_guard(self):
        with pytest.raises(ValueError):
            transforms.ensure_real(np.array([1.0 + 1e-6j]))
        out = transforms.ensure_real(np.array([1.0 + 1e-12j]))
        assert out.dtype == np.float64
