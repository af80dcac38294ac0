"""Fourier and ridgelet transforms on prime grids.

The 1-D transform is the unitary DFT

    F[g](v) = p**(-1/2) * sum_b g(b) exp(-2*pi*i*v*b/p)

and the D-dimensional transform is its separable extension.  Prime lengths
rule out radix splitting, so the fast path is the Bluestein chirp algorithm
(power-of-two FFTs on a padded convolution); a dense O(p^2) summation is kept
in the test suite as the oracle.

The ridge analysis of a grid function f is

    analyze[f](a, b) = p**(-D/2) * sum_x f(x) r((a.x - b) mod p)

with a 1-D ridgelet profile r, and the synthesis of a weight table w is

    synthesize[w](x) = p**(-D/2) * sum_{a,b} w(a, b) g((a.x - b) mod p)

with an activation profile g.  Both profiles are centered (zero sum) and
unit-normalized; under that normalization the analysis operator is an
isometry and each fixed-a slice of analyze[f] has a 1-D spectrum equal to a
scaled slice of the D-dimensional spectrum of f.  That slice identity is what
the fast analysis path and the register pipeline in :mod:`ridgelab.qsim` are
built on.

Tolerance policy: 1e-12 for unitary round trips and normalization checks,
1e-9 relative for composed identities (double precision accumulated over
sums of up to ~1e5 terms).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import zp_core
from .errors import (
    DegenerateActivation,
    DimensionError,
    NotAdmissible,
)

#: Unitary round trips and normalization checks must hold to this tolerance.
TOL_UNITARY = 1e-12
#: Composed identities (reconstruction, slice residuals) hold to this.
TOL_IDENTITY = 1e-9
#: Admissibility floor for the spectral pairing constant.
ADMISSIBILITY_FLOOR = 1e-8
#: Mathematically real results may carry at most this much imaginary part.
TOL_REAL = 1e-10


def ensure_real(values, tol: float = TOL_REAL, what: str = "value"):
    """Return the real part of ``values`` after checking the imaginary part.

    Results that are mathematically real are stored in complex arrays
    throughout the package; this is the single documented cast back.
    """
    values = np.asarray(values)
    if np.iscomplexobj(values):
        worst = float(np.max(np.abs(values.imag))) if values.size else 0.0
        if worst > tol:
            raise ValueError(
                f"{what}: imaginary part {worst:.3e} exceeds {tol:.1e}"
            )
        return np.ascontiguousarray(values.real)
    return np.asarray(values, dtype=np.float64)


# ---------------------------------------------------------------------------
# Unitary DFT, Bluestein chirp algorithm
# ---------------------------------------------------------------------------


@lru_cache(maxsize=64)
def _bluestein_tables(n: int, inverse: bool):
    # exp(s*i*pi*k^2/n) has period 2n in k^2, so reduce exactly in integers
    # before touching floats.
    k = np.arange(n, dtype=np.int64)
    phase = np.pi * ((k * k) % (2 * n)) / n
    sign = 1.0 if inverse else -1.0
    chirp = np.exp(sign * 1j * phase)
    m = 1
    while m < 2 * n - 1:
        m *= 2
    anti = np.conj(chirp)
    kernel = np.concatenate([anti[n - 1:0:-1], anti])
    kernel_fft = np.fft.fft(kernel, m)
    chirp.setflags(write=False)
    kernel_fft.setflags(write=False)
    return chirp, kernel_fft, m


def _dft_last(arr: np.ndarray, inverse: bool) -> np.ndarray:
    """Unitary DFT along the last axis of a complex array, any length."""
    n = arr.shape[-1]
    chirp, kernel_fft, m = _bluestein_tables(n, inverse)
    work = np.fft.fft(arr * chirp, m, axis=-1)
    work *= kernel_fft
    conv = np.fft.ifft(work, axis=-1)[..., n - 1 : 2 * n - 1]
    conv *= chirp
    conv *= 1.0 / np.sqrt(n)
    return conv


def dft_axis(arr: np.ndarray, axis: int, direction: str = "forward") -> np.ndarray:
    """Unitary DFT along one axis of a complex array."""
    inverse = _parse_direction(direction)
    moved = np.moveaxis(np.asarray(arr, dtype=np.complex128), axis, -1)
    return np.moveaxis(_dft_last(moved, inverse), -1, axis)


def _parse_direction(direction: str) -> bool:
    if direction == "forward":
        return False
    if direction == "inverse":
        return True
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def dft1(x, direction: str = "forward") -> np.ndarray:
    """Unitary 1-D DFT of a length-p vector, p prime.

    The forward transform divides by sqrt(p); the inverse is its conjugate
    transpose, so a round trip is the identity to 1e-12.
    """
    inverse = _parse_direction(direction)
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1:
        raise DimensionError(f"dft1 expects a 1-D vector, got shape {x.shape}")
    zp_core.require_prime(x.shape[0])
    return _dft_last(x, inverse)


# ---------------------------------------------------------------------------
# Grid containers
# ---------------------------------------------------------------------------


def _as_grid_values(values, length: int, what: str) -> np.ndarray:
    values = np.ascontiguousarray(values, dtype=np.complex128)
    if values.ndim != 1 or values.shape[0] != length:
        raise DimensionError(
            f"{what}: expected {length} values, got shape {values.shape}"
        )
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{what}: non-finite entries")
    return values


@dataclass
class GridFunction:
    """Dense complex-valued function on Z_p^D in linear-index order."""

    p: int
    d: int
    values: np.ndarray

    def __post_init__(self):
        self.p = zp_core.require_prime(self.p)
        self.d = int(self.d)
        self.values = _as_grid_values(self.values, self.p**self.d, "GridFunction")

    @classmethod
    def zeros(cls, p: int, d: int) -> "GridFunction":
        return cls(p, d, np.zeros(p**d, dtype=np.complex128))

    def copy(self) -> "GridFunction":
        return GridFunction(self.p, self.d, self.values.copy())


@dataclass
class RidgeletCoeffs:
    """Dense complex table on Z_p^D x Z_p, indexed lin(a) + b * p**D."""

    p: int
    d: int
    values: np.ndarray

    def __post_init__(self):
        self.p = zp_core.require_prime(self.p)
        self.d = int(self.d)
        self.values = _as_grid_values(
            self.values, self.p ** (self.d + 1), "RidgeletCoeffs"
        )

    @classmethod
    def zeros(cls, p: int, d: int) -> "RidgeletCoeffs":
        return cls(p, d, np.zeros(p ** (d + 1), dtype=np.complex128))


def dftD(f: GridFunction, direction: str = "forward") -> GridFunction:
    """Separable D-dimensional unitary DFT of a grid function."""
    inverse = _parse_direction(direction)
    arr = f.values.reshape((f.p,) * f.d)
    for axis in range(f.d):
        arr = np.moveaxis(_dft_last(np.moveaxis(arr, axis, -1), inverse), -1, axis)
    return GridFunction(f.p, f.d, arr.reshape(-1))


# ---------------------------------------------------------------------------
# Activation / ridgelet profiles
# ---------------------------------------------------------------------------


def normalize_activation(raw) -> np.ndarray:
    """Center to zero sum and scale to unit l2 norm.

    Any non-constant profile can serve as an activation after this
    normalization; constant input raises :class:`DegenerateActivation`.
    """
    raw = np.asarray(raw, dtype=np.float64)
    if raw.ndim != 1:
        raise DimensionError(f"activation must be 1-D, got shape {raw.shape}")
    centered = raw - raw.mean()
    norm = np.linalg.norm(centered)
    if norm <= 1e-14 * max(1.0, float(np.linalg.norm(raw))):
        raise DegenerateActivation("constant profile cannot be normalized")
    return centered / norm


def admissibility_constant(g, r) -> complex:
    """Spectral pairing sum_v F[g](v) * conj(F[r](v)) of two profiles.

    Both inputs must already be centered and unit-normalized.  For real
    profiles the constant is real and equals sum_b g(b) r(b) by Parseval.
    Raises :class:`NotAdmissible` when the pairing is numerically zero,
    since reconstruction divides by it.
    """
    g = np.asarray(g, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    if g.shape != r.shape:
        raise DimensionError(f"profile shapes differ: {g.shape} vs {r.shape}")
    for name, vec in (("g", g), ("r", r)):
        if abs(vec.sum()) > TOL_UNITARY or abs(np.linalg.norm(vec) - 1.0) > TOL_UNITARY:
            raise ValueError(f"profile {name} is not centered and unit-normalized")
    c = complex(np.vdot(dft1(r), dft1(g)))
    if abs(c) <= ADMISSIBILITY_FLOOR:
        raise NotAdmissible(f"|pairing constant| = {abs(c):.3e} <= {ADMISSIBILITY_FLOOR:.1e}")
    return c


@dataclass
class ActivationPair:
    """Normalized activation g and ridgelet r on Z_p with cached spectra.

    The spectra are computed once at construction because the fast analysis
    path reuses the ridgelet spectrum for every slice.
    """

    p: int
    g: np.ndarray
    r: np.ndarray
    g_hat: np.ndarray = field(repr=False)
    r_hat: np.ndarray = field(repr=False)
    c_gr: complex

    def __post_init__(self):
        self.p = zp_core.require_prime(self.p)
        for name in ("g", "r"):
            vec = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            if vec.shape != (self.p,):
                raise DimensionError(f"{name} must have length {self.p}")
            if abs(vec.sum()) > TOL_UNITARY or abs(np.linalg.norm(vec) - 1.0) > TOL_UNITARY:
                raise ValueError(f"profile {name} violates zero-sum/unit-norm")
            setattr(self, name, vec)
        if abs(self.c_gr) <= ADMISSIBILITY_FLOOR:
            raise NotAdmissible("pair constructed with vanishing pairing constant")

    @classmethod
    def build(cls, g_raw, r_raw=None) -> "ActivationPair":
        """Normalize raw profiles (library-side, never trusted from input)."""
        g = normalize_activation(g_raw)
        r = g if r_raw is None else normalize_activation(r_raw)
        c = admissibility_constant(g, r)
        return cls(p=len(g), g=g, r=r, g_hat=dft1(g), r_hat=dft1(r), c_gr=c)

    @property
    def self_paired(self) -> bool:
        """True when the ridgelet equals the activation elementwise."""
        return bool(np.array_equal(self.g, self.r))


def _require_same_modulus(p_left: int, p_right: int) -> None:
    if p_left != p_right:
        raise DimensionError(f"modulus mismatch: {p_left} vs {p_right}")


# ---------------------------------------------------------------------------
# Ridgelet analysis / synthesis
# ---------------------------------------------------------------------------


def _slice_apply(values: np.ndarray, p: int, d: int, filt_hat: np.ndarray) -> np.ndarray:
    """Apply the ridge analysis operator for a profile with spectrum filt_hat.

    Fast path via the slice identity: take the D-dimensional spectrum of the
    input, gather it along the scaled-index rays, weight by the conjugated
    profile spectrum, and inverse-transform over the ray parameter.  Cost is
    O(p**(d+1) * (d + log p)) scalar operations.
    """
    arr = values.reshape((p,) * d)
    for axis in range(d):
        arr = np.moveaxis(_dft_last(np.moveaxis(arr, axis, -1), False), -1, axis)
    spectrum = arr.reshape(-1)
    rays = zp_core.scale_index_table(p, d)  # (p, p**d)
    sliced = spectrum[rays] * np.conj(filt_hat)[:, None]
    out = _dft_last(np.moveaxis(sliced, 0, -1), True)  # inverse over v
    # out[a, b]; flat layout wants lin(a) + b * p**d, i.e. b as slow axis
    return np.ascontiguousarray(np.moveaxis(out, -1, 0)).reshape(-1)


def ridgelet_analyze(
    f: GridFunction, pair: ActivationPair, path: str = "fourier"
) -> RidgeletCoeffs:
    """Ridge analysis of f against the pair's ridgelet profile.

    ``path="direct"`` evaluates the defining sum through a dense index table
    (cost p**(2d+1) scalar operations); ``path="fourier"`` uses the slice
    identity.  The two agree to 1e-9 relative and the direct path serves as
    the in-package oracle for the fast one.
    """
    _require_same_modulus(f.p, pair.p)
    if path == "fourier":
        values = _slice_apply(f.values, f.p, f.d, pair.r_hat)
    elif path == "direct":
        table = zp_core.ridge_index_table(f.p, f.d)
        values = f.p ** (-f.d / 2.0) * (pair.r[table] @ f.values)
    else:
        raise ValueError(f"path must be 'direct' or 'fourier', got {path!r}")
    return RidgeletCoeffs(f.p, f.d, values)


def ridgelet_synthesize(w: RidgeletCoeffs, pair: ActivationPair) -> GridFunction:
    """Shallow-network synthesis sum_{a,b} w(a,b) g((a.x - b) mod p) / p**(D/2)."""
    _require_same_modulus(w.p, pair.p)
    table = zp_core.ridge_index_table(w.p, w.d)
    values = w.p ** (-w.d / 2.0) * (pair.g[table].T @ w.values)
    return GridFunction(w.p, w.d, values)


def fourier_slice_check(f: GridFunction, pair: ActivationPair) -> float:
    """Max residual of the slice identity, using the direct analysis path.

    Returns max over (a, v) of

        | F_1[analyze[f](a, .)](v) - F_D[f](v*a mod p) * conj(F_1[r](v)) |

    The left side transforms the direct-path coefficients so the check stays
    independent of the fast analysis route.
    """
    _require_same_modulus(f.p, pair.p)
    p, d = f.p, f.d
    coeffs = ridgelet_analyze(f, pair, path="direct").values.reshape(p, p**d)
    lhs = _dft_last(np.moveaxis(coeffs, 0, -1), False)  # [a, v]
    spectrum = dftD(f).values
    rays = zp_core.scale_index_table(p, d)
    rhs = (spectrum[rays] * np.conj(pair.r_hat)[:, None]).T  # [a, v]
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# CSV serialization
# ---------------------------------------------------------------------------
#
# Both grid containers share one delimited form:
#
#     p,d
#     <p>,<d>
#     index,re,im
#     0,<re>,<im>
#     ...
#
# in linear-index order.  A file with p**d rows is a grid function, one with
# p**(d+1) rows a coefficient table.


def save_values_csv(path, p: int, d: int, values: np.ndarray) -> None:
    values = np.asarray(values, dtype=np.complex128)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("p,d\n")
        fh.write(f"{p},{d}\n")
        fh.write("index,re,im\n")
        for i, z in enumerate(values):
            fh.write(f"{i},{float(z.real)!r},{float(z.imag)!r}\n")


def load_values_csv(path) -> tuple[int, int, np.ndarray]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if len(lines) < 3 or lines[0].replace(" ", "") != "p,d":
        raise ValueError(f"{path}: expected 'p,d' header")
    p_str, d_str = lines[1].split(",")
    p, d = int(p_str), int(d_str)
    if lines[2].replace(" ", "") != "index,re,im":
        raise ValueError(f"{path}: expected 'index,re,im' header")
    values = np.zeros(len(lines) - 3, dtype=np.complex128)
    for row, line in enumerate(lines[3:]):
        idx_str, re_str, im_str = line.split(",")
        if int(idx_str) != row:
            raise ValueError(f"{path}: rows must be in linear-index order")
        values[row] = float(re_str) + 1j * float(im_str)
    return p, d, values


def save_grid_csv(f: GridFunction, path) -> None:
    save_values_csv(path, f.p, f.d, f.values)


def load_grid_csv(path) -> GridFunction:
    p, d, values = load_values_csv(path)
    return GridFunction(p, d, values)


def save_coeffs_csv(w: RidgeletCoeffs, path) -> None:
    save_values_csv(path, w.p, w.d, w.values)


def load_coeffs_csv(path) -> RidgeletCoeffs:
    p, d, values = load_values_csv(path)
    return RidgeletCoeffs(p, d, values)
