"""Statevector simulation of the ridge-transform register pipeline.

Registers are simulated at their native dimension p rather than embedded in
qubits: the embedding is a hardware detail, the linear map is identical, and
padding states would only waste memory.  A state over k registers is a dense
complex vector of length p**k using the shared little-endian index layout
(:mod:`ridgelab.zp_core`).

The pipeline applies the ridge analysis isometry to a D-register state in
four register-level stages:

1. adjoin an auxiliary register loaded with the ridgelet profile,
2. forward DFT on each of the D input registers, inverse DFT on the
   auxiliary register,
3. the controlled index map |a'>|v> -> |v^{-1} a' mod p>|v> for v != 0,
   applied as an index remapping (never as a dense matrix),
4. inverse DFT on the auxiliary register.

The auxiliary amplitude on the v = 0 slice after stage 2 is the profile mean,
which the zero-sum normalization forces to zero; the identity is therefore a
valid completion of stage 3 on that slice and the simulator asserts the slice
mass stays below 1e-12.  A dense matrix build of the same isometry is kept
for oracle comparisons and for sampling experiments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import zp_core
from .errors import DimensionError, NotIsometric, StateNotNormalized
from .transforms import ActivationPair, _dft_last

#: States must be normalized to this tolerance; the pipeline preserves it.
TOL_NORM = 1e-10
#: Zero-sum / unit-norm slack allowed on a ridgelet profile.
TOL_MOMENTS = 1e-10
#: Residual auxiliary mass allowed on the v = 0 slice after stage 2.
TOL_V0_MASS = 1e-12


def _check_isometry_profile(r: np.ndarray) -> np.ndarray:
    r = np.ascontiguousarray(r, dtype=np.float64)
    if r.ndim != 1:
        raise DimensionError(f"ridgelet profile must be 1-D, got shape {r.shape}")
    if abs(r.sum()) > TOL_MOMENTS:
        raise NotIsometric(f"profile sum {r.sum():.3e} is not zero")
    if abs(np.linalg.norm(r) - 1.0) > TOL_MOMENTS:
        raise NotIsometric(f"profile norm {np.linalg.norm(r):.6f} is not one")
    return r


@dataclass
class QuditState:
    """Normalized amplitude vector over a product of dimension-p registers."""

    p: int
    num_registers: int
    amps: np.ndarray

    def __post_init__(self):
        self.p = zp_core.require_prime(self.p)
        self.num_registers = int(self.num_registers)
        expected = self.p**self.num_registers
        self.amps = np.ascontiguousarray(self.amps, dtype=np.complex128)
        if self.amps.shape != (expected,):
            raise DimensionError(
                f"state needs {expected} amplitudes, got shape {self.amps.shape}"
            )
        norm = np.linalg.norm(self.amps)
        if abs(norm - 1.0) > TOL_NORM:
            raise StateNotNormalized(f"state norm {norm!r} differs from 1")

    @classmethod
    def basis(cls, p: int, num_registers: int, index: int) -> "QuditState":
        amps = np.zeros(p**num_registers, dtype=np.complex128)
        amps[index] = 1.0
        return cls(p, num_registers, amps)

    @classmethod
    def from_values(cls, p: int, num_registers: int, values) -> "QuditState":
        """Build a state from arbitrary amplitudes, normalizing them."""
        values = np.asarray(values, dtype=np.complex128)
        norm = np.linalg.norm(values)
        if norm == 0:
            raise StateNotNormalized("cannot normalize the zero vector")
        return cls(p, num_registers, values / norm)


@dataclass
class RidgeletOperator:
    """Dense p**(d+1) x p**d matrix with entries p**(-d/2) r((a.x - b) mod p).

    Zero sum and unit norm of the profile make the columns orthonormal, so
    the matrix is an isometry; the constructor refuses profiles violating
    those moments.
    """

    p: int
    d: int
    matrix: np.ndarray

    @classmethod
    def from_vector(cls, r, p: int, d: int) -> "RidgeletOperator":
        p = zp_core.require_prime(p)
        r = _check_isometry_profile(r)
        if r.shape[0] != p:
            raise DimensionError(f"profile length {r.shape[0]} != modulus {p}")
        table = zp_core.ridge_index_table(p, d)  # guards the dense size
        matrix = p ** (-d / 2.0) * r[table]
        return cls(p, int(d), matrix)

    def apply(self, vec) -> np.ndarray:
        vec = np.asarray(vec, dtype=np.complex128)
        if vec.shape != (self.p**self.d,):
            raise DimensionError(
                f"operator expects length {self.p ** self.d}, got {vec.shape}"
            )
        return self.matrix @ vec


def build_r_dense(pair: ActivationPair, d: int) -> RidgeletOperator:
    """Dense isometry built from the pair's ridgelet profile."""
    return RidgeletOperator.from_vector(pair.r, pair.p, d)


def qrt_apply(state: QuditState, pair: ActivationPair) -> QuditState:
    """Run the four-stage register pipeline on a D-register state.

    The output amplitudes equal the dense isometry applied to the input
    amplitudes to within 1e-10, i.e. the coefficient table of the input
    treated as a grid function, laid out as lin(a) + b * p**d.
    """
    if state.p != pair.p:
        raise DimensionError(f"modulus mismatch: state {state.p}, pair {pair.p}")
    r = _check_isometry_profile(pair.r)
    p, d = state.p, state.num_registers

    # stage 1: auxiliary register becomes the highest digit
    amps = np.kron(r.astype(np.complex128), state.amps)
    arr = amps.reshape((p,) * (d + 1))

    # stage 2: forward DFT on inputs (axes 1..d), inverse DFT on auxiliary
    for axis in range(1, d + 1):
        arr = np.moveaxis(_dft_last(np.moveaxis(arr, axis, -1), False), -1, axis)
    arr = np.moveaxis(_dft_last(np.moveaxis(arr, 0, -1), True), -1, 0)

    flat = arr.reshape(p, p**d)
    v0_mass = float(np.sum(np.abs(flat[0]) ** 2))
    if v0_mass > TOL_V0_MASS:
        raise NotIsometric(
            f"auxiliary zero-frequency mass {v0_mass:.3e} exceeds {TOL_V0_MASS:.0e}"
        )

    # stage 3: controlled scaling permutation, identity on the v = 0 slice
    rays = zp_core.scale_index_table(p, d)
    permuted = flat.copy()
    v = np.arange(1, p)
    permuted[1:] = flat[v[:, None], rays[1:]]

    # stage 4: inverse DFT on the auxiliary register
    arr = permuted.reshape((p,) * (d + 1))
    arr = np.moveaxis(_dft_last(np.moveaxis(arr, 0, -1), True), -1, 0)
    return QuditState(p, d + 1, arr.reshape(-1))


def qrt_stage_count(d: int) -> int:
    """Register-level primitive stages executed for a D-register input.

    D forward DFTs, two inverse DFTs on the auxiliary register, and one
    controlled-arithmetic stage: D + 3 in total, linear in D.
    """
    d = int(d)
    if d < 1:
        raise ValueError("dimension must be at least 1")
    return d + 3


def measure_samples(state: QuditState, n: int, seed) -> np.ndarray:
    """n independent basis-measurement outcomes drawn from |amps|^2.

    Measurement destroys the state, so repeated sampling on hardware means
    repeated preparation; the simulator models that as independent draws
    from the fixed amplitude vector.  Deterministic for a given seed.
    """
    n = int(n)
    if n < 0:
        raise ValueError("sample count must be nonnegative")
    if n == 0:
        return np.empty(0, dtype=np.int64)
    probs = np.abs(state.amps) ** 2
    probs /= probs.sum()
    rng = np.random.default_rng(seed)
    return rng.choice(probs.shape[0], size=n, p=probs)
