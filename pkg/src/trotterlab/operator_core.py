"""Dense matrix primitives standing in for semigroup generators.

Everything here is a pure function of its arguments.  Matrices are numpy
arrays; a :class:`GeneratorSpec` wraps one together with the classification
data the inequality checks need (accretivity, normality, sector angle and
the bound constant ``C_A``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np
import scipy.integrate
import scipy.linalg

from trotterlab.errors import (
    AccuracyError,
    DimensionError,
    DomainError,
    InvalidInputError,
    SingularityError,
    UnsupportedInputError,
)

ACCRETIVE_TOL = 1e-10
NORMAL_TOL = 1e-10
MAX_CONDITION = 1e14
# eigenvector bases worse than this are treated as defective
MAX_EIGVEC_CONDITION = 1e8

DEFAULT_T_GRID = np.logspace(-4, 2, 200)


class NormKind(IntEnum):
    """Induced operator norm index; ``INF`` is stored as 0 for ordering."""

    ONE = 1
    TWO = 2
    INF = 0

    @classmethod
    def parse(cls, value) -> "NormKind":
        if isinstance(value, NormKind):
            return value
        if isinstance(value, str):
            key = value.strip().lower()
            table = {"1": cls.ONE, "2": cls.TWO, "inf": cls.INF, "infinity": cls.INF}
            if key in table:
                return table[key]
        elif value == 1:
            return cls.ONE
        elif value == 2:
            return cls.TWO
        elif value == math.inf:
            return cls.INF
        raise InvalidInputError(f"norm must be one of 1, 2, inf; got {value!r}")

    @property
    def label(self) -> str:
        return "inf" if self is NormKind.INF else str(int(self))

    @property
    def numpy_ord(self):
        return np.inf if self is NormKind.INF else int(self)


def as_matrix(m) -> np.ndarray:
    """Validate and return ``m`` as a square 2-D array with finite entries."""
    a = np.asarray(m)
    if a.dtype.kind not in "biufc":
        raise InvalidInputError("matrix entries must be numeric")
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimensionError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix has NaN or infinite entries")
    if a.dtype.kind in "biu":
        a = a.astype(float)
    return a


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def is_accretive(a: np.ndarray, tol: float = ACCRETIVE_TOL) -> bool:
    return bool(np.linalg.eigvalsh(hermitian_part(a)).min() >= -tol)


def is_normal(a: np.ndarray, tol: float = NORMAL_TOL) -> bool:
    comm = a @ a.conj().T - a.conj().T @ a
    return bool(np.linalg.norm(comm, 2) <= tol * max(1.0, np.linalg.norm(a, 2) ** 2))


def is_hermitian(a: np.ndarray, tol: float = NORMAL_TOL) -> bool:
    return bool(np.linalg.norm(a - a.conj().T, 2) <= tol * max(1.0, np.linalg.norm(a, 2)))


def _sector_angle(a: np.ndarray) -> float:
    lam = np.linalg.eigvals(a)
    lam = lam[np.abs(lam) > 1e-14 * max(1.0, np.abs(lam).max())]
    if lam.size == 0:
        return math.pi / 2
    worst = float(np.abs(np.angle(lam)).max())
    return min(max(math.pi / 2 - worst, 0.0), math.pi / 2)


def measure_bound_constant(a: np.ndarray, t_grid=DEFAULT_T_GRID) -> float:
    """Grid estimate of ``sup_t ||exp(-tA)||_2``, never below 1.

    The grid maximum under-estimates the true supremum; denser grids refine it.
    """
    worst = max(np.linalg.norm(scipy.linalg.expm(-t * a), 2) for t in t_grid)
    return max(1.0, float(worst))


@dataclass(frozen=True)
class GeneratorSpec:
    """A matrix generator ``A`` of the semigroup ``t -> exp(-tA)``."""

    matrix: np.ndarray = field(repr=False)
    is_accretive: bool
    is_normal: bool
    sector_semi_angle: float | None
    bound_constant_CA: float

    def __post_init__(self):
        if self.bound_constant_CA < 1.0:
            raise InvalidInputError("bound_constant_CA must be >= 1")
        if self.sector_semi_angle is not None and not self.is_normal:
            raise InvalidInputError("sector angle is only defined for normal generators")

    @classmethod
    def from_matrix(cls, m, bound_constant: float | None = None) -> "GeneratorSpec":
        a = as_matrix(m)
        acc = is_accretive(a)
        normal = is_normal(a)
        angle = _sector_angle(a) if normal else None
        if bound_constant is None:
            bound_constant = 1.0 if acc else measure_bound_constant(a)
        return cls(a, acc, normal, angle, float(bound_constant))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_hermitian(self) -> bool:
        return is_hermitian(self.matrix)

    def shifted(self, eta: float) -> "GeneratorSpec":
        """``A + eta*I``; the bound constant carries over for ``eta >= 0``."""
        a = self.matrix + eta * np.eye(self.dim)
        return GeneratorSpec.from_matrix(a, bound_constant=self.bound_constant_CA if eta >= 0 else None)


def _matrix_of(a) -> np.ndarray:
    return a.matrix if isinstance(a, GeneratorSpec) else as_matrix(a)


def expm(a, t: float = 1.0) -> np.ndarray:
    """Return ``exp(-tA)`` by scaling and squaring with a diagonal Pade approximant."""
    m = _matrix_of(a)
    if not math.isfinite(t) or t < 0:
        raise DomainError(f"t must be a finite nonnegative real, got {t}")
    if t == 0:
        return np.eye(m.shape[0], dtype=m.dtype)
    return scipy.linalg.expm(-t * m)


def resolvent(a, z: complex) -> np.ndarray:
    """Return ``(A + zI)^{-1}``.

    Raises :class:`SingularityError` when the 2-norm condition number of
    ``A + zI`` exceeds ``1e14``.
    """
    m = _matrix_of(a)
    shifted = m + z * np.eye(m.shape[0])
    cond = float(np.linalg.cond(shifted))
    if not math.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularityError("A + zI is numerically singular", cond)
    lu = scipy.linalg.lu_factor(shifted)
    return scipy.linalg.lu_solve(lu, np.eye(m.shape[0], dtype=shifted.dtype))


def inverse(a) -> np.ndarray:
    return resolvent(a, 0.0)


def _spectral_power(m: np.ndarray, alpha: float) -> np.ndarray:
    """Principal ``m**alpha`` for diagonalizable ``m`` with 0 <= alpha < 1."""
    if is_hermitian(m):
        lam, v = np.linalg.eigh(hermitian_part(m))
        if lam.min() < -ACCRETIVE_TOL * max(1.0, abs(lam).max()):
            raise DomainError("eigenvalue with negative real part")
        powered = np.where(lam > 0, np.abs(lam), 0.0) ** alpha if alpha > 0 else np.ones_like(lam)
        out = (v * powered) @ v.conj().T
        return out.real if np.isrealobj(m) else out
    lam, v = np.linalg.eig(m)
    scale = max(1.0, float(np.abs(lam).max()))
    if np.any(lam.real < -ACCRETIVE_TOL * scale):
        raise DomainError("eigenvalue with negative real part")
    if np.linalg.cond(v) > MAX_EIGVEC_CONDITION:
        raise UnsupportedInputError("matrix is defective or too close to defective")
    zero = np.abs(lam) <= 1e-14 * scale
    powered = np.where(zero, 0.0, np.power(np.where(zero, 1.0, lam), alpha))
    out = (v * powered) @ np.linalg.inv(v)
    if np.isrealobj(m):
        out = out.real
    return out


def frac_power(a, alpha: float) -> np.ndarray:
    """``A**alpha`` for ``alpha`` in ``[0, 2)`` via eigendecomposition.

    For ``alpha >= 1`` the integer part is applied as a plain matrix factor.
    """
    m = _matrix_of(a)
    if not 0 <= alpha < 2:
        raise DomainError(f"alpha must lie in [0, 2), got {alpha}")
    if alpha == 0:
        return np.eye(m.shape[0], dtype=m.dtype)
    whole = int(alpha)
    rest = alpha - whole
    frac = _spectral_power(m, rest) if rest > 0 else np.eye(m.shape[0], dtype=m.dtype)
    if whole == 1:
        # validate the spectrum even when there is no fractional remainder
        if rest == 0:
            _spectral_power(m, 0.5)
        return m @ frac
    return frac


def balakrishnan_quadrature(a, alpha: float, x, atol: float = 1e-8) -> np.ndarray:
    """Evaluate ``A**alpha @ x`` from the semigroup integral representation.

    ``A**alpha x = Gamma(-alpha)^{-1} int_0^inf l^{-alpha-1} (exp(-lA) - I) x dl``.
    The range is split at ``l = 1``.  On ``[0, 1]`` the substitution
    ``l = u**(1/(1-alpha))`` turns the integrand into a smooth function of
    ``u``; on ``[1, inf)`` the ``-I`` part integrates in closed form to
    ``-x/alpha``.  Only matrix exponentials are used, so the result is
    independent of :func:`frac_power`.
    """
    m = _matrix_of(a)
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    x = np.asarray(x, dtype=np.result_type(m.dtype, float))
    if x.shape != (m.shape[0],):
        raise DimensionError(f"vector of length {m.shape[0]} expected, got shape {x.shape}")
    lam = np.linalg.eigvals(m)
    if np.any(np.abs(lam) < 1e-12 * max(1.0, np.abs(lam).max())):
        raise SingularityError("generator is not boundedly invertible", math.inf)

    p = 1.0 / (1.0 - alpha)
    n = m.shape[0]
    aug = np.zeros((n + 1, n + 1), dtype=np.result_type(m.dtype, x.dtype))
    aug[:n, n] = x

    def near(u):
        # (exp(-lA) - I) x = -l A phi1(-lA) x, with phi1(-lA) x read off the
        # augmented exponential; the substitution leaves a factor -p.
        aug[:n, :n] = -(u**p) * m
        return -p * (m @ scipy.linalg.expm(aug)[:n, n])

    def far(lam_):
        return lam_ ** (-alpha - 1.0) * (scipy.linalg.expm(-lam_ * m) @ x)

    near_val, near_err = scipy.integrate.quad_vec(near, 0.0, 1.0, epsabs=atol / 4, epsrel=0, limit=400)
    far_val, far_err = scipy.integrate.quad_vec(far, 1.0, np.inf, epsabs=atol / 4, epsrel=0, limit=400)
    err = float(near_err + far_err)
    if not err <= atol:
        raise AccuracyError("quadrature did not reach the requested tolerance", err)
    integral = near_val + far_val - x / alpha
    return integral / math.gamma(-alpha)


def op_norm(m, norm=NormKind.TWO) -> float:
    """Induced operator norm for p in {1, 2, inf}."""
    a = np.asarray(m)
    if a.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix has NaN or infinite entries")
    return float(np.linalg.norm(a, NormKind.parse(norm).numpy_ord))
