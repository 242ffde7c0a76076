"""Dense linear algebra on a truncated Fock space.

Conventions used throughout the package (hbar = 1):

    x = (a + a^dag)/sqrt(2),    p = (a - a^dag)/(i*sqrt(2)),    [x, p] = i
    D(s) = exp(s*a^dag - conj(s)*a)        (displacement)
    S(z) = exp(z*(a^dag^2 - a^2)/2)        (squeeze; S^dag a S = cosh(z) a + sinh(z) a^dag)

Squeezing magnitudes are quoted in dB of in-phase quadrature power gain,
lambda_dB = 10*log10(lambda^2); internal computations use the field gain
lambda = e^z.

All matrix exponentials go through Hermitian spectral decomposition: every
generator in scope is (anti-)Hermitian, so this is unconditionally stable and
unitary up to eigensolver tolerance.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np


class TruncationWarning(UserWarning):
    """A requested operation strains the Fock cutoff."""


class InvalidDimensionError(ValueError):
    """Fock dimension too small for the requested construction."""


class DimensionMismatchError(ValueError):
    """Operands live in different truncated spaces."""


class ContractViolationError(ValueError):
    """An input violates a declared pre-condition (e.g. non-Hermitian generator)."""


HERMITICITY_RTOL = 1e-12


def interior_dim(n: int) -> int:
    """Size of the cutoff-insulated block: N - ceil(4*sqrt(N))."""
    return max(1, n - math.ceil(4.0 * math.sqrt(n)))


def lambda_from_db(db: float) -> float:
    """Field gain from dB of quadrature power gain (15 dB -> 10**0.75)."""
    return 10.0 ** (db / 20.0)


def db_from_lambda(lam: float) -> float:
    return 20.0 * math.log10(lam)


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Operator:
    """Dense complex matrix on an N-dimensional Fock space."""

    matrix: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidDimensionError(f"operator matrix must be square, got {m.shape}")
        object.__setattr__(self, "matrix", m)
        if self.hermitian:
            scale = np.abs(m).max()
            if scale > 0 and np.abs(m - m.conj().T).max() > HERMITICITY_RTOL * scale:
                raise ContractViolationError("matrix declared hermitian is not")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> "Operator":
        return Operator(self.matrix.conj().T, hermitian=self.hermitian)

    def __matmul__(self, other):
        if isinstance(other, Operator):
            _check_dims(self.dim, other.dim)
            return Operator(self.matrix @ other.matrix)
        if isinstance(other, PureState):
            _check_dims(self.dim, other.dim)
            return PureState(self.matrix @ other.vector, normalize=False)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, Operator):
            _check_dims(self.dim, other.dim)
            return Operator(self.matrix + other.matrix,
                            hermitian=self.hermitian and other.hermitian)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, Operator):
            _check_dims(self.dim, other.dim)
            return Operator(self.matrix - other.matrix,
                            hermitian=self.hermitian and other.hermitian)
        return NotImplemented

    def __mul__(self, c):
        if isinstance(c, (int, float, complex)):
            herm = self.hermitian and (np.imag(c) == 0)
            return Operator(self.matrix * c, hermitian=bool(herm))
        return NotImplemented

    __rmul__ = __mul__


@dataclass(frozen=True)
class PureState:
    """Complex amplitude vector in the Fock basis, unit norm."""

    vector: np.ndarray
    normalize: bool = True

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=complex).ravel()
        nrm = float(np.linalg.norm(v))
        if nrm == 0.0:
            raise ValueError("cannot construct a state from the zero vector")
        if self.normalize:
            v = v / nrm
        elif abs(nrm - 1.0) > 1e-10:
            raise ContractViolationError(f"state norm {nrm} deviates from 1 beyond 1e-10")
        object.__setattr__(self, "vector", v)

    @property
    def dim(self) -> int:
        return self.vector.shape[0]

    def overlap(self, other: "PureState") -> complex:
        _check_dims(self.dim, other.dim)
        return complex(np.vdot(self.vector, other.vector))

    def density_matrix(self) -> "MixedState":
        return MixedState(np.outer(self.vector, self.vector.conj()))


@dataclass(frozen=True)
class MixedState:
    """Dense density matrix: unit trace, Hermitian."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidDimensionError(f"density matrix must be square, got {m.shape}")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > 1e-8:
            raise ContractViolationError(f"trace {tr} deviates from 1 beyond 1e-8")
        scale = max(np.abs(m).max(), 1e-300)
        if np.abs(m - m.conj().T).max() > 1e-10 * max(1.0, scale):
            raise ContractViolationError("density matrix is not hermitian to 1e-10")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


@dataclass(frozen=True)
class TruncatedMode:
    """A single bosonic mode truncated to N Fock levels, with cached operators."""

    dim: int
    _a: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.dim < 2:
            raise InvalidDimensionError(f"Fock dimension must be >= 2, got {self.dim}")
        object.__setattr__(self, "_a", _annihilation_matrix(self.dim))

    @property
    def a(self) -> np.ndarray:
        return self._a

    @property
    def adag(self) -> np.ndarray:
        return self._a.conj().T

    @property
    def n(self) -> np.ndarray:
        return np.diag(np.arange(self.dim, dtype=float)).astype(complex)

    @property
    def x(self) -> np.ndarray:
        return (self._a + self.adag) / math.sqrt(2.0)

    @property
    def p(self) -> np.ndarray:
        return (self._a - self.adag) / (1j * math.sqrt(2.0))


def _check_dims(d1: int, d2: int):
    if d1 != d2:
        raise DimensionMismatchError(f"dimension mismatch: {d1} vs {d2}")


def _annihilation_matrix(n: int) -> np.ndarray:
    m = np.zeros((n, n), dtype=complex)
    m[np.arange(n - 1), np.arange(1, n)] = np.sqrt(np.arange(1.0, n))
    return m


# ---------------------------------------------------------------------------
# operator constructors
# ---------------------------------------------------------------------------


def annihilation(n: int) -> Operator:
    """Mode annihilation operator a with a[k-1, k] = sqrt(k)."""
    if n < 2:
        raise InvalidDimensionError(f"Fock dimension must be >= 2, got {n}")
    return Operator(_annihilation_matrix(n))


def position(n: int) -> Operator:
    return Operator(TruncatedMode(n).x, hermitian=True)


def momentum(n: int) -> Operator:
    return Operator(TruncatedMode(n).p, hermitian=True)


def number(n: int) -> Operator:
    return Operator(TruncatedMode(n).n, hermitian=True)


def vacuum(n: int) -> PureState:
    v = np.zeros(n, dtype=complex)
    v[0] = 1.0
    return PureState(v)


def fock_state(n: int, k: int) -> PureState:
    if not 0 <= k < n:
        raise InvalidDimensionError(f"Fock index {k} outside [0, {n})")
    v = np.zeros(n, dtype=complex)
    v[k] = 1.0
    return PureState(v)


def _expm_hermitian(h: np.ndarray, scale: complex) -> np.ndarray:
    """exp(scale * H) for Hermitian H via spectral decomposition."""
    w, v = np.linalg.eigh(h)
    return (v * np.exp(scale * w)) @ v.conj().T


def exp_generator(g: Operator | np.ndarray, t: float) -> Operator:
    """Unitary exp(-i*G*t) for a Hermitian generator G."""
    m = g.matrix if isinstance(g, Operator) else np.asarray(g, dtype=complex)
    scale = np.abs(m).max()
    if scale > 0 and np.abs(m - m.conj().T).max() > 1e-10 * scale:
        raise ContractViolationError("exp_generator requires a hermitian generator")
    return Operator(_expm_hermitian(m, -1j * t))


def displacement(s: complex, n: int) -> Operator:
    """Unitary D(s) = exp(s*a^dag - conj(s)*a)."""
    if n < 2:
        raise InvalidDimensionError(f"Fock dimension must be >= 2, got {n}")
    if abs(s) ** 2 > n / 4.0:
        warnings.warn(
            f"displacement |s|^2 = {abs(s)**2:.3g} strains Fock cutoff N = {n}",
            TruncationWarning,
            stacklevel=2,
        )
    a = _annihilation_matrix(n)
    gen = s * a.conj().T - np.conj(s) * a
    # gen is anti-hermitian: exp(gen) = exp(-i * (i*gen)) with i*gen hermitian
    return Operator(_expm_hermitian(1j * gen, -1j))


def squeeze(z: float, n: int) -> Operator:
    """Unitary S(z) = exp(z*(a^dag^2 - a^2)/2); x-variance of S(z)|0> is e^{2z}/2."""
    if n < 2:
        raise InvalidDimensionError(f"Fock dimension must be >= 2, got {n}")
    if math.exp(2.0 * abs(z)) > n / 4.0:
        warnings.warn(
            f"squeeze gain e^(2|z|) = {math.exp(2*abs(z)):.3g} strains Fock cutoff N = {n}",
            TruncationWarning,
            stacklevel=2,
        )
    a = _annihilation_matrix(n)
    ad = a.conj().T
    gen = 0.5 * z * (ad @ ad - a @ a)
    return Operator(_expm_hermitian(1j * gen, -1j))


# ---------------------------------------------------------------------------
# measurement-like functionals
# ---------------------------------------------------------------------------


def expectation(op: Operator | np.ndarray, state: PureState | MixedState) -> complex:
    m = op.matrix if isinstance(op, Operator) else np.asarray(op)
    if isinstance(state, PureState):
        _check_dims(m.shape[0], state.dim)
        return complex(np.vdot(state.vector, m @ state.vector))
    _check_dims(m.shape[0], state.dim)
    return complex(np.trace(m @ state.matrix))


def variance(op: Operator | np.ndarray, state: PureState | MixedState) -> float:
    """<A^2> - <A>^2 for a Hermitian observable A."""
    m = op.matrix if isinstance(op, Operator) else np.asarray(op)
    mean = np.real(expectation(m, state))
    second = np.real(expectation(m @ m, state))
    return float(second - mean * mean)


def fidelity(target: PureState, out: PureState | MixedState) -> float:
    """|<t|psi>|^2 for pure outputs, <t|rho|t> for mixed ones."""
    if isinstance(out, PureState):
        _check_dims(target.dim, out.dim)
        f = abs(np.vdot(target.vector, out.vector)) ** 2
    else:
        _check_dims(target.dim, out.dim)
        f = np.real(np.vdot(target.vector, out.matrix @ target.vector))
    return float(min(max(f, 0.0), 1.0))


def check_truncation_convergence(build_scalar, n: int, tol: float = 1e-6) -> float:
    """Evaluate a scalar at cutoff n and 2n; warn when doubling moves it beyond tol.

    `build_scalar` maps a Fock dimension to a real/complex number. Returns the
    value at n.
    """
    v1 = build_scalar(n)
    v2 = build_scalar(2 * n)
    if abs(v1 - v2) > tol:
        warnings.warn(
            f"cutoff doubling moved result by {abs(v1 - v2):.3g} (> {tol:.3g}) at N = {n}",
            TruncationWarning,
            stacklevel=2,
        )
    return v1


# ---------------------------------------------------------------------------
# Wigner function
# ---------------------------------------------------------------------------


def wigner(state: PureState | MixedState, xs, ps) -> np.ndarray:
    """Wigner function W(x, p) on the grid xs x ps, normalized to integral 1.

    Returns W with W[i, j] = W(xs[i], ps[j]). Uses the Fock-basis Laguerre
    ladder; cost O(len(grid) * N^2).
    """
    xs = np.asarray(xs, dtype=float)
    ps = np.asarray(ps, dtype=float)
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ps))):
        raise ValueError("Wigner grid must be finite")
    if isinstance(state, PureState):
        rho = np.outer(state.vector, state.vector.conj())
    else:
        rho = state.matrix
    m = rho.shape[0]

    x = xs[:, None]
    p = ps[None, :]
    b = 2.0 * (x * x + p * p)  # 4|alpha|^2 with alpha = (x + i p)/sqrt(2)
    two_alpha_conj = math.sqrt(2.0) * (x - 1j * p)

    w = np.zeros((xs.size, ps.size), dtype=float)
    # scaled diagonal-offset factor g_d = (2 alpha^*)^d / sqrt(d!)
    g = np.ones_like(two_alpha_conj)
    for d in range(m):
        coeffs = np.diagonal(rho, offset=-d)  # rho[k+d, k]
        if np.any(coeffs != 0):
            # s = sum_k rho[k+d,k] (-1)^k sqrt(k!/(k+d)!) L_k^d(b) * (2 alpha^*)^d
            #   = g_d * sum_k rho[k+d,k] (-1)^k / sqrt(binom(k+d,k)) L_k^d(b)
            lag_prev = np.zeros_like(b)
            lag = np.ones_like(b)  # L_0^d
            r = 1.0  # 1/sqrt(binom(k+d, k))
            sgn = 1.0
            acc = np.zeros_like(two_alpha_conj)
            for k in range(coeffs.size):
                if k > 0:
                    lag, lag_prev = (
                        ((2 * k - 1 + d - b) * lag - (k - 1 + d) * lag_prev) / k,
                        lag,
                    )
                    r *= math.sqrt(k / (k + d))
                    sgn = -sgn
                c = coeffs[k]
                if c != 0:
                    acc = acc + (sgn * r * c) * lag
            contrib = acc * g
            if d == 0:
                w += np.real(contrib)
            else:
                w += 2.0 * np.real(contrib)
        g = g * two_alpha_conj / math.sqrt(d + 1.0)
    return w * np.exp(-0.5 * b) / math.pi
