"""Truncated Fock-space states and operators for a single bosonic mode.

Everything here is a dense numpy array wrapped in a frozen dataclass. Joint
atom-field states are stored as a ``(levels, dim)`` amplitude array indexed by
``(atomic level, photon number)``; the flattened ordering used by the joint
Hamiltonians is ``level * dim + n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from .errors import TruncationError

NORM_TOL = 1e-9
DISPLACEMENT_BUFFER = 8


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


class AtomLevel(IntEnum):
    """Atomic levels of the lambda system; the value is the row index in a joint state."""

    G = 0
    E = 1
    H = 2


@dataclass(frozen=True)
class TruncatedFockSpace:
    """Fock basis ``|0>, ..., |dim-1>``."""

    dim: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise ValueError(f"Fock space dimension must be an integer >= 2, got {self.dim}")

    @property
    def numbers(self) -> np.ndarray:
        return np.arange(self.dim)


@dataclass(frozen=True)
class FieldState:
    """Normalized pure state of the cavity mode (the amplitudes ``c_n``)."""

    space: TruncatedFockSpace
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.shape != (self.space.dim,):
            raise ValueError(f"expected {self.space.dim} amplitudes, got shape {amps.shape}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"field state is not normalized (norm={norm!r})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes, space: TruncatedFockSpace | None = None) -> "FieldState":
        """Build a state from arbitrary (non-zero) amplitudes, normalizing them."""
        amps = np.asarray(amplitudes, dtype=complex)
        if space is None:
            space = TruncatedFockSpace(len(amps))
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(space, amps / norm)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def embed(self, dim: int) -> "FieldState":
        """Return the same state in a space of dimension ``dim`` (zero padding or exact truncation)."""
        if dim >= self.space.dim:
            amps = np.zeros(dim, dtype=complex)
            amps[: self.space.dim] = self.amplitudes
        else:
            if np.linalg.norm(self.amplitudes[dim:]) > NORM_TOL:
                raise TruncationError(f"state has weight above n={dim - 1}; cannot truncate")
            amps = self.amplitudes[:dim]
        return FieldState.from_amplitudes(amps, TruncatedFockSpace(dim))


@dataclass(frozen=True)
class JointState:
    """Pure atom-field state; ``amplitudes[level, n]``.

    ``levels == 2`` is the effective ``{g, e}`` model, ``levels == 3`` the full
    lambda system including the intermediate level ``h``.
    """

    space: TruncatedFockSpace
    levels: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.levels not in (2, 3):
            raise ValueError(f"joint states have 2 or 3 atomic levels, got {self.levels}")
        amps = _frozen(np.reshape(self.amplitudes, (self.levels, self.space.dim)))
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"joint state is not normalized (norm={norm!r})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def product(cls, level: AtomLevel, field_state: FieldState, levels: int = 2) -> "JointState":
        """``|level> (x) |field>``."""
        if level >= levels:
            raise ValueError(f"level {level.name} does not exist in a {levels}-level atom")
        amps = np.zeros((levels, field_state.space.dim), dtype=complex)
        amps[level] = field_state.amplitudes
        return cls(field_state.space, levels, amps)

    @property
    def vector(self) -> np.ndarray:
        return self.amplitudes.reshape(-1)

    def with_levels(self, levels: int) -> "JointState":
        """Embed a 2-level state into the 3-level space, or drop an empty ``h`` row."""
        if levels == self.levels:
            return self
        if levels == 3:
            amps = np.zeros((3, self.space.dim), dtype=complex)
            amps[:2] = self.amplitudes
            return JointState(self.space, 3, amps)
        if np.linalg.norm(self.amplitudes[2]) > NORM_TOL:
            raise ValueError("cannot drop level h: it is populated")
        return JointState(self.space, 2, self.amplitudes[:2])


@dataclass(frozen=True)
class Operator:
    """Dense matrix acting on the field space (``levels == 1``) or on a joint space."""

    space: TruncatedFockSpace
    matrix: np.ndarray = field(repr=False)
    levels: int = 1

    def __post_init__(self):
        mat = _frozen(self.matrix)
        n = self.levels * self.space.dim
        if mat.shape != (n, n):
            raise ValueError(f"operator must be {n}x{n}, got {mat.shape}")
        object.__setattr__(self, "matrix", mat)

    def apply(self, state: FieldState) -> np.ndarray:
        """Matrix-vector product; returns raw amplitudes (not renormalized)."""
        if self.levels != 1 or state.space != self.space:
            raise ValueError("operator and state live in different spaces")
        return self.matrix @ state.amplitudes


def default_dim(alpha_max: float = 0.0, n_top: int = 0) -> int:
    """Truncation rule ``ceil(|a|^2 + 6|a|) + n_top + 10``.

    ``alpha_max`` is the largest coherent amplitude or displacement in a run and
    ``n_top`` the highest photon number the protocol targets.
    """
    a = abs(alpha_max)
    return int(math.ceil(a * a + 6.0 * a)) + int(n_top) + 10


def _check_alpha(space: TruncatedFockSpace, alpha: complex, what: str) -> None:
    a2 = abs(alpha) ** 2
    if not space.dim > a2 + 6.0 * math.sqrt(a2) + 6.0:
        raise TruncationError(
            f"dim={space.dim} too small for {what} with |alpha|^2={a2:.4g}; "
            f"need dim > {a2 + 6.0 * math.sqrt(a2) + 6.0:.4g}"
        )


def fock_state(space: TruncatedFockSpace, n: int) -> FieldState:
    if not 0 <= n < space.dim:
        raise TruncationError(f"Fock state |{n}> outside a space of dimension {space.dim}")
    amps = np.zeros(space.dim, dtype=complex)
    amps[n] = 1.0
    return FieldState(space, amps)


def coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    """Untruncated-normalization amplitudes ``exp(-|a|^2/2) a^n / sqrt(n!)`` for ``n < dim``."""
    n = np.arange(dim)
    if alpha == 0:
        amps = np.zeros(dim, dtype=complex)
        amps[0] = 1.0
        return amps
    log_mag = -0.5 * abs(alpha) ** 2 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(log_mag + 1j * n * np.angle(alpha))


def coherent_state(space: TruncatedFockSpace, alpha: complex) -> FieldState:
    _check_alpha(space, alpha, "coherent state")
    amps = coherent_amplitudes(alpha, space.dim)
    norm = np.linalg.norm(amps)
    if abs(1.0 - norm) > NORM_TOL:
        raise TruncationError(f"coherent state loses {1.0 - norm:.3g} of its norm at dim={space.dim}")
    return FieldState(space, amps / norm)


def annihilation_matrix(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def annihilation(space: TruncatedFockSpace) -> Operator:
    """Lowering operator; creation out of the top level ``dim-1`` is dropped."""
    return Operator(space, annihilation_matrix(space.dim))


def displacement(space: TruncatedFockSpace, alpha: complex) -> Operator:
    """``D(alpha) = exp(alpha a^dag - alpha* a)``.

    The exponential is taken on a space padded by ``DISPLACEMENT_BUFFER`` levels
    and then cut back to ``space.dim`` so the top rows are not distorted by the
    edge of the ladder. Columns near the top still leak out of the space; see
    :func:`reliable_block`.
    """
    _check_alpha(space, alpha, "displacement")
    if alpha == 0:
        return Operator(space, np.eye(space.dim))
    a = annihilation_matrix(space.dim + DISPLACEMENT_BUFFER)
    gen = alpha * a.conj().T - np.conj(alpha) * a
    return Operator(space, expm(gen)[: space.dim, : space.dim])


def reliable_block(dim: int, alpha: complex) -> int:
    """Number of low Fock levels whose image under ``D(alpha)`` stays inside ``dim``.

    ``D(alpha)|n>`` spreads over roughly ``(sqrt(n) +- |alpha|)**2``; on the block
    ``n < (sqrt(dim) - |alpha| - 1.5)**2`` the truncated displacement is unitary
    to ~1e-8.
    """
    return int(max(0.0, math.sqrt(dim) - abs(alpha) - 1.5) ** 2)


def inner(a: FieldState | JointState, b: FieldState | JointState) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    if type(a) is not type(b) or a.space != b.space or getattr(a, "levels", 1) != getattr(b, "levels", 1):
        raise ValueError("inner product between states of different shape")
    return complex(np.vdot(a.amplitudes.reshape(-1), b.amplitudes.reshape(-1)))
