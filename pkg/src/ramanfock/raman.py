"""Selective Raman coupling: parameters, Hamiltonians and resonant doublets.

Units: every frequency is an angular frequency in rad/s and ``hbar = 1``, so
Hamiltonians are in rad/s and times in seconds. Couplings are real and
positive (the classical drive is taken in phase with the cavity coupling).

Atomic level ``h`` is far detuned by ``delta`` from both Raman legs. In the
effective two-level model it has been eliminated, leaving ac-Stark shifts
``omega_l**2/delta`` on ``g`` and ``g**2 n/delta`` on ``e`` plus the Raman
coupling ``(g omega_l/delta)(sigma_eg a^dag + h.c.)``. The photon-number
dependent shift is cancelled for one chosen subspace ``{|g,n_o>, |e,n_o+1>}``
by a constant energy offset on level ``e`` (see :func:`compensation_shift`).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .hilbert import Operator, TruncatedFockSpace, annihilation_matrix

TWO_PI = 2.0 * math.pi

# delta must dominate both couplings by these factors
DETUNING_WARN_RATIO = 10.0
DETUNING_ERROR_RATIO = 5.0


@dataclass(frozen=True)
class RamanParams:
    """Cavity coupling ``g``, classical Rabi frequency ``omega_l`` and Raman detuning ``delta`` (rad/s)."""

    g: float
    omega_l: float
    delta: float

    def __post_init__(self):
        if self.g < 0 or self.omega_l < 0:
            raise ValueError("couplings are stored as non-negative magnitudes")
        if self.delta <= 0:
            raise ValueError("the Raman detuning must be positive")
        for name, value in (("g", self.g), ("omega_l", self.omega_l)):
            if value == 0:
                continue
            ratio = self.delta / value
            if ratio < DETUNING_ERROR_RATIO:
                raise ValueError(f"delta/{name} = {ratio:.3g} < {DETUNING_ERROR_RATIO}: not dispersive")
            if ratio < DETUNING_WARN_RATIO:
                warnings.warn(f"delta/{name} = {ratio:.3g} is only marginally dispersive", stacklevel=3)

    @classmethod
    def from_hz(cls, g_hz: float, omega_l_hz: float, delta_hz: float) -> "RamanParams":
        """Build from ordinary frequencies (``g/2pi`` etc. in Hz)."""
        return cls(TWO_PI * g_hz, TWO_PI * omega_l_hz, TWO_PI * delta_hz)

    @classmethod
    def from_ratio(cls, g: float, r: float, delta_over_g: float) -> "RamanParams":
        """Parametrize by ``r = g/omega_l`` and ``delta/g``."""
        return cls(g, g / r, g * delta_over_g)

    @property
    def r(self) -> float:
        """Selectivity ratio ``g / omega_l``."""
        if self.omega_l == 0:
            return math.inf if self.g > 0 else math.nan
        return self.g / self.omega_l

    @property
    def raman_coupling(self) -> float:
        """``g * omega_l / delta``, the vacuum Raman Rabi frequency."""
        return self.g * self.omega_l / self.delta


@dataclass(frozen=True)
class Doublet:
    """Dressed states of the subspace ``{|g,n>, |e,n+1>}``.

    Eigenvalues are measured from the ``|g,n>`` diagonal entry; the state
    vectors are the two components over ``(|g,n>, |e,n+1>)``.
    """

    n: int
    lambda_plus: float
    lambda_minus: float
    state_plus: np.ndarray
    state_minus: np.ndarray


def detuning_delta_n(params: RamanParams, n_o: int, n) -> np.ndarray | float:
    """Residual detuning of subspace ``n`` once subspace ``n_o`` is tuned to resonance."""
    return params.g**2 / params.delta * (np.asarray(n, dtype=float) - n_o)


def rabi_g_n(params: RamanParams, n) -> np.ndarray | float:
    """Raman coupling between ``|g,n>`` and ``|e,n+1>``."""
    return params.raman_coupling * np.sqrt(np.asarray(n, dtype=float) + 1.0)


def omega_n(params: RamanParams, n_o: int, n) -> np.ndarray | float:
    """Half the doublet splitting, ``sqrt(Delta_n**2/4 + G_n**2)``."""
    return np.hypot(0.5 * detuning_delta_n(params, n_o, n), rabi_g_n(params, n))


def stark_difference(params: RamanParams, n) -> np.ndarray | float:
    """Uncompensated energy of ``|e,n+1>`` minus that of ``|g,n>``."""
    return (params.g**2 * (np.asarray(n, dtype=float) + 1.0) - params.omega_l**2) / params.delta


def compensation_shift(params: RamanParams, n_o: int) -> float:
    """Energy offset that brings subspace ``n_o`` to exact resonance.

    It is subtracted from level ``e`` in both the effective and the full model.
    """
    return float(stark_difference(params, n_o))


def _check_dim(space: TruncatedFockSpace, n_o: int) -> None:
    if space.dim < n_o + 2:
        raise ValueError(f"dim={space.dim} cannot hold the resonant pair |g,{n_o}>, |e,{n_o + 1}>")


def effective_hamiltonian(params: RamanParams, n_o: int, space: TruncatedFockSpace) -> Operator:
    """Two-level Hamiltonian on the ``2*dim`` joint space, ordering ``(g, n)`` then ``(e, n)``."""
    _check_dim(space, n_o)
    dim = space.dim
    a = annihilation_matrix(dim)
    n_op = np.diag(np.arange(dim, dtype=float))
    eye = np.eye(dim)
    h = np.zeros((2 * dim, 2 * dim), dtype=complex)
    h[:dim, :dim] = params.omega_l**2 / params.delta * eye
    h[dim:, dim:] = params.g**2 / params.delta * n_op - compensation_shift(params, n_o) * eye
    # <e, n+1| H |g, n> = G_n
    h[dim:, :dim] = params.raman_coupling * a.conj().T
    h[:dim, dim:] = params.raman_coupling * a
    return Operator(space, h, levels=2)


def full_hamiltonian_parts(params: RamanParams, n_o: int, space: TruncatedFockSpace):
    """Return ``(A, C)`` with ``H(t) = A exp(-i delta t) + A^dag exp(i delta t) + C``.

    ``A = omega_l |h><g| + g |h><e| a`` raises into ``h``; ``C`` is the compensation
    offset on ``e``. Ordering of the ``3*dim`` joint space is ``g, e, h``.
    """
    _check_dim(space, n_o)
    dim = space.dim
    a = annihilation_matrix(dim)
    raise_op = np.zeros((3 * dim, 3 * dim), dtype=complex)
    raise_op[2 * dim :, :dim] = params.omega_l * np.eye(dim)
    raise_op[2 * dim :, dim : 2 * dim] = params.g * a
    offset = np.zeros((3 * dim, 3 * dim), dtype=complex)
    offset[dim : 2 * dim, dim : 2 * dim] = -compensation_shift(params, n_o) * np.eye(dim)
    return raise_op, offset


def full_hamiltonian(params: RamanParams, n_o: int, space: TruncatedFockSpace, t: float) -> Operator:
    """Interaction-picture lambda-system Hamiltonian at time ``t`` on the ``3*dim`` joint space."""
    raise_op, offset = full_hamiltonian_parts(params, n_o, space)
    x = raise_op * np.exp(-1j * params.delta * t)
    return Operator(space, x + x.conj().T + offset, levels=3)


def eigendoublets(params: RamanParams, n_o: int, n: int) -> Doublet:
    """Dressed states of subspace ``n`` in closed form."""
    if n < 0:
        raise ValueError("photon number must be non-negative")
    big_delta = float(detuning_delta_n(params, n_o, n))
    coupling = float(rabi_g_n(params, n))
    half_split = float(omega_n(params, n_o, n))
    # lambda_+ lambda_- = -G_n^2; get the small root from the product to avoid cancellation
    if big_delta >= 0:
        lam_p = 0.5 * big_delta + half_split
        lam_m = -coupling**2 / lam_p if lam_p else 0.0
    else:
        lam_m = 0.5 * big_delta - half_split
        lam_p = -coupling**2 / lam_m
    if coupling == 0.0:
        # uncoupled: bare states, |e,n+1> carries Delta_n
        up, down = np.array([0.0, 1.0]), np.array([1.0, 0.0])
        if big_delta < 0:
            up, down = down, up
        return Doublet(n, lam_p, lam_m, up.astype(complex), down.astype(complex))
    vp = np.array([coupling, lam_p]) / math.hypot(coupling, lam_p)
    vm = np.array([coupling, lam_m]) / math.hypot(coupling, lam_m)
    return Doublet(n, lam_p, lam_m, vp.astype(complex), vm.astype(complex))


def doublet_block(params: RamanParams, n_o: int, n: int) -> np.ndarray:
    """2x2 block of the effective Hamiltonian on ``(|g,n>, |e,n+1>)`` minus the ``g`` diagonal."""
    big_delta = float(detuning_delta_n(params, n_o, n))
    coupling = float(rabi_g_n(params, n))
    return np.array([[0.0, coupling], [coupling, big_delta]], dtype=complex)


def pi_time(params: RamanParams, n_o: int) -> float:
    """Interaction time for a complete flip ``|g,n_o> -> |e,n_o+1>`` (infinite without coupling)."""
    coupling = float(rabi_g_n(params, n_o))
    return math.pi / (2.0 * coupling) if coupling > 0 else math.inf


def selectivity_q(params: RamanParams, n_o: int, n) -> np.ndarray | float:
    """``q = r**2 (n-n_o)**2 / (4(n+1)) + 1``, equal to ``(Omega_n/G_n)**2``."""
    n = np.asarray(n, dtype=float)
    return params.r**2 * (n - n_o) ** 2 / (4.0 * (n + 1.0)) + 1.0
