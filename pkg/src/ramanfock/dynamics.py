"""Time evolution of the atom-field system.

Two independent routes:

* :func:`analytic_propagate` applies the closed-form 2x2 propagator of every
  ``{|g,n>, |e,n+1>}`` block of the effective model.
* :func:`numeric_propagate_full` integrates the explicitly time-dependent
  three-level Hamiltonian, resolving the fast ``exp(-i delta t)`` rotation.

Comparing the two checks the elimination of the intermediate level.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import IntegratorError
from .hilbert import JointState
from .raman import (
    RamanParams,
    detuning_delta_n,
    full_hamiltonian_parts,
    omega_n,
    rabi_g_n,
)

log = logging.getLogger(__name__)

# commutator-free 4th-order Magnus: Gauss-Legendre nodes and mixing weights
_GL_NODES = (0.5 - math.sqrt(3) / 6, 0.5 + math.sqrt(3) / 6)
_CF_WEIGHTS = ((3 - 2 * math.sqrt(3)) / 12, (3 + 2 * math.sqrt(3)) / 12)

STEPS_PER_PERIOD_MIN = 40
COUPLING_STEP_FACTOR = 50
CONVERGENCE_TOL = 1e-7
MAX_REFINEMENTS = 8


@dataclass(frozen=True)
class PropagationResult:
    state: JointState
    norm_drift: float
    steps: int = 0


def unitarity_probe(result: PropagationResult | JointState) -> float:
    """``|1 - ||psi|||`` of the propagated state."""
    state = result.state if isinstance(result, PropagationResult) else result
    return abs(1.0 - float(np.linalg.norm(state.amplitudes)))


def _renormalized(space, levels, amps):
    # JointState insists on unit norm at 1e-9; drift is reported separately
    norm = np.linalg.norm(amps)
    return JointState(space, levels, amps / norm), abs(1.0 - norm)


def block_propagators(params: RamanParams, n_o: int, dim: int, t: float):
    """Per-block propagator entries for blocks ``n = 0 .. dim-2``.

    Returns ``(u_gg, u_eg, u_ge, u_ee)``: ``u_xy`` maps the ``y`` member of
    ``{|g,n>, |e,n+1>}`` onto the ``x`` member. Energies are measured from the
    ``|g,n>`` diagonal, so the ``g`` column reproduces the familiar
    ``cos + i Delta/(2 Omega) sin`` / ``-i G/Omega sin`` pair.
    """
    n = np.arange(dim - 1)
    big_delta = detuning_delta_n(params, n_o, n)
    coupling = rabi_g_n(params, n)
    half_split = omega_n(params, n_o, n)
    phase = np.exp(-0.5j * big_delta * t)
    cos = np.cos(half_split * t)
    # sin(W t)/W, finite as W -> 0
    sin_over = t * np.sinc(half_split * t / math.pi)
    u_gg = phase * (cos + 0.5j * big_delta * sin_over)
    u_ee = phase * (cos - 0.5j * big_delta * sin_over)
    u_eg = phase * (-1j * coupling * sin_over)
    return u_gg, u_eg, u_eg.copy(), u_ee


def analytic_propagate(initial: JointState, params: RamanParams, n_o: int, t: float) -> PropagationResult:
    """Closed-form evolution of a two-level joint state under the effective model.

    ``|e,0>`` and the top ``|g,dim-1>`` have no partner inside the truncated
    space; they only pick up the phase of their diagonal energy (relative to
    the ``g`` diagonal), which keeps this exactly equal to
    ``exp(-i H_eff t)`` up to the global phase ``exp(-i omega_l**2 t/delta)``.
    """
    if initial.levels != 2:
        raise ValueError("analytic propagation acts on the effective {g, e} model")
    dim = initial.space.dim
    if dim < n_o + 2:
        raise ValueError(f"dim={dim} cannot hold the resonant pair for n_o={n_o}")
    cg = initial.amplitudes[0]
    ce = initial.amplitudes[1]
    u_gg, u_eg, u_ge, u_ee = block_propagators(params, n_o, dim, t)
    out = np.zeros((2, dim), dtype=complex)
    out[0, :-1] = u_gg * cg[:-1] + u_ge * ce[1:]
    out[1, 1:] = u_eg * cg[:-1] + u_ee * ce[1:]
    out[0, -1] = cg[-1]
    out[1, 0] = ce[0] * np.exp(-1j * float(detuning_delta_n(params, n_o, -1)) * t)
    state, drift = _renormalized(initial.space, 2, out)
    return PropagationResult(state, drift)


def step_bound(params: RamanParams, dim: int) -> float:
    """Largest allowed step: resolve both the detuning period and the fastest coupling."""
    period = 2.0 * math.pi / params.delta
    bound = period / STEPS_PER_PERIOD_MIN
    fastest = max(params.omega_l, params.g * math.sqrt(dim))
    if fastest > 0:
        bound = min(bound, 1.0 / (COUPLING_STEP_FACTOR * fastest))
    return bound


def _cf4_sweep(raise_op, offset, delta, t0, dt, steps):
    """Propagator over ``steps`` steps of size ``dt`` starting at ``t0``."""
    (c1, c2), (w1, w2) = _GL_NODES, _CF_WEIGHTS
    lower = raise_op.conj().T
    u = np.eye(raise_op.shape[0], dtype=complex)
    for k in range(steps):
        t = t0 + k * dt
        z1 = np.exp(-1j * delta * (t + c1 * dt))
        z2 = np.exp(-1j * delta * (t + c2 * dt))
        # a H1 + b H2 = (a z1 + b z2) A + h.c. + (a + b) C, with a + b = 1/2
        za = w2 * z1 + w1 * z2
        zb = w1 * z1 + w2 * z2
        h_a = za * raise_op + np.conj(za) * lower + 0.5 * offset
        h_b = zb * raise_op + np.conj(zb) * lower + 0.5 * offset
        u = expm(-1j * dt * h_b) @ (expm(-1j * dt * h_a) @ u)
    return u


def _propagator(raise_op, offset, delta, t, steps_per_period):
    """Propagator from 0 to ``t`` using the periodicity of ``H``.

    ``H(t + T) = H(t)`` with ``T = 2 pi/delta``, so ``U(t) = U_rem U_T^k`` with
    ``t = k T + rem``; the one-period map is stepped once and raised to a power.
    """
    period = 2.0 * math.pi / delta
    dt = period / steps_per_period
    whole = int(t // period)
    rem = t - whole * period
    if rem > period * (1 - 1e-12):
        whole, rem = whole + 1, 0.0
    u = np.eye(raise_op.shape[0], dtype=complex)
    steps = 0
    if whole:
        u_period = _cf4_sweep(raise_op, offset, delta, 0.0, dt, steps_per_period)
        u = np.linalg.matrix_power(u_period, whole)
        steps += whole * steps_per_period
    if rem > 0:
        n_rem = max(1, math.ceil(rem / dt))
        u = _cf4_sweep(raise_op, offset, delta, 0.0, rem / n_rem, n_rem) @ u
        steps += n_rem
    return u, steps


def numeric_propagate_full(
    initial: JointState,
    params: RamanParams,
    n_o: int,
    t: float,
    *,
    tol: float = CONVERGENCE_TOL,
    max_refinements: int = MAX_REFINEMENTS,
) -> PropagationResult:
    """Integrate the time-dependent three-level Hamiltonian from 0 to ``t``.

    The step starts at :func:`step_bound` and is halved until the largest
    change of any final amplitude between successive refinements is below
    ``tol``. Each step is a product of two exponentials of constant Hermitian
    generators (4th-order commutator-free Magnus), so every step is unitary.
    """
    if initial.levels != 3:
        raise ValueError("numeric propagation acts on the full three-level model")
    if t < 0:
        raise ValueError("propagation time must be non-negative")
    if t == 0:
        return PropagationResult(initial, unitarity_probe(initial), 0)
    space = initial.space
    raise_op, offset = full_hamiltonian_parts(params, n_o, space)
    psi0 = initial.vector
    period = 2.0 * math.pi / params.delta
    per_period = max(STEPS_PER_PERIOD_MIN, math.ceil(period / step_bound(params, space.dim)))

    previous = None
    change = math.inf
    for refinement in range(max_refinements + 1):
        u, steps = _propagator(raise_op, offset, params.delta, t, per_period)
        psi = u @ psi0
        if previous is not None:
            change = float(np.max(np.abs(psi - previous)))
            log.debug("refinement %d: %d steps/period, change %.3g", refinement, per_period, change)
            if change < tol:
                drift = abs(1.0 - float(np.linalg.norm(psi)))
                state, _ = _renormalized(space, 3, psi.reshape(3, space.dim))
                return PropagationResult(state, drift, steps)
        previous = psi
        per_period *= 2
    raise IntegratorError(
        f"no convergence after {max_refinements} step halvings "
        f"(last change {change:.3g} > {tol:.1g}, {per_period // 2} steps per detuning period)"
    )


def rotating_frame_propagate(initial: JointState, params: RamanParams, n_o: int, t: float) -> JointState:
    """Exact full-model evolution via the frame co-rotating with level ``h``.

    Writing the ``h`` amplitudes as ``exp(-i delta t)`` times slow amplitudes
    removes the time dependence, so one matrix exponential suffices. Used as an
    independent check of :func:`numeric_propagate_full`.
    """
    space = initial.space
    dim = space.dim
    raise_op, offset = full_hamiltonian_parts(params, n_o, space)
    h = raise_op + raise_op.conj().T + offset
    h[2 * dim :, 2 * dim :] -= params.delta * np.eye(dim)
    psi = expm(-1j * t * h) @ initial.vector
    psi[2 * dim :] *= np.exp(-1j * params.delta * t)
    return JointState(space, 3, psi)


def effective_offset_phase(params: RamanParams, t: float) -> complex:
    """Global phase dropped by the analytic propagator (the common ``g`` Stark shift)."""
    return complex(np.exp(-1j * params.omega_l**2 / params.delta * t))

