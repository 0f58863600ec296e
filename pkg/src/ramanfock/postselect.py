"""Conditioning the cavity field on the detected atomic level."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import analytic_propagate, block_propagators
from .errors import DegenerateOutcomeError, TruncationError
from .hilbert import AtomLevel, FieldState, JointState, TruncatedFockSpace
from .raman import RamanParams, detuning_delta_n, pi_time, selectivity_q


@dataclass(frozen=True)
class ConditionedField:
    state: FieldState
    probability: float


@dataclass(frozen=True)
class BCoefficients:
    """Excited-branch amplitudes after a pi-pulse, indexed by the initial photon number.

    ``propagated[n]`` is the amplitude of ``|e, n+1>`` obtained from the exact
    block propagator; the resonant entry is ``-i c_{n_o}``.
    ``closed_form[n]`` evaluates ``-i c_n exp(-i Delta_n tau/2) sin(pi/2 sqrt(q/(n_o+1)))/sqrt(q)``
    literally, for comparison only: it omits the ``(n+1)`` inside the sine
    argument that the propagator produces.
    """

    n_o: int
    initial: np.ndarray
    propagated: np.ndarray
    closed_form: np.ndarray
    q: np.ndarray
    sine_argument_propagated: np.ndarray
    sine_argument_closed_form: np.ndarray

    @property
    def prefactor(self) -> np.ndarray:
        """``|c_n| / sqrt(q)``, the envelope bounding both forms."""
        return np.abs(self.initial) / np.sqrt(self.q)

    def report(self) -> list[dict]:
        """One row per photon number comparing the propagated and literal closed forms."""
        rows = []
        for n in range(len(self.initial)):
            rows.append(
                {
                    "n": n,
                    "abs_c": float(abs(self.initial[n])),
                    "q": float(self.q[n]),
                    "prefactor": float(self.prefactor[n]),
                    "sine_arg_propagated": float(self.sine_argument_propagated[n]),
                    "sine_arg_closed_form": float(self.sine_argument_closed_form[n]),
                    "abs_b_propagated": float(abs(self.propagated[n])),
                    "abs_b_closed_form": float(abs(self.closed_form[n])),
                }
            )
        return rows


def condition_on_atom(joint: JointState, level: AtomLevel) -> ConditionedField:
    """Project onto the atom being found in ``level`` and renormalize the field."""
    level = AtomLevel(level)
    if level >= joint.levels:
        raise ValueError(f"level {level.name} absent from a {joint.levels}-level joint state")
    amps = joint.amplitudes[level]
    prob = float(np.vdot(amps, amps).real)
    if prob <= 0.0:
        raise DegenerateOutcomeError(f"the atom is never found in {level.name}")
    return ConditionedField(FieldState(joint.space, amps / math.sqrt(prob)), min(prob, 1.0))


def branch_probabilities(joint: JointState) -> np.ndarray:
    return np.sum(np.abs(joint.amplitudes) ** 2, axis=1)


def excited_probability(joint_after: JointState) -> float:
    return float(branch_probabilities(joint_after)[AtomLevel.E])


def photon_distribution(field: FieldState) -> np.ndarray:
    return field.probabilities


def pi_pulse(field: FieldState, params: RamanParams, n_o: int) -> JointState:
    """Send an atom in ``g`` through the cavity for the pi-time of subspace ``n_o``."""
    if field.space.dim < n_o + 2:
        raise TruncationError(f"dim={field.space.dim} cannot hold |{n_o + 1}>")
    joint = JointState.product(AtomLevel.G, field, levels=2)
    return analytic_propagate(joint, params, n_o, pi_time(params, n_o)).state


def b_coefficients(initial_field: FieldState, params: RamanParams, n_o: int) -> BCoefficients:
    dim = initial_field.space.dim
    tau = pi_time(params, n_o)
    c = initial_field.amplitudes
    n = np.arange(dim)
    _, u_eg, _, _ = block_propagators(params, n_o, dim, tau)
    propagated = np.zeros(dim, dtype=complex)
    # |g, dim-1> has no |e, dim> partner in the truncated space
    propagated[:-1] = u_eg * c[:-1]
    q = selectivity_q(params, n_o, n)
    phase = np.exp(-0.5j * detuning_delta_n(params, n_o, n) * tau)
    arg_closed = 0.5 * math.pi * np.sqrt(q / (n_o + 1))
    arg_prop = 0.5 * math.pi * np.sqrt(q * (n + 1) / (n_o + 1))
    closed = c * (-1j) * phase * np.sin(arg_closed) / np.sqrt(q)
    return BCoefficients(n_o, c.copy(), propagated, closed, q, arg_prop, arg_closed)


def conditioned_from_b(b: BCoefficients) -> FieldState:
    """Excited-branch field assembled from the b coefficients (``b_n`` lands on ``|n+1>``)."""
    dim = len(b.initial)
    amps = np.zeros(dim, dtype=complex)
    amps[1:] = b.propagated[:-1]
    return FieldState.from_amplitudes(amps, TruncatedFockSpace(dim))


def fidelity(field: FieldState, target_fock: int) -> float:
    """Population of ``|target_fock>``."""
    if not 0 <= target_fock < field.space.dim:
        raise TruncationError(f"|{target_fock}> outside a space of dimension {field.space.dim}")
    return float(min(1.0, abs(field.amplitudes[target_fock]) ** 2))


def approximate_fidelity(b: BCoefficients) -> float:
    """``1 - sum_{n != n_o} |b_n|^2 / |c_{n_o}|^2``, the small-leakage estimate."""
    c_no = abs(b.initial[b.n_o]) ** 2
    if c_no == 0:
        raise DegenerateOutcomeError("no amplitude in the selected subspace")
    leak = np.abs(b.propagated) ** 2
    return float(1.0 - (leak.sum() - leak[b.n_o]) / c_no)
