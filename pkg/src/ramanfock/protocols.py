"""End-to-end experiments built on the selective interaction.

* conditional Fock-state preparation with one or several atoms,
* photon-number statistics read off the excited-atom fraction,
* Wigner-function reconstruction from displaced photon statistics,
* an exact Wigner oracle that never touches the selective protocol.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import eval_genlaguerre, eval_laguerre, gammaln

from .dynamics import block_propagators
from .errors import InfeasiblePreparationError, TruncationError
from .hilbert import FieldState, default_dim, displacement
from .postselect import (
    BCoefficients,
    ConditionedField,
    approximate_fidelity,
    b_coefficients,
    condition_on_atom,
    excited_probability,
    fidelity,
    pi_pulse,
)
from .raman import RamanParams, pi_time

TAIL_TOL = 1e-6
# smallest |c_n|^2 treated as a populated subspace
FEASIBLE_MIN = 1e-14
DIM_GROWTH = 8
MAX_AUTO_DIM = 400


@dataclass(frozen=True)
class FockPrepReport:
    conditioned: ConditionedField
    target_fock: int
    fidelity: float
    success_probability: float
    selectivity_margin: float
    selectivity_ok: bool
    atoms_used: int
    # per-atom excited probabilities, in order
    branch_probabilities: tuple[float, ...] = ()
    approximate_fidelity: float | None = None
    b: BCoefficients | None = field(default=None, repr=False)


@dataclass(frozen=True)
class WignerPoint:
    alpha: complex  # phase-space point where the value belongs
    displacement: complex  # displacement applied to the field (= -alpha)
    w_reconstructed: float
    w_exact: float | None
    tail_mass: float


@dataclass(frozen=True)
class WignerGrid:
    points: tuple[WignerPoint, ...]
    series_cutoff: int
    dim: int

    def max_abs_error(self) -> float:
        diffs = [abs(p.w_reconstructed - p.w_exact) for p in self.points if p.w_exact is not None]
        return max(diffs) if diffs else math.nan


@dataclass(frozen=True)
class Fock:
    """Exact-Wigner descriptor of the number state ``|n>``."""

    n: int


@dataclass(frozen=True)
class Coherent:
    """Exact-Wigner descriptor of the coherent state ``|alpha0>``."""

    alpha0: complex


def selectivity_margin(params: RamanParams, n_o: int) -> float:
    """How far ``r`` exceeds ``2 sqrt(n_o + 2)``; selectivity needs this well above 1."""
    return params.r / (2.0 * math.sqrt(n_o + 2))


def _check_feasible(field_state: FieldState, n_o: int) -> None:
    if field_state.space.dim < n_o + 2:
        raise TruncationError(f"dim={field_state.space.dim} cannot hold |{n_o + 1}>")
    if abs(field_state.amplitudes[n_o]) ** 2 < FEASIBLE_MIN:
        raise InfeasiblePreparationError(f"initial field has no population in |{n_o}>")


def prepare_fock(initial_field: FieldState, params: RamanParams, n_o: int) -> FockPrepReport:
    """One atom, pi-pulse on subspace ``n_o``, keep the run if the atom exits in ``e``."""
    _check_feasible(initial_field, n_o)
    joint = pi_pulse(initial_field, params, n_o)
    conditioned = condition_on_atom(joint, 1)
    b = b_coefficients(initial_field, params, n_o)
    margin = selectivity_margin(params, n_o)
    return FockPrepReport(
        conditioned=conditioned,
        target_fock=n_o + 1,
        fidelity=fidelity(conditioned.state, n_o + 1),
        success_probability=conditioned.probability,
        selectivity_margin=margin,
        selectivity_ok=margin > 1.0,
        atoms_used=1,
        branch_probabilities=(conditioned.probability,),
        approximate_fidelity=approximate_fidelity(b),
        b=b,
    )


def prepare_fock_sequential(
    initial_field: FieldState, params: RamanParams, n_o: int, atoms: int
) -> FockPrepReport:
    """Chain ``atoms`` conditional pi-pulses, retuning atom ``k`` to subspace ``n_o + k``.

    The compensation shift and pi-time are recomputed for every retargeting.
    The run succeeds only if every atom is detected in ``e``.
    """
    if atoms < 1:
        raise ValueError("at least one atom is required")
    first = prepare_fock(initial_field, params, n_o)
    if atoms == 1:
        return first
    current = first.conditioned.state
    probs = [first.success_probability]
    for k in range(1, atoms):
        target = n_o + k
        _check_feasible(current, target)
        cond = condition_on_atom(pi_pulse(current, params, target), 1)
        probs.append(cond.probability)
        current = cond.state
    final = n_o + atoms
    margin = min(selectivity_margin(params, n_o + k) for k in range(atoms))
    return FockPrepReport(
        conditioned=ConditionedField(current, float(np.prod(probs))),
        target_fock=final,
        fidelity=fidelity(current, final),
        success_probability=float(np.prod(probs)),
        selectivity_margin=margin,
        selectivity_ok=margin > 1.0,
        atoms_used=atoms,
        branch_probabilities=tuple(probs),
    )


def response_matrix(params: RamanParams, dim: int, n_max: int) -> np.ndarray:
    """``M[N, n]``: probability that an atom tuned to subspace ``N`` exits in ``e`` given ``n`` photons.

    Blocks never mix, so for any pure field the excited fraction of a scan
    entry is ``M[N] @ P``. Row ``N`` is the ``g -> e`` transition probability
    of each block at the pi-time of subspace ``N``.
    """
    if not 0 <= n_max < dim - 1:
        raise TruncationError(f"n_max={n_max} must be below dim-1={dim - 1}")
    out = np.zeros((n_max + 1, dim))
    for big_n in range(n_max + 1):
        _, u_eg, _, _ = block_propagators(params, big_n, dim, pi_time(params, big_n))
        out[big_n, :-1] = np.abs(u_eg) ** 2
    return out


def _sample(probs: np.ndarray, atom_count: int, rng: np.random.Generator) -> np.ndarray:
    return rng.binomial(atom_count, np.clip(probs, 0.0, 1.0)) / atom_count


def measure_photon_statistics(
    field_state: FieldState,
    params: RamanParams,
    n_max: int,
    *,
    mode: str = "det",
    atom_count: int = 1000,
    rng: np.random.Generator | None = None,
    response: np.ndarray | None = None,
) -> np.ndarray:
    """Estimate ``P_N`` for ``N = 0..n_max`` as the excited-atom fraction of a pi-pulse tuned to ``N``.

    ``mode="det"`` returns the exact ensemble fraction; ``mode="mc"`` draws
    ``atom_count`` atoms per setting from ``rng``.
    """
    dim = field_state.space.dim
    if response is None:
        response = response_matrix(params, dim, n_max)
    est = response @ field_state.probabilities
    if mode == "det":
        return est
    if mode == "mc":
        if rng is None:
            raise ValueError("Monte Carlo mode needs a seeded generator")
        return _sample(est, atom_count, rng)
    raise ValueError(f"unknown mode {mode!r}")


def measure_photon_statistics_by_protocol(field_state: FieldState, params: RamanParams, n_max: int) -> np.ndarray:
    """Same as the deterministic scan, but literally running one pi-pulse per setting."""
    if not 0 <= n_max < field_state.space.dim - 1:
        raise TruncationError(f"n_max={n_max} must be below dim-1={field_state.space.dim - 1}")
    return np.array([excited_probability(pi_pulse(field_state, params, n)) for n in range(n_max + 1)])


def _occupied_top(field_state: FieldState) -> int:
    populated = np.nonzero(field_state.probabilities > 1e-15)[0]
    return int(populated[-1]) if len(populated) else 0


def _displaced_probs(state: FieldState, alpha: complex, cutoff: int) -> tuple[np.ndarray, float]:
    """Photon distribution of ``D(alpha)|psi>`` up to ``cutoff`` and the mass lost beyond it."""
    amps = displacement(state.space, alpha).apply(state)
    probs = np.abs(amps) ** 2
    tail = max(0.0, 1.0 - float(probs[: cutoff + 1].sum()))
    return probs, tail


def adequate_dim(field_state: FieldState, displacements, tail_tol: float = TAIL_TOL) -> int:
    """Smallest dimension (from the default rule upwards) keeping every displaced tail below ``tail_tol``.

    The default rule is calibrated on Poisson tails; displaced number states
    spread further, so the largest displacements are checked explicitly.
    """
    alphas = np.asarray(list(displacements), dtype=complex)
    a_max = float(np.max(np.abs(alphas))) if alphas.size else 0.0
    dim = max(field_state.space.dim, default_dim(a_max, _occupied_top(field_state)))
    probes = alphas[np.abs(alphas) >= 0.95 * a_max] if alphas.size else np.array([0j])
    while dim <= MAX_AUTO_DIM:
        embedded = field_state.embed(dim)
        if all(_displaced_probs(embedded, a, dim - 2)[1] <= tail_tol for a in probes):
            return dim
        dim += DIM_GROWTH
    raise TruncationError(f"no dimension up to {MAX_AUTO_DIM} keeps the displaced tail below {tail_tol}")


def reconstruct_wigner(
    field_state: FieldState,
    params: RamanParams,
    grid,
    *,
    dim: int | None = None,
    series_cutoff: int | None = None,
    exact=None,
    mode: str = "det",
    atom_count: int = 1000,
    seed: int | None = None,
    workers: int = 1,
) -> WignerGrid:
    """Wigner function from displaced photon statistics measured with the selective scan.

    For each displacement ``alpha`` in ``grid`` the field is displaced by
    ``alpha``, its number distribution is estimated by
    :func:`measure_photon_statistics`, and the parity sum
    ``(2/pi) sum_N (-1)^N P_N`` is stored at phase-space point ``-alpha``.

    ``exact`` selects the oracle for ``w_exact``: a :class:`Fock`,
    :class:`Coherent` or :class:`FieldState`; defaults to the field itself
    (number states are detected and use the closed form). Pass ``False`` to skip.
    """
    displacements = [complex(a) for a in grid]
    if not displacements:
        raise ValueError("empty Wigner grid")
    if dim is None:
        dim = adequate_dim(field_state, displacements)
    state = field_state.embed(dim)
    cutoff = dim - 2 if series_cutoff is None else int(series_cutoff)
    response = response_matrix(params, dim, cutoff)

    if exact is None:
        top = _occupied_top(field_state)
        exact = Fock(top) if field_state.probabilities[top] > 1 - 1e-15 else field_state

    if mode == "mc":
        children = np.random.SeedSequence(seed).spawn(len(displacements))
        rngs = [np.random.default_rng(s) for s in children]
    else:
        rngs = [None] * len(displacements)

    signs = (-1.0) ** np.arange(cutoff + 1)

    def point(i: int) -> WignerPoint:
        alpha = displacements[i]
        probs, tail = _displaced_probs(state, alpha, cutoff)
        if tail > TAIL_TOL:
            raise TruncationError(
                f"displaced state at alpha={alpha:.3g} has tail mass {tail:.2e} beyond n={cutoff}"
            )
        displaced = FieldState.from_amplitudes(np.sqrt(probs), state.space)
        est = measure_photon_statistics(
            displaced, params, cutoff, mode=mode, atom_count=atom_count, rng=rngs[i], response=response
        )
        w_rec = 2.0 / math.pi * float(signs @ est)
        w_ex = None if exact is False else exact_wigner(exact, -alpha)
        return WignerPoint(-alpha, alpha, w_rec, w_ex, tail)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = tuple(pool.map(point, range(len(displacements))))
    else:
        points = tuple(point(i) for i in range(len(displacements)))
    return WignerGrid(points, cutoff, dim)


def square_grid(extent: float = 3.5, step: float = 0.1) -> list[complex]:
    """Cartesian grid ``Re, Im in [-extent, extent]``, row-major in ``Im`` then ``Re``."""
    n = int(round(extent / step))
    ticks = np.arange(-n, n + 1) * step
    return [complex(x, y) for y in ticks for x in ticks]


def displaced_overlaps(alpha: complex, m_max: int, n_values) -> np.ndarray:
    """Closed-form ``<m|D(alpha)|n>`` for ``m = 0..m_max`` and the given ``n`` (generalized Laguerre)."""
    n_values = np.atleast_1d(np.asarray(n_values, dtype=int))
    m = np.arange(m_max + 1)[:, None]
    n = n_values[None, :]
    x = abs(alpha) ** 2
    lo = np.minimum(m, n)
    k = np.abs(m - n)
    if alpha == 0:
        return (m == n).astype(complex)
    log_pref = 0.5 * (gammaln(lo + 1) - gammaln(np.maximum(m, n) + 1)) + k * math.log(abs(alpha)) - 0.5 * x
    phase = np.where(m >= n, np.exp(1j * k * np.angle(alpha)), np.exp(1j * k * np.angle(-np.conj(alpha))))
    return np.exp(log_pref) * phase * eval_genlaguerre(lo, k, x)


def exact_wigner(descriptor, alpha: complex) -> float:
    """Exact Wigner function at phase-space point ``alpha``.

    ``descriptor`` is a :class:`Fock`, a :class:`Coherent`, a :class:`FieldState`
    or a raw amplitude vector. Vectors go through the displaced-parity sum with
    closed-form displaced overlaps, adding photon numbers until the displaced
    distribution holds all but 1e-13 of the norm.
    """
    alpha = complex(alpha)
    if isinstance(descriptor, Fock):
        x = 4.0 * abs(alpha) ** 2
        return 2.0 / math.pi * (-1) ** descriptor.n * math.exp(-0.5 * x) * float(eval_laguerre(descriptor.n, x))
    if isinstance(descriptor, Coherent):
        return 2.0 / math.pi * math.exp(-2.0 * abs(alpha - descriptor.alpha0) ** 2)
    amps = descriptor.amplitudes if isinstance(descriptor, FieldState) else np.asarray(descriptor, dtype=complex)
    amps = amps / np.linalg.norm(amps)
    support = np.nonzero(np.abs(amps) > 1e-15)[0]
    m_max = default_dim(abs(alpha), int(support[-1])) + 20
    while True:
        overlaps = displaced_overlaps(-alpha, m_max, support)
        probs = np.abs(overlaps @ amps[support]) ** 2
        if probs.sum() > 1 - 1e-13 or m_max > 4 * MAX_AUTO_DIM:
            break
        m_max *= 2
    return 2.0 / math.pi * float(((-1.0) ** np.arange(m_max + 1)) @ probs)

