import math
import warnings

import numpy as np
import pytest

from ramanfock import TruncatedFockSpace
from ramanfock.raman import (
    RamanParams,
    compensation_shift,
    detuning_delta_n,
    doublet_block,
    effective_hamiltonian,
    eigendoublets,
    full_hamiltonian,
    omega_n,
    pi_time,
    rabi_g_n,
    selectivity_q,
    stark_difference,
)

from conftest import reference_params

TWO_PI = 2 * math.pi


def test_hz_to_angular_conversion():
    p = RamanParams.from_hz(50e3, 50e3 / 30, 1e6)
    assert p.g == pytest.approx(TWO_PI * 50e3, rel=1e-15)
    assert p.delta == pytest.approx(TWO_PI * 1e6, rel=1e-15)
    assert p.r == pytest.approx(30.0, rel=1e-12)


def test_params_dispersive_checks():
    with pytest.raises(ValueError):
        RamanParams(1.0, 0.1, 4.0)
    with pytest.warns(UserWarning):
        RamanParams(1.0, 0.1, 8.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        RamanParams(1.0, 0.1, 20.0)
    with pytest.raises(ValueError):
        RamanParams(-1.0, 0.1, 20.0)


def test_detuning_values(params):
    assert detuning_delta_n(params, 5, 5) == 0
    assert detuning_delta_n(params, 5, 6) == pytest.approx(params.g**2 / params.delta, rel=1e-14)
    for k in range(1, 5):
        assert detuning_delta_n(params, 5, 5 - k) == pytest.approx(-detuning_delta_n(params, 5, 5 + k))


def test_rabi_coupling(params):
    assert rabi_g_n(params, 0) == pytest.approx(params.g * params.omega_l / params.delta, rel=1e-14)
    # 2 pi * (50 kHz)^2 / 30 / 1 MHz * sqrt 6, done by hand
    assert rabi_g_n(params, 5) == pytest.approx(TWO_PI * 83.3333333333 * math.sqrt(6), rel=1e-10)
    assert rabi_g_n(params, 5) == pytest.approx(1.2825e3, rel=1e-3)
    for n in range(10):
        assert (rabi_g_n(params, n) / rabi_g_n(params, 0)) ** 2 == pytest.approx(n + 1)


def test_omega_n_bounds(params):
    n = np.arange(30)
    w = omega_n(params, 7, n)
    assert w[7] == pytest.approx(rabi_g_n(params, 7))
    assert np.all(w >= rabi_g_n(params, n))
    assert np.all(w >= np.abs(detuning_delta_n(params, 7, n)) / 2)


def test_compensation_shift(params):
    # 2 pi (15000 - 2.78) Hz for n_o = 5
    assert compensation_shift(params, 5) / TWO_PI == pytest.approx(15000 - 50e3**2 / 900 / 1e6, rel=1e-12)
    assert compensation_shift(params, 5) / TWO_PI == pytest.approx(14997.22, abs=0.01)
    for n in range(12):
        assert stark_difference(params, n) - compensation_shift(params, 5) == pytest.approx(
            detuning_delta_n(params, 5, n), abs=1e-9
        )


def test_compensation_vanishes_for_balanced_shifts():
    # g^2 (n_o+1) = omega_l^2  ->  n_o = 3 with omega_l = 2 g
    p = RamanParams(1.0, 2.0, 40.0)
    assert compensation_shift(p, 3) == pytest.approx(0.0, abs=1e-15)


def test_effective_hamiltonian_structure(params):
    space = TruncatedFockSpace(15)
    n_o = 5
    h = effective_hamiltonian(params, n_o, space).matrix
    dim = space.dim
    assert np.max(np.abs(h - h.conj().T)) < 1e-12 * np.max(np.abs(h))
    for n in range(dim - 1):
        idx = [n, dim + n + 1]
        block = h[np.ix_(idx, idx)]
        assert block[1, 1] - block[0, 0] == pytest.approx(detuning_delta_n(params, n_o, n), abs=1e-9)
        assert block[1, 0] == pytest.approx(rabi_g_n(params, n))
    # resonant block degenerate on the diagonal
    res = h[np.ix_([n_o, dim + n_o + 1], [n_o, dim + n_o + 1])]
    assert res[0, 0] == pytest.approx(res[1, 1], abs=1e-9)
    # |e,0> isolated
    row = h[dim].copy()
    row[dim] = 0
    assert np.all(row == 0)
    # nothing couples outside the {|g,n>, |e,n+1>} blocks
    mask = np.zeros_like(h, dtype=bool)
    for n in range(dim - 1):
        mask[np.ix_([n, dim + n + 1], [n, dim + n + 1])] = True
    mask[np.diag_indices(2 * dim)] = True
    assert np.all(h[~mask] == 0)


def test_effective_hamiltonian_dimension_check(params):
    with pytest.raises(ValueError):
        effective_hamiltonian(params, 5, TruncatedFockSpace(6))


def test_full_hamiltonian_at_t0(params):
    space = TruncatedFockSpace(8)
    dim = space.dim
    h = full_hamiltonian(params, 3, space, 0.0).matrix
    g_, e_, h_ = 0, dim, 2 * dim
    assert h[h_ + 2, g_ + 2] == pytest.approx(params.omega_l)
    assert h[h_ + 2, e_ + 3] == pytest.approx(params.g * math.sqrt(3))
    assert np.max(np.abs(h.imag)) == 0


def test_full_hamiltonian_periodic_and_hermitian(params):
    space = TruncatedFockSpace(10)
    period = TWO_PI / params.delta
    for t in (0.0, 1.3e-7, 4.1e-4):
        h = full_hamiltonian(params, 4, space, t).matrix
        h2 = full_hamiltonian(params, 4, space, t + period).matrix
        assert np.max(np.abs(h - h.conj().T)) <= 1e-12
        assert np.max(np.abs(h - h2)) < 1e-9 * np.max(np.abs(h))


def test_full_hamiltonian_decoupled_without_drive():
    p = RamanParams(1.0, 0.0, 30.0)
    space = TruncatedFockSpace(6)
    h = full_hamiltonian(p, 2, space, 0.3).matrix
    dim = space.dim
    assert np.all(h[:dim, :] == 0) and np.all(h[:, :dim] == 0)


def test_resonant_doublet(params):
    d = eigendoublets(params, 5, 5)
    g5 = rabi_g_n(params, 5)
    assert d.lambda_plus == pytest.approx(g5)
    assert d.lambda_minus == pytest.approx(-g5)
    np.testing.assert_allclose(d.state_plus, np.array([1, 1]) / math.sqrt(2), atol=1e-14)
    np.testing.assert_allclose(d.state_minus, np.array([1, -1]) / math.sqrt(2), atol=1e-14)


@pytest.mark.parametrize("n", [0, 3, 5, 9, 40])
def test_doublet_eigen_relation(params, n):
    d = eigendoublets(params, 5, n)
    block = doublet_block(params, 5, n)
    scale = np.linalg.norm(block, 2)
    for lam, v in ((d.lambda_plus, d.state_plus), (d.lambda_minus, d.state_minus)):
        assert np.linalg.norm(block @ v - lam * v) < 1e-10 * scale
    assert abs(np.vdot(d.state_plus, d.state_minus)) < 1e-10
    assert d.lambda_plus * d.lambda_minus == pytest.approx(-rabi_g_n(params, n) ** 2, rel=1e-10)
    assert d.lambda_plus - d.lambda_minus == pytest.approx(2 * omega_n(params, 5, n), rel=1e-12)


def test_doublet_block_matches_hamiltonian(params):
    space = TruncatedFockSpace(12)
    h = effective_hamiltonian(params, 4, space).matrix
    for n in range(space.dim - 1):
        idx = [n, space.dim + n + 1]
        sub = h[np.ix_(idx, idx)] - params.omega_l**2 / params.delta * np.eye(2)
        np.testing.assert_allclose(sub, doublet_block(params, 4, n), atol=1e-9)


def test_far_detuned_doublet_is_nearly_bare():
    p = reference_params(r=100)
    n = 20
    d = eigendoublets(p, 2, n)
    ratio = rabi_g_n(p, n) / abs(detuning_delta_n(p, 2, n))
    # first-order perturbation theory: admixture G/Delta
    assert abs(d.state_plus[0]) == pytest.approx(ratio, rel=2 * ratio**2 + 1e-12)
    assert abs(d.state_plus[1]) == pytest.approx(1.0, abs=ratio**2)


def test_pi_time_values():
    p = RamanParams.from_hz(50e3, 50e3 / 30, 1e6)
    tau = pi_time(p, 10)
    assert 0.8e-3 <= tau <= 1.0e-3
    # pi delta / (2 g omega_l sqrt 11) with angular frequencies, by hand
    assert tau == pytest.approx(math.pi * TWO_PI * 1e6 / (2 * (TWO_PI * 50e3) ** 2 / 30 * math.sqrt(11)), rel=1e-12)
    assert tau * rabi_g_n(p, 10) == pytest.approx(math.pi / 2, rel=1e-15)
    assert pi_time(p, 0) / pi_time(p, 3) == pytest.approx(2.0, rel=1e-14)


def test_pi_time_without_coupling_is_infinite():
    assert pi_time(RamanParams(0.0, 0.0, 1.0), 0) == math.inf


def test_q_identity(params):
    n = np.arange(40)
    lhs = (detuning_delta_n(params, 6, n) / (2 * rabi_g_n(params, n))) ** 2 + 1
    np.testing.assert_allclose(lhs, selectivity_q(params, 6, n), rtol=1e-12)
    np.testing.assert_allclose(omega_n(params, 6, n) ** 2 / rabi_g_n(params, n) ** 2, lhs, rtol=1e-12)
