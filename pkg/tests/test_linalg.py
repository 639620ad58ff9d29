import numpy as np
import pytest

from measurelab._linalg import (
    basis_vector,
    contract_second_factor,
    cyclic_shift,
    dagger,
    eig_normal,
    frob,
    haar_unitary,
    matrix_unit,
    opnorm,
    partial_trace_first,
    partial_trace_second,
    polar_unitary,
    principal_log_unitary,
    random_density,
    random_state_vector,
    tensor,
    unitary_completion,
    unitary_residual,
)


def kron_oracle(a, b):
    # elementwise definition, no np.kron
    p, q = a.shape
    r, s = b.shape
    out = np.zeros((p * r, q * s), dtype=complex)
    for i in range(p):
        for j in range(q):
            for x in range(r):
                for y in range(s):
                    out[i * r + x, j * s + y] = a[i, j] * b[x, y]
    return out


def test_tensor_matches_elementwise_definition():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
    b = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
    assert np.abs(tensor(a, b) - kron_oracle(a, b)).max() < 1e-14


def test_tensor_of_three():
    rng = np.random.default_rng(1)
    mats = [rng.normal(size=(2, 2)) for _ in range(3)]
    got = tensor(*mats)
    want = kron_oracle(kron_oracle(mats[0], mats[1]), mats[2])
    assert np.abs(got - want).max() < 1e-14


def test_matrix_unit_and_basis_vector():
    e = matrix_unit(1, 2, 4)
    assert e.shape == (4, 4)
    assert e[1, 2] == 1.0 and np.count_nonzero(e) == 1
    v = basis_vector(3, 5)
    assert v[3] == 1.0 and np.count_nonzero(v) == 1


def test_cyclic_shift_permutes_basis():
    s = cyclic_shift(3)
    v = basis_vector(0, 3)
    assert np.array_equal(s @ v, basis_vector(1, 3))
    assert np.array_equal(np.linalg.matrix_power(s, 3), np.eye(3))


def test_partial_traces_against_loop_oracle():
    rng = np.random.default_rng(2)
    d1, d2 = 3, 4
    x = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    first = np.zeros((d2, d2), dtype=complex)
    second = np.zeros((d1, d1), dtype=complex)
    for a in range(d1):
        for b in range(d2):
            for c in range(d1):
                for e in range(d2):
                    if a == c:
                        first[b, e] += x[a * d2 + b, c * d2 + e]
                    if b == e:
                        second[a, c] += x[a * d2 + b, c * d2 + e]
    assert np.abs(partial_trace_first(x, d1, d2) - first).max() < 1e-13
    assert np.abs(partial_trace_second(x, d1, d2) - second).max() < 1e-13


def test_partial_trace_preserves_trace():
    rng = np.random.default_rng(3)
    x = random_density(6, rng)
    assert abs(np.trace(partial_trace_second(x, 2, 3)) - 1.0) < 1e-12
    assert abs(np.trace(partial_trace_first(x, 2, 3)) - 1.0) < 1e-12


def test_contract_second_factor_basis_slot_is_a_slice():
    # compressing onto the first basis vector of a 2-dim second factor
    # picks out the interleaved slice
    rng = np.random.default_rng(4)
    t = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    got = contract_second_factor(t, basis_vector(0, 2), 4, 2)
    assert np.abs(got - t[::2, ::2]).max() < 1e-14


def test_contract_second_factor_general_vector():
    rng = np.random.default_rng(5)
    t = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    psi = random_state_vector(3, rng)
    lift = np.kron(np.eye(2), psi.reshape(-1, 1))
    want = dagger(lift) @ t @ lift
    assert np.abs(contract_second_factor(t, psi, 2, 3) - want).max() < 1e-13


def test_haar_unitary_is_unitary():
    rng = np.random.default_rng(6)
    for dim in (2, 5, 9):
        u = haar_unitary(dim, rng)
        assert unitary_residual(u) < 1e-12


def test_random_density_is_a_state():
    rng = np.random.default_rng(7)
    rho = random_density(5, rng)
    assert abs(np.trace(rho) - 1.0) < 1e-12
    assert np.linalg.eigvalsh(rho).min() > -1e-13


def test_polar_unitary_of_invertible():
    rng = np.random.default_rng(8)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    u = polar_unitary(a)
    assert unitary_residual(u) < 1e-11
    # u is the closest unitary: a = u p with p >= 0
    p = dagger(u) @ a
    assert np.abs(p - dagger(p)).max() < 1e-10
    assert np.linalg.eigvalsh((p + dagger(p)) / 2).min() > -1e-10


def test_unitary_completion_extends_isometry():
    rng = np.random.default_rng(9)
    v = np.linalg.qr(rng.normal(size=(6, 2)) + 1j * rng.normal(size=(6, 2)))[0]
    u = unitary_completion(v)
    assert u.shape == (6, 6)
    assert unitary_residual(u) < 1e-12
    assert np.abs(u[:, :2] - v).max() < 1e-12


def test_eig_normal_reconstructs():
    rng = np.random.default_rng(10)
    u = haar_unitary(4, rng)
    d = np.diag(rng.normal(size=4) + 1j * rng.normal(size=4))
    x = u @ d @ dagger(u)
    lam, vec = eig_normal(x)
    assert np.abs(vec @ np.diag(lam) @ dagger(vec) - x).max() < 1e-11
    assert unitary_residual(vec) < 1e-11


def test_principal_log_round_trip():
    rng = np.random.default_rng(11)
    u = haar_unitary(5, rng)
    h = principal_log_unitary(u)
    assert np.abs(h - dagger(h)).max() < 1e-11
    lam, vec = np.linalg.eigh(h)
    back = (vec * np.exp(1j * lam)) @ dagger(vec)
    assert opnorm(back - u) < 1e-10
    # principal branch keeps the spectrum inside (-pi, pi]
    assert lam.max() <= np.pi + 1e-12 and lam.min() > -np.pi - 1e-12


def test_norms_on_known_matrices():
    x = np.diag([3.0, -4.0]).astype(complex)
    assert abs(frob(x) - 5.0) < 1e-14
    assert abs(opnorm(x) - 4.0) < 1e-14
    from measurelab._linalg import trace_norm

    assert abs(trace_norm(x) - 7.0) < 1e-12
