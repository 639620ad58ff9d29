"""Small dense linear-algebra helpers shared across the package.

Everything here works on complex128 ndarrays. Tensor products follow
numpy.kron order: the first factor is the most significant index, and
vec() flattens row-major to match.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def tensor(*factors: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more matrices, left factor most significant."""
    out = np.asarray(factors[0], dtype=complex)
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def matrix_unit(i: int, j: int, dim: int) -> np.ndarray:
    e = np.zeros((dim, dim), dtype=complex)
    e[i, j] = 1.0
    return e


def basis_vector(i: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[i] = 1.0
    return v


def cyclic_shift(dim: int) -> np.ndarray:
    """Permutation unitary sending e_i to e_{i+1 mod dim}."""
    return np.roll(np.eye(dim, dtype=complex), 1, axis=0)


def frob(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def opnorm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, 2))


def trace_norm(a: np.ndarray) -> float:
    """Sum of singular values; for Hermitian input uses eigenvalues."""
    a = np.asarray(a, dtype=complex)
    if frob(a - dagger(a)) <= 1e-12 * max(1.0, frob(a)):
        return float(np.abs(np.linalg.eigvalsh(a)).sum())
    return float(np.linalg.svd(a, compute_uv=False).sum())


def herm_residual(a: np.ndarray) -> float:
    return frob(a - dagger(a))


def unitary_residual(u: np.ndarray) -> float:
    n = u.shape[0]
    return frob(dagger(u) @ u - np.eye(n))


def partial_trace_second(x: np.ndarray, d1: int, d2: int) -> np.ndarray:
    """Trace out the second tensor factor of a (d1*d2) x (d1*d2) matrix."""
    return x.reshape(d1, d2, d1, d2).trace(axis1=1, axis2=3)


def partial_trace_first(x: np.ndarray, d1: int, d2: int) -> np.ndarray:
    return x.reshape(d1, d2, d1, d2).trace(axis1=0, axis2=2)


def contract_second_factor(x: np.ndarray, psi: np.ndarray, d1: int, d2: int) -> np.ndarray:
    """<psi| acting on the second factor from both sides: (1 (x) psi)^* x (1 (x) psi)."""
    t = x.reshape(d1, d2, d1, d2)
    return np.einsum("b,abcd,d->ac", psi.conj(), t, psi, optimize=True)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a Ginibre matrix with phase fix."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r).copy()
    d /= np.abs(d)
    return q * d


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    r = dim if rank is None else rank
    g = rng.standard_normal((dim, r)) + 1j * rng.standard_normal((dim, r))
    rho = g @ dagger(g)
    return rho / np.trace(rho).real


def random_state_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def polar_unitary(a: np.ndarray) -> np.ndarray:
    """Unitary factor of the polar decomposition (requires full rank)."""
    u, s, vh = np.linalg.svd(a)
    if s[-1] <= 1e-12 * s[0]:
        raise ValueError("polar factor undefined: input is numerically singular")
    return u @ vh


def unitary_completion(a: np.ndarray) -> np.ndarray:
    """Extend an isometry (tall matrix with orthonormal columns) to a unitary.

    The first a.shape[1] columns of the result equal a exactly (up to fp),
    enforced by a phase fix on the QR factor's diagonal.
    """
    n, m = a.shape
    if m > n:
        raise ValueError("more columns than rows")
    q, r = scipy.linalg.qr(a, mode="full")
    d = np.ones(n, dtype=complex)
    rd = np.diagonal(r)
    d[:m] = rd / np.abs(rd)
    u = q * d
    u[:, :m] = a
    # re-orthonormalize the completed block against the exact leading columns
    tail = u[:, m:] - a @ (dagger(a) @ u[:, m:])
    q2, _ = np.linalg.qr(tail)
    u[:, m:] = q2
    return u


def eig_normal(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and orthonormal eigenvectors of a normal matrix via Schur.

    Deterministic ordering: lexicographic in (rounded real, rounded imag).
    """
    t, z = scipy.linalg.schur(np.asarray(g, dtype=complex), output="complex")
    lam = np.diagonal(t).copy()
    order = np.lexsort((lam.imag.round(9), lam.real.round(9)))
    return lam[order], z[:, order]


def principal_log_unitary(u: np.ndarray) -> np.ndarray:
    """Hermitian h with u = expm(i h), eigenphases taken in (-pi, pi]."""
    lam, z = eig_normal(u)
    theta = np.angle(lam)
    theta[theta <= -np.pi + 1e-14] = np.pi
    return (z * theta) @ dagger(z)
