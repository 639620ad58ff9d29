"""GNS construction over matrix algebras, intertwiners, and transitivity.

The representation for a state rho on M_N is built in purified form: with
rho of rank r, the representation space is C^N (x) C^r, the map sends x to
x (x) 1, and the cyclic vector is the flattened square root of rho. This is
unitarily the same as the quotient construction on M_N by the null space of
the form (a, b) -> Tr(rho a* b), with rep_dim = N * r.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import dagger, frob, matrix_unit, tensor
from .states import State

RANK_CUT = 1e-10


@dataclass(frozen=True)
class GnsRep:
    """GNS data for a state on M_N: rep(x) = x (x) 1_r on C^(N r)."""

    source_dim: int
    rank: int
    omega: np.ndarray
    support_eigs: np.ndarray
    support_vecs: np.ndarray

    @property
    def rep_dim(self) -> int:
        return self.source_dim * self.rank

    def rep(self, x: np.ndarray) -> np.ndarray:
        return np.kron(np.asarray(x, dtype=complex), np.eye(self.rank, dtype=complex))

    def vector(self, x: np.ndarray) -> np.ndarray:
        """rep(x) applied to the cyclic vector, without forming rep(x)."""
        om = self.omega.reshape(self.source_dim, self.rank)
        return (np.asarray(x, dtype=complex) @ om).reshape(-1)

    def expectation(self, x: np.ndarray) -> complex:
        return complex(np.vdot(self.omega, self.vector(x)))


def _canonical_phases(vecs: np.ndarray) -> np.ndarray:
    out = vecs.copy()
    for j in range(out.shape[1]):
        i = int(np.argmax(np.abs(out[:, j]).round(12)))
        c = out[i, j]
        if abs(c) > 1e-14:
            out[:, j] *= np.conj(c) / abs(c)
    return out


def gns(phi: State) -> GnsRep:
    """GNS representation of a state, rank cut at 1e-10 relative."""
    rho = phi.density
    N = phi.dim
    w, v = np.linalg.eigh((rho + dagger(rho)) / 2)
    order = np.argsort(-w)
    w, v = w[order], v[:, order]
    top = max(float(w[0]), 0.0)
    keep = w > RANK_CUT * max(top, 1e-300)
    mu = w[keep]
    F = _canonical_phases(v[:, keep])
    r = int(mu.size)
    if r == 0:
        raise ValueError("state density is numerically zero")
    omega = (F * np.sqrt(mu)[None, :]).reshape(-1)
    return GnsRep(source_dim=N, rank=r, omega=omega,
                  support_eigs=mu, support_vecs=F)


@dataclass(frozen=True)
class GnsIntertwiner:
    """Isometry between GNS spaces carrying rep_a into rep_b along a map."""

    matrix: np.ndarray
    source: GnsRep
    target: GnsRep
    isometry_residual: float
    intertwining_residual: float
    cyclic_residual: float

    @property
    def is_unitary(self) -> bool:
        m = self.matrix
        return m.shape[0] == m.shape[1] and frob(m @ dagger(m) - np.eye(m.shape[0])) <= 1e-10


def _pullback_density(gamma, rho_b: np.ndarray, a: int) -> np.ndarray:
    if hasattr(gamma, "pullback_density"):
        return np.asarray(gamma.pullback_density(rho_b), dtype=complex)
    out = np.empty((a, a), dtype=complex)
    for p in range(a):
        for q in range(a):
            out[q, p] = np.trace(rho_b @ gamma(matrix_unit(p, q, a)))
    return out


def gns_intertwiner(gamma, target_state: State, source_state: State | None = None,
                    tol: float = 1e-9) -> GnsIntertwiner:
    """Isometry V with V rep_a(x) = rep_b(gamma(x)) V and V Omega_a = Omega_b.

    gamma must expose source_dim, target_dim, and application to matrices
    (a pullback_density method is used when present). The source state is
    the pullback of the target state; passing source_state explicitly turns
    on an invariance check against that pullback. When gamma is a
    state-preserving automorphism the result is unitary.
    """
    a, b = int(gamma.source_dim), int(gamma.target_dim)
    rho_b = target_state.density
    if rho_b.shape[0] != b:
        raise ValueError("target state dimension does not match the map")
    rho_a = _pullback_density(gamma, rho_b, a)
    rho_a = (rho_a + dagger(rho_a)) / 2
    if source_state is not None:
        if frob(source_state.density - rho_a) > 1e-10 * max(1.0, frob(rho_a)):
            raise ValueError("state is not invariant under the map to tolerance")
        rho_a = source_state.density
    rep_a = gns(State(rho_a))
    rep_b = gns(target_state)
    units = [matrix_unit(p, q, a) for p in range(a) for q in range(a)]
    A = np.stack([rep_a.vector(x) for x in units], axis=1)
    B = np.stack([rep_b.vector(gamma(x)) for x in units], axis=1)
    V = B @ np.linalg.pinv(A, rcond=1e-12)
    iso = frob(dagger(V) @ V - np.eye(rep_a.rep_dim))
    cyc = float(np.linalg.norm(V @ rep_a.omega - rep_b.omega))
    inter = 0.0
    for x in units:
        lhs = V @ rep_a.rep(x)
        rhs = rep_b.rep(gamma(x)) @ V
        inter = max(inter, frob(lhs - rhs))
    if iso > 1e-10 * max(1.0, np.sqrt(rep_a.rep_dim)):
        raise ValueError(f"intertwiner is not an isometry: residual {iso:.2e}")
    if inter > tol:
        raise ValueError(f"intertwining residual {inter:.2e} exceeds {tol:.1e}")
    return GnsIntertwiner(matrix=V, source=rep_a, target=rep_b,
                          isometry_residual=iso, intertwining_residual=inter,
                          cyclic_residual=cyc)


def transitivity_unitary(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Unitary u with u a = b, identity off span{a, b}.

    Phase convention: rotate b by the phase making <a, b> real nonnegative,
    perform the plane rotation, then restore the phase on the image
    direction. a = b returns the exact identity.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na < 1e-14 or nb < 1e-14:
        raise ValueError("zero vector")
    a = a / na
    b = b / nb
    dim = a.size
    if np.linalg.norm(a - b) <= 1e-14:
        return np.eye(dim, dtype=complex)
    c = complex(np.vdot(a, b))
    phase = 1.0 + 0j if abs(c) < 1e-14 else c / abs(c)
    b2 = b * np.conj(phase)
    cos_t = float(np.real(np.vdot(a, b2)))
    w = b2 - cos_t * a
    sin_t = float(np.linalg.norm(w))
    eye = np.eye(dim, dtype=complex)
    if sin_t <= 1e-15:
        rot = eye
    else:
        w = w / sin_t
        cos_t = min(max(cos_t, -1.0), 1.0)
        rot = (eye
               + (cos_t - 1.0) * (np.outer(a, a.conj()) + np.outer(w, w.conj()))
               + sin_t * (np.outer(w, a.conj()) - np.outer(a, w.conj())))
    if phase == 1.0 + 0j:
        return rot
    return (eye + (phase - 1.0) * np.outer(b2, b2.conj())) @ rot
