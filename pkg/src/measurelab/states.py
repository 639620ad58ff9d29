"""States on finite-dimensional matrix algebras.

A state is represented by its density matrix: phi(x) = Tr(rho x). Vector
states and product states are provided as constructors; fidelity uses the
square-root formula and is clipped to [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ._linalg import dagger, frob, herm_residual, tensor


@dataclass(frozen=True)
class State:
    """State on the d x d matrices, held as a density matrix."""

    density: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.density, dtype=complex)
        object.__setattr__(self, "density", rho)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError("density matrix must be square")

    @property
    def dim(self) -> int:
        return self.density.shape[0]

    def __call__(self, x: np.ndarray) -> complex:
        return complex(np.trace(self.density @ x))

    def validate(self, tol: float = 1e-10) -> None:
        rho = self.density
        if herm_residual(rho) > tol * max(1.0, frob(rho)):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > tol:
            raise ValueError("density matrix trace is not 1")
        if np.linalg.eigvalsh(rho).min() < -tol:
            raise ValueError("density matrix has a negative eigenvalue")

    def is_pure(self, tol: float = 1e-10) -> bool:
        ev = np.linalg.eigvalsh(self.density)
        return bool(ev[:-1].max(initial=0.0) <= tol)


def vector_state(v: np.ndarray) -> State:
    v = np.asarray(v, dtype=complex)
    n = np.linalg.norm(v)
    if n < 1e-14:
        raise ValueError("zero vector has no associated state")
    v = v / n
    return State(np.outer(v, v.conj()))


def diagonal_state(weights) -> State:
    w = np.asarray(weights, dtype=float)
    if w.min() < -1e-14:
        raise ValueError("negative weight")
    return State(np.diag(w / w.sum()).astype(complex))


def tracial_state(dim: int) -> State:
    return State(np.eye(dim, dtype=complex) / dim)


def product_state(*parts: State) -> State:
    return State(tensor(*[p.density for p in parts]))


def fidelity(a: State, b: State) -> float:
    """Uhlmann fidelity F(a, b) = (Tr sqrt(sqrt(a) b sqrt(a)))^2."""
    ra = scipy.linalg.sqrtm(a.density)
    m = ra @ b.density @ ra
    ev = np.linalg.eigvalsh((m + dagger(m)) / 2)
    return float(np.clip(np.sqrt(np.clip(ev, 0.0, None)).sum() ** 2, 0.0, 1.0))
