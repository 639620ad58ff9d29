"""Measurement realization of a verified instrument: probe space, probe
vector, outcome projections, and an interaction unitary whose induced
instrument reproduces the original branch maps exactly.

Construction: take Kraus families from the Choi spectra, pad every outcome
to the common maximal rank r, and complete the Stinespring isometry on
C^m (x) C^r (x) C^d to a unitary on the combined space. The induced
instrument then agrees with the input on every density.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import basis_vector, dagger, unitary_completion
from .instruments import (Instrument, MeasuringProcess, instrument_distance,
                          instrument_from_process)


@dataclass(frozen=True)
class Dilation:
    """Probe-space measurement data realizing an instrument."""

    observed_dim: int
    probe_dim: int
    omega: np.ndarray
    projections: tuple[np.ndarray, ...]
    unitary: np.ndarray = field(repr=False)
    labels: tuple[str, ...] = ()
    kraus_rank: int = 0

    @property
    def outcomes(self) -> int:
        return len(self.projections)

    def as_process(self) -> MeasuringProcess:
        return MeasuringProcess(observed_dim=self.observed_dim,
                                probe_vector=self.omega,
                                projections=self.projections,
                                unitary=self.unitary,
                                labels=self.labels)


def _kraus_families(E: Instrument, psd_tol: float) -> tuple[list[list[np.ndarray]], int]:
    d = E.observed_dim
    families = []
    rank = 1
    for idx, c in enumerate(E.chois):
        h = (c + dagger(c)) / 2
        lam, vec = np.linalg.eigh(h)
        scale = max(float(lam[-1]), 1.0)
        if float(lam[0]) < -psd_tol * scale:
            raise ValueError(
                f"outcome {idx}: Choi block violates the PSD tolerance "
                f"{psd_tol:.1e} (min eigenvalue {float(lam[0]):.2e})")
        keep = lam > psd_tol * scale
        ops = []
        for s in np.flatnonzero(keep):
            k_op = np.sqrt(lam[s]) * vec[:, s].reshape(d, d).T
            ops.append(k_op)
        families.append(ops)
        rank = max(rank, len(ops))
    return families, rank


def realize_instrument(E: Instrument, psd_tol: float = 1e-8) -> Dilation:
    """Probe realization of a verified instrument.

    The probe space is C^m (x) C^r (x) C^d (m outcomes, r the common padded
    Kraus rank); the probe vector is the first basis vector; outcome i is
    read out by the projection onto the i-th slab of the first register.
    """
    E.validate(psd_tol=psd_tol)
    d, m = E.observed_dim, E.outcomes
    families, r = _kraus_families(E, psd_tol)
    P = m * r * d
    A = np.zeros((d * P, d), dtype=complex)
    for i, ops in enumerate(families):
        for t, k_op in enumerate(ops):
            # column p, row (a, (i, t, 0)): amplitude K[a, p]
            for p in range(d):
                rows = (np.arange(d) * P) + (i * r + t) * d
                A[rows, p] += k_op[:, p]
    Q = unitary_completion(A)
    U = np.zeros((d * P, d * P), dtype=complex)
    rest = iter(range(d, d * P))
    for p in range(d):
        for y in range(P):
            col = p * P + y
            if y == 0:
                U[:, col] = A[:, p]
            else:
                U[:, col] = Q[:, next(rest)]
    omega = basis_vector(0, P)
    eye_rd = np.eye(r * d, dtype=complex)
    projections = []
    for i in range(m):
        sel = np.zeros((m, m), dtype=complex)
        sel[i, i] = 1.0
        projections.append(np.kron(sel, eye_rd))
    return Dilation(observed_dim=d, probe_dim=P, omega=omega,
                    projections=tuple(projections), unitary=U,
                    labels=E.labels, kraus_rank=r)


def instrument_of(dil: Dilation) -> Instrument:
    """Instrument induced by the dilation's measuring process."""
    return instrument_from_process(dil.as_process())


def round_trip_distance(E: Instrument, psd_tol: float = 1e-8,
                        terms: int = 16) -> float:
    """Probe-weighted distance between an instrument and the instrument of
    its own realization."""
    return instrument_distance(E, instrument_of(realize_instrument(E, psd_tol)),
                               terms=terms)
