"""Finite-outcome CP instruments on M_d and their realization by a probe
system, a meter resolution, and an interaction unitary.

Choi convention: the block matrix C[(p,a),(q,b)] = Lambda(e_pq)[a,b], so
complete positivity is positive semidefiniteness of C, and the action on a
density is a single tensor contraction against C.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import (contract_second_factor, dagger, frob, haar_unitary,
                      herm_residual, matrix_unit, opnorm, partial_trace_second,
                      random_state_vector, trace_norm, tensor,
                      unitary_residual)
from .report import Report
from .states import State

PSD_TOL = 1e-10
CHECK_TOL = 1e-9


def _as_choi4(choi: np.ndarray, d: int) -> np.ndarray:
    return choi.reshape(d, d, d, d)


@dataclass(frozen=True)
class Instrument:
    """CP instrument: one Choi block per outcome, normalized so the dual
    maps sum to the identity on the observed algebra."""

    observed_dim: int
    chois: tuple[np.ndarray, ...] = field(repr=False)
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels",
                               tuple(f"E{i + 1}" for i in range(len(self.chois))))
        if len(self.labels) != len(self.chois):
            raise ValueError("label count does not match outcome count")

    @property
    def outcomes(self) -> int:
        return len(self.chois)

    def apply(self, i: int, rho: np.ndarray) -> np.ndarray:
        c4 = _as_choi4(self.chois[i], self.observed_dim)
        return np.einsum("pq,paqb->ab", np.asarray(rho, dtype=complex), c4,
                         optimize=True)

    def dual_apply(self, i: int, x: np.ndarray) -> np.ndarray:
        c4 = _as_choi4(self.chois[i], self.observed_dim)
        return np.einsum("paqb,ba->qp", c4, np.asarray(x, dtype=complex),
                         optimize=True)

    def povm(self) -> list[np.ndarray]:
        eye = np.eye(self.observed_dim, dtype=complex)
        return [self.dual_apply(i, eye) for i in range(self.outcomes)]

    def outcome_weights(self, phi: State) -> np.ndarray:
        w = np.array([np.real(np.trace(self.apply(i, phi.density)))
                      for i in range(self.outcomes)])
        return np.clip(w, 0.0, None)

    def total_map(self, rho: np.ndarray) -> np.ndarray:
        out = np.zeros((self.observed_dim, self.observed_dim), dtype=complex)
        for i in range(self.outcomes):
            out += self.apply(i, rho)
        return out

    def validate(self, tol: float = CHECK_TOL, psd_tol: float = PSD_TOL) -> None:
        d = self.observed_dim
        for i, c in enumerate(self.chois):
            if c.shape != (d * d, d * d):
                raise ValueError(f"outcome {i}: Choi block has wrong shape")
            if herm_residual(c) > tol * max(1.0, frob(c)):
                raise ValueError(f"outcome {i}: Choi block is not Hermitian")
            lo = float(np.linalg.eigvalsh((c + dagger(c)) / 2)[0])
            if lo < -psd_tol * max(1.0, frob(c)):
                raise ValueError(
                    f"outcome {i}: Choi block violates the PSD tolerance "
                    f"{psd_tol:.1e} (min eigenvalue {lo:.2e})")
        total = sum(self.povm())
        if frob(total - np.eye(d)) > tol:
            raise ValueError("dual maps do not sum to the identity")


def instrument(chois, labels=None, observed_dim=None) -> Instrument:
    chois = tuple(np.asarray(c, dtype=complex) for c in chois)
    if not chois:
        raise ValueError("an instrument needs at least one outcome")
    if observed_dim is None:
        side = chois[0].shape[0]
        observed_dim = int(round(np.sqrt(side)))
    want = (observed_dim * observed_dim,) * 2
    for i, c in enumerate(chois):
        if c.shape != want:
            raise ValueError(f"outcome {i}: Choi block shape {c.shape} does "
                             f"not match observed dimension {observed_dim}")
    return Instrument(observed_dim=observed_dim, chois=chois,
                      labels=tuple(labels) if labels else ())


def default_probe_vectors(d: int, length: int = 16) -> list[np.ndarray]:
    """Standard basis vectors, then uniform two-index superpositions in
    lexicographic order, capped at the requested length."""
    vecs = [np.eye(d, dtype=complex)[:, i] for i in range(d)]
    for i in range(d):
        for j in range(i + 1, d):
            v = np.zeros(d, dtype=complex)
            v[i] = v[j] = 1.0 / np.sqrt(2.0)
            vecs.append(v)
    return vecs[:length]


def default_probe_states(d: int, length: int = 16) -> list[State]:
    out = [State(np.outer(v, v.conj())) for v in default_probe_vectors(d, length)]
    out.append(State(np.eye(d, dtype=complex) / d))
    return out[:length]


def verify_axioms(E: Instrument, probe_states: list[State] | None = None,
                  tol: float = CHECK_TOL, psd_tol: float = PSD_TOL,
                  seed: int = 7) -> Report:
    """Finite-level instrument axioms as named residual checks.

    Covers Choi hermiticity and positivity, dual normalization, total
    probability one on probe states, positivity of outcome-subset outputs,
    additivity over disjoint outcome subsets, and linearity of each branch
    map. Continuity requirements trivialize at finite dimension and finite
    outcome count; the report notes this rather than asserting a vacuous
    check.
    """
    d = E.observed_dim
    m = E.outcomes
    if probe_states is None:
        probe_states = default_probe_states(d)
    rng = np.random.default_rng(seed)
    rep = Report(meta={"seed": seed,
                       "config": {"observed_dim": d, "outcomes": m,
                                  "probes": len(probe_states)},
                       "tolerance": tol})

    rep.add("choi-hermitian",
            max(herm_residual(c) for c in E.chois), tol)
    worst_neg = 0.0
    for c in E.chois:
        lo = float(np.linalg.eigvalsh((c + dagger(c)) / 2)[0])
        worst_neg = max(worst_neg, max(0.0, -lo))
    rep.add("cp-positivity", worst_neg, psd_tol)

    eye = np.eye(d, dtype=complex)
    rep.add("dual-normalization", frob(sum(E.povm()) - eye), tol)

    res = 0.0
    for st in probe_states:
        res = max(res, abs(float(np.sum(E.outcome_weights(st))) - 1.0))
    rep.add("probability-total", res, tol)

    subsets = [[i] for i in range(m)] + [list(range(m))]
    for _ in range(3):
        q = rng.random(m)
        subsets.append([i for i in range(m) if q[i] > 0.5] or [0])
    res = 0.0
    for st in probe_states:
        outs = [E.apply(i, st.density) for i in range(m)]
        for S in subsets:
            block = sum(outs[i] for i in S)
            lo = float(np.linalg.eigvalsh((block + dagger(block)) / 2)[0])
            res = max(res, max(0.0, -lo))
    rep.add("output-positivity", res, tol)

    rho_a = probe_states[0].density
    rho_b = probe_states[-1].density
    half_a = [j for j in range(m) if j % 2 == 0]
    half_b = [j for j in range(m) if j % 2 == 1]
    joined = sum(E.apply(j, rho_a) for j in half_a + half_b)
    rep.add("outcome-additivity", frob(joined - E.total_map(rho_a)), tol)

    a, b = complex(rng.normal(), rng.normal()), complex(rng.normal(), rng.normal())
    res = 0.0
    for i in range(m):
        lhs = E.apply(i, a * rho_a + b * rho_b)
        rhs = a * E.apply(i, rho_a) + b * E.apply(i, rho_b)
        res = max(res, frob(lhs - rhs))
    rep.add("branch-linearity", res, tol)

    rep.notes.append("countable additivity and outer continuity reduce to "
                     "finite additivity at finite outcome count; checked finitely")
    return rep


@dataclass(frozen=True)
class MeasuringProcess:
    """Probe system, probe vector state, meter projections, interaction.

    The probe carries a tensor-ladder truncation when step is set; the
    combined space orders the observed factor first. Outcome i of the
    induced instrument conditions on meter projection projections[i].
    """

    observed_dim: int
    probe_vector: np.ndarray
    projections: tuple[np.ndarray, ...]
    unitary: np.ndarray
    labels: tuple[str, ...] = ()
    step: object | None = None
    flavor: str = "natural"

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels",
                               tuple(f"E{i + 1}" for i in range(len(self.projections))))

    @property
    def probe_dim(self) -> int:
        return self.probe_vector.size

    @property
    def outcomes(self) -> int:
        return len(self.projections)

    def validate(self, tol: float = 1e-12) -> None:
        d, K = self.observed_dim, self.probe_dim
        if self.unitary.shape != (d * K, d * K):
            raise ValueError("interaction unitary has wrong shape")
        if unitary_residual(self.unitary) > tol * np.sqrt(d * K):
            raise ValueError("interaction is not unitary to tolerance")
        if abs(np.linalg.norm(self.probe_vector) - 1.0) > tol * 10:
            raise ValueError("probe vector is not normalized")
        total = np.zeros((K, K), dtype=complex)
        for i, e in enumerate(self.projections):
            if herm_residual(e) > tol or frob(e @ e - e) > tol * 10:
                raise ValueError(f"meter element {i} is not a projection")
            for j in range(i):
                if frob(self.projections[j] @ e) > tol * 10:
                    raise ValueError(f"meter elements {j}, {i} are not orthogonal")
            total += e
        if frob(total - np.eye(K)) > tol * 10:
            raise ValueError("meter projections do not resolve the identity")


def random_measuring_process(k: int, n: int, rng: np.random.Generator,
                             flavor: str = "natural") -> MeasuringProcess:
    """Haar interaction and random probe vector over the digit-class meter
    at truncation level n, observed system of size k."""
    from . import uhf
    ds = uhf.digit_sums(k, n)
    projs = tuple(np.diag((ds == j).astype(complex)) for j in range(k))
    K = k ** n
    psi = random_state_vector(K, rng)
    U = haar_unitary(k * K, rng)
    return MeasuringProcess(observed_dim=k, probe_vector=psi, projections=projs,
                            unitary=U, step=uhf.gamma_step(k, n, flavor),
                            flavor=flavor)


def _projection_range_basis(e: np.ndarray, tol: float = 0.5) -> np.ndarray:
    lam, vec = np.linalg.eigh((e + dagger(e)) / 2)
    keep = lam > tol
    return vec[:, keep]


def _chois_from_interaction(U: np.ndarray, d: int, pr: int,
                            probe_eigs: np.ndarray, probe_vecs: np.ndarray,
                            projections) -> list[np.ndarray]:
    """Choi blocks of the induced instrument, assembled as Gram matrices of
    Kraus families so positivity is exact by construction."""
    U4 = U.reshape(d, pr, d, pr)
    F = probe_vecs * np.sqrt(np.clip(probe_eigs, 0.0, None))[None, :]
    T = np.einsum("aspt,tl->aspl", U4, F, optimize=True)
    chois = []
    for e in projections:
        B = _projection_range_basis(e)
        G = np.einsum("aspl,st->patl", T, B.conj(), optimize=True)
        G2 = G.reshape(d * d, -1)
        chois.append(G2 @ dagger(G2))
    return chois


def instrument_from_process(p: MeasuringProcess) -> Instrument:
    """Induced instrument: branch i sends rho to the probe-traced compression
    of U (rho (x) |psi><psi|) U* by the i-th meter projection."""
    eigs = np.array([1.0])
    vecs = p.probe_vector.reshape(-1, 1)
    chois = _chois_from_interaction(p.unitary, p.observed_dim, p.probe_dim,
                                    eigs, vecs, p.projections)
    return Instrument(observed_dim=p.observed_dim, chois=tuple(chois),
                      labels=p.labels)


def conditional_expectation(p: MeasuringProcess, T: np.ndarray) -> np.ndarray:
    """Probe-vector compression of U* T U onto the observed factor."""
    d, K = p.observed_dim, p.probe_dim
    moved = dagger(p.unitary) @ np.asarray(T, dtype=complex) @ p.unitary
    return contract_second_factor(moved, p.probe_vector, d, K)


def exact_observation_residual(p: MeasuringProcess, tol_unused=None) -> float:
    """Multiplicativity defect of the conditional expectation on the span of
    the meter elements 1 (x) E_i. Zero exactly when observing the meter
    reads out the measured observable with no disturbance."""
    d = p.observed_dim
    eye_d = np.eye(d, dtype=complex)
    lifted = [tensor(eye_d, e) for e in p.projections]
    images = [conditional_expectation(p, a) for a in lifted]
    res = 0.0
    for i, a in enumerate(lifted):
        for j, b in enumerate(lifted):
            lhs = conditional_expectation(p, a @ b)
            rhs = images[i] @ images[j]
            res = max(res, frob(lhs - rhs))
    return res


def _interaction_output(p: MeasuringProcess, phi: State) -> np.ndarray:
    psi = p.probe_vector
    rho_in = tensor(phi.density, np.outer(psi, psi.conj()))
    return p.unitary @ rho_in @ dagger(p.unitary)


def post_interaction_state(p: MeasuringProcess, phi: State) -> State:
    """State after the interaction, reduced along the step isometries to the
    combined observed-plus-lower-level space."""
    if p.step is None or p.step.target_dim != p.probe_dim:
        raise ValueError("interaction level does not match an attached "
                         "endomorphism step")
    d = p.observed_dim
    W = p.step.isometries
    m = p.step.source_dim
    post = _interaction_output(p, phi)
    A4 = post.reshape(d, p.probe_dim, d, p.probe_dim)
    out = np.einsum("jsq,asbt,jtr->aqbr", W.conj(), A4, W,
                    optimize=True).reshape(d * m, d * m)
    return State((out + dagger(out)) / 2)


def restricted_state(s: State, observed_dim: int) -> State:
    """Restriction to the observed factor: partial trace over the rest."""
    rest = s.dim // observed_dim
    if observed_dim * rest != s.dim:
        raise ValueError("state dimension is not a multiple of the observed size")
    return State(partial_trace_second(s.density, observed_dim, rest))


@dataclass(frozen=True)
class CentralDecomposition:
    """Outcome-indexed decomposition of the post-interaction state."""

    weights: np.ndarray
    components: tuple
    reduced: State
    reconstruction_residual: float
    purity_defect: float
    support_overlap: float
    weight_floor: float = 1e-8


def central_decomposition(p: MeasuringProcess, phi: State,
                          weight_floor: float = 1e-8) -> CentralDecomposition:
    """Split the reduced post-interaction state along the meter outcomes.

    Weights are the outcome probabilities; component i is the step-isometry
    compression of the outcome-i block, normalized. Components below the
    weight floor are reported as None and skipped in the quality figures.
    """
    if p.step is None or p.step.target_dim != p.probe_dim:
        raise ValueError("interaction level does not match an attached "
                         "endomorphism step")
    d = p.observed_dim
    W = p.step.isometries
    m = p.step.source_dim
    post = _interaction_output(p, phi)
    A4 = post.reshape(d, p.probe_dim, d, p.probe_dim)
    eye_probe = np.eye(p.probe_dim, dtype=complex)
    raws, weights = [], []
    for j in range(p.outcomes):
        Wj = W[j]
        raw = np.einsum("sq,asbt,tr->aqbr", Wj.conj(), A4, Wj,
                        optimize=True).reshape(d * m, d * m)
        raw = (raw + dagger(raw)) / 2
        raws.append(raw)
        weights.append(max(float(np.real(np.trace(raw))), 0.0))
    weights = np.array(weights)
    total = sum(raws)
    reduced = State(total / max(float(np.real(np.trace(total))), 1e-300))
    recon = trace_norm(total - reduced.density * np.sum(weights))

    components, sup_bases = [], []
    purity = 0.0
    for j, raw in enumerate(raws):
        if weights[j] <= weight_floor:
            components.append(None)
            sup_bases.append(None)
            continue
        comp = raw / weights[j]
        components.append(State(comp))
        lam, vec = np.linalg.eigh(comp)
        purity = max(purity, float(lam[-2]) if lam.size > 1 else 0.0)
        kernel_cut = 1e-12
        sup = vec[:, lam > kernel_cut]
        sup_bases.append(tensor(np.eye(d, dtype=complex), W[j]) @ sup)
    overlap = 0.0
    for i in range(p.outcomes):
        for j in range(i + 1, p.outcomes):
            if sup_bases[i] is None or sup_bases[j] is None:
                continue
            overlap = max(overlap, opnorm(dagger(sup_bases[i]) @ sup_bases[j]))
    return CentralDecomposition(weights=weights, components=tuple(components),
                                reduced=reduced,
                                reconstruction_residual=recon,
                                purity_defect=purity, support_overlap=overlap,
                                weight_floor=weight_floor)


def instrument_distance(E1: Instrument, E2: Instrument,
                        probe_vectors: list[np.ndarray] | None = None,
                        terms: int = 16) -> float:
    """Geometrically weighted sum over probe states of the total trace-norm
    branch discrepancy. Zero iff the instruments agree on the probes; the
    default probe sequence separates instruments on M_d."""
    if E1.observed_dim != E2.observed_dim or E1.outcomes != E2.outcomes:
        raise ValueError("mismatched outcome sets")
    d = E1.observed_dim
    if probe_vectors is None:
        probe_vectors = default_probe_vectors(d, terms)
    total = 0.0
    for idx, v in enumerate(probe_vectors[:terms], start=1):
        rho = np.outer(v, v.conj())
        nu = 0.0
        for i in range(E1.outcomes):
            nu += trace_norm(E1.apply(i, rho) - E2.apply(i, rho))
        total += (2.0 ** (-idx)) * nu
    return total


def vn_instrument(observed_dim: int, probe_state: State, meter: np.ndarray,
                  U: np.ndarray, partition: list[list[float]],
                  tol: float = 1e-8) -> Instrument:
    """Instrument of a meter observable read out in eigenvalue cells.

    partition lists cells of meter eigenvalues; each cell pools the spectral
    projections of the matching eigenvalues into one outcome. Every
    eigenvalue must land in exactly one cell.
    """
    pr = probe_state.dim
    meter = np.asarray(meter, dtype=complex)
    if herm_residual(meter) > 1e-10 * max(1.0, frob(meter)):
        raise ValueError("meter observable is not Hermitian")
    if U.shape != (observed_dim * pr, observed_dim * pr):
        raise ValueError("interaction unitary has wrong shape")
    lam, vec = np.linalg.eigh(meter)
    owner = np.full(lam.size, -1)
    for ci, cell in enumerate(partition):
        for v in cell:
            hit = np.abs(lam - v) <= tol * max(1.0, abs(v))
            clash = hit & (owner >= 0) & (owner != ci)
            if np.any(clash):
                raise ValueError("overlapping partition cells")
            owner[hit] = ci
    if np.any(owner < 0):
        raise ValueError("partition does not cover the meter spectrum")
    projections = []
    for ci in range(len(partition)):
        cols = vec[:, owner == ci]
        projections.append(cols @ dagger(cols))
    total = sum(projections)
    if frob(total - np.eye(pr)) > 1e-12 * pr:
        raise ValueError("spectral cells do not sum to the identity")
    mu, F = np.linalg.eigh(probe_state.density)
    keep = mu > 1e-14
    chois = _chois_from_interaction(U, observed_dim, pr, mu[keep], F[:, keep],
                                    projections)
    return Instrument(observed_dim=observed_dim, chois=tuple(chois))
