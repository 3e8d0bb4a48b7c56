"""Kraus channels, complementary channels, induced ensembles and entropy bounds."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import as_matrix, kron
from .states import (
    SATURATION_TOL,
    STATE_TOL,
    GapReport,
    MultipartiteState,
    _validate_density,
    von_neumann_entropy,
)

COMPLETENESS_TOL = 1e-9
WEIGHT_CUTOFF = 1e-12

__all__ = [
    "KrausChannel",
    "Ensemble",
    "OmegaState",
    "CoherentInformation",
    "apply",
    "complementary",
    "induced_ensemble",
    "holevo",
    "exchange_bound_report",
    "average_entropy_report",
    "omega_state",
    "stinespring_isometry",
    "coherent_information",
    "compose",
    "tensor",
    "identity_channel",
    "unitary_channel",
    "dephasing_channel",
    "depolarizing_channel",
]


@dataclass(frozen=True, eq=False)
class KrausChannel:
    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        ks = tuple(as_matrix(k) for k in self.kraus)
        if not ks:
            raise ValueError("a channel needs at least one Kraus operator")
        shape = ks[0].shape
        if any(k.shape != shape for k in ks):
            raise ValueError("Kraus operators must share one shape")
        total = sum(k.conj().T @ k for k in ks)
        err = np.linalg.norm(total - np.eye(shape[1]))
        if err > COMPLETENESS_TOL:
            raise ValueError(f"Kraus operators are not complete (||sum K^dag K - I||_F = {err:.3e})")
        for k in ks:
            k.setflags(write=False)
        object.__setattr__(self, "kraus", ks)

    @property
    def dim_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.kraus[0].shape[0]

    @property
    def n_kraus(self) -> int:
        return len(self.kraus)

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)


@dataclass(frozen=True)
class Ensemble:
    weights: tuple[float, ...]
    states: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.weights) != len(self.states) or not self.weights:
            raise ValueError("ensemble needs matching, non-empty weights and states")
        w = np.asarray(self.weights, dtype=float)
        if np.any(w <= 0) or np.any(w > 1 + STATE_TOL):
            raise ValueError("ensemble weights must lie in (0, 1]")
        if abs(w.sum() - 1) > STATE_TOL:
            raise ValueError(f"ensemble weights sum to {w.sum():.12g}")
        for s in self.states:
            _validate_density(as_matrix(s))

    def average(self) -> np.ndarray:
        return sum(w * s for w, s in zip(self.weights, self.states))


def _density(phi: KrausChannel, rho) -> np.ndarray:
    m = rho.matrix if isinstance(rho, MultipartiteState) else as_matrix(rho)
    if m.shape != (phi.dim_in, phi.dim_in):
        raise ValueError(f"state of shape {m.shape} does not match channel input dim {phi.dim_in}")
    _validate_density(m)
    return m


def apply(phi: KrausChannel, rho) -> np.ndarray:
    rho = _density(phi, rho)
    return sum(k @ rho @ k.conj().T for k in phi.kraus)


def complementary(phi: KrausChannel, rho) -> np.ndarray:
    """Environment output with entries Tr[K_mu rho K_nu^dag], Kraus order as stored."""
    rho = _density(phi, rho)
    ks = np.stack(phi.kraus)
    # Tr[K_m rho K_n^dag] = sum_ij (K_m rho)_ij conj(K_n)_ij
    kr = ks @ rho
    return np.einsum("mij,nij->mn", kr, ks.conj())


def induced_ensemble(phi: KrausChannel, rho) -> Ensemble:
    """Weights q_mu = Tr[K_mu rho K_mu^dag] and states K_mu rho K_mu^dag / q_mu."""
    rho = _density(phi, rho)
    weights, states = [], []
    for k in phi.kraus:
        a = k @ rho @ k.conj().T
        q = float(np.trace(a).real)
        if q > WEIGHT_CUTOFF:
            weights.append(q)
            states.append(a / q)
    if not weights:
        raise ValueError("channel annihilates the state: every branch weight is below cutoff")
    total = sum(weights)
    return Ensemble(tuple(w / total for w in weights), tuple(states))


def holevo(e: Ensemble) -> float:
    return von_neumann_entropy(e.average()) - sum(
        w * von_neumann_entropy(s) for w, s in zip(e.weights, e.states)
    )


def exchange_bound_report(phi: KrausChannel, rho, tol: float = SATURATION_TOL) -> GapReport:
    """Holevo quantity of the induced ensemble against the exchange entropy."""
    chi = holevo(induced_ensemble(phi, rho))
    s_ex = von_neumann_entropy(complementary(phi, rho))
    return GapReport.build("exchange_bound", chi, s_ex, tol)


@dataclass(frozen=True, eq=False)
class OmegaState:
    """sum_{mu,nu} K_mu rho K_nu^dag (x) |mu><nu| (x) |mu><nu| on (A, B, C)."""

    state: MultipartiteState
    blocks: np.ndarray  # blocks[mu, nu] = K_mu rho K_nu^dag

    def bc_swap_error(self) -> float:
        swapped = self.state.reorder("A", "C", "B").matrix
        return float(np.linalg.norm(swapped - self.state.matrix))


def stinespring_isometry(phi: KrausChannel) -> np.ndarray:
    """V|psi> = sum_mu K_mu|psi> (x) |mu> (x) |mu>."""
    n = phi.n_kraus
    v = np.zeros((phi.dim_out, n, n, phi.dim_in), dtype=np.complex128)
    for mu, k in enumerate(phi.kraus):
        v[:, mu, mu, :] = k
    return v.reshape(phi.dim_out * n * n, phi.dim_in)


def omega_state(phi: KrausChannel, rho) -> OmegaState:
    rho = _density(phi, rho)
    n = phi.n_kraus
    ks = np.stack(phi.kraus)
    blocks = np.einsum("mij,jk,nlk->mnil", ks, rho, ks.conj())
    v = stinespring_isometry(phi)
    m = v @ rho @ v.conj().T
    st = MultipartiteState(m, (phi.dim_out, n, n), ("A", "B", "C"), validate=False)
    return OmegaState(st, blocks)


def average_entropy_report(phi: KrausChannel, rho, tol: float = SATURATION_TOL) -> GapReport:
    """Average output entropy sum_mu q_mu S(rho'_mu) against S(rho).

    The average is cross-checked against S(omega_AC) - S(omega_B).
    """
    ens = induced_ensemble(phi, rho)
    avg = sum(w * von_neumann_entropy(s) for w, s in zip(ens.weights, ens.states))
    om = omega_state(phi, rho).state
    via_omega = om.entropy("A", "C") - om.entropy("B")
    residual = abs(avg - via_omega)
    if residual > 1e-8:
        raise RuntimeError(f"average entropy disagrees with S(AC) - S(B) by {residual:.3e} bits")
    return GapReport.build("average_entropy", avg, von_neumann_entropy(_density(phi, rho)), tol,
                           omega_identity_residual=residual)


@dataclass(frozen=True)
class CoherentInformation:
    value: float
    input_entropy: float
    saturated: bool


def coherent_information(phi: KrausChannel, rho, tol: float = SATURATION_TOL) -> CoherentInformation:
    """S(Phi(rho)) - S(complementary output), with saturation against S(rho)."""
    ic = von_neumann_entropy(apply(phi, rho)) - von_neumann_entropy(complementary(phi, rho))
    s_in = von_neumann_entropy(_density(phi, rho))
    if ic > s_in + 1e-8:
        raise RuntimeError(f"coherent information {ic} exceeds input entropy {s_in}")
    return CoherentInformation(ic, s_in, abs(ic - s_in) <= tol)


def compose(second: KrausChannel, first: KrausChannel) -> KrausChannel:
    """The channel ``second o first``."""
    if second.dim_in != first.dim_out:
        raise ValueError("channel dimensions do not compose")
    return KrausChannel(tuple(b @ a for b in second.kraus for a in first.kraus))


def tensor(a: KrausChannel, b: KrausChannel) -> KrausChannel:
    return KrausChannel(tuple(kron(x, y) for x in a.kraus for y in b.kraus))


def identity_channel(d: int) -> KrausChannel:
    return KrausChannel((np.eye(d, dtype=np.complex128),))


def unitary_channel(u) -> KrausChannel:
    return KrausChannel((as_matrix(u),))


def dephasing_channel(d: int = 2) -> KrausChannel:
    """Complete dephasing in the computational basis, Kraus {|k><k|}."""
    ks = []
    for k in range(d):
        p = np.zeros((d, d), dtype=np.complex128)
        p[k, k] = 1
        ks.append(p)
    return KrausChannel(tuple(ks))


def depolarizing_channel() -> KrausChannel:
    """Fully depolarizing qubit channel with Kraus operators sigma_i / 2."""
    paulis = (
        np.eye(2),
        np.array([[0, 1], [1, 0]]),
        np.array([[0, -1j], [1j, 0]]),
        np.array([[1, 0], [0, -1]]),
    )
    return KrausChannel(tuple(np.asarray(p, dtype=np.complex128) / 2 for p in paulis))


def channel_from_kraus(kraus: Sequence) -> KrausChannel:
    return KrausChannel(tuple(kraus))
