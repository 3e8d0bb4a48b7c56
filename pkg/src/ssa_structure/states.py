"""Multipartite density matrices, von Neumann entropy and entropy-gap functionals."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .linalg import SUPPORT_CUTOFF, as_matrix, hermitian_eig, partial_trace, permute_subsystems

STATE_TOL = 1e-9
SATURATION_TOL = 1e-8
_ZERO_EIG = 1e-12

__all__ = [
    "MultipartiteState",
    "GapReport",
    "PurificationResiduals",
    "von_neumann_entropy",
    "purify",
    "purification_ket",
    "ket_marginal",
    "ssa_gap_v1",
    "ssa_gap_v2",
    "araki_lieb_gap",
    "bi_ssa_gap",
    "purification_identities",
    "ghz",
    "bell",
]


def _validate_density(m: np.ndarray, tol: float = STATE_TOL) -> None:
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"density matrix must be square, got {m.shape}")
    herm = np.linalg.norm(m - m.conj().T)
    if herm > tol:
        raise ValueError(f"density matrix is not Hermitian (deviation {herm:.3e})")
    tr = np.trace(m).real
    if abs(tr - 1.0) > tol:
        raise ValueError(f"density matrix trace is {tr:.12g}, expected 1")
    wmin = np.linalg.eigvalsh((m + m.conj().T) / 2)[0]
    if wmin < -tol:
        raise ValueError(f"density matrix is not positive semidefinite (min eigenvalue {wmin:.3e})")


@dataclass(frozen=True, eq=False)
class MultipartiteState:
    """A density matrix on a tensor product of labeled subsystems."""

    matrix: np.ndarray
    dims: tuple[int, ...]
    labels: tuple[str, ...]
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = as_matrix(self.matrix)
        dims = tuple(int(d) for d in self.dims)
        labels = tuple(str(x) for x in self.labels)
        if len(dims) != len(labels):
            raise ValueError(f"{len(dims)} dims but {len(labels)} labels")
        if len(set(labels)) != len(labels):
            raise ValueError(f"subsystem labels must be unique, got {labels}")
        if any(d < 1 for d in dims):
            raise ValueError(f"subsystem dimensions must be positive, got {dims}")
        if int(np.prod(dims)) != m.shape[0]:
            raise ValueError(f"dims {dims} do not multiply to matrix size {m.shape[0]}")
        if self.validate:
            _validate_density(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_ket(cls, psi, dims: Sequence[int], labels: Sequence[str]) -> "MultipartiteState":
        psi = np.asarray(psi, dtype=np.complex128).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), tuple(dims), tuple(labels))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def arity(self) -> int:
        return len(self.dims)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"unknown subsystem label {label!r}; have {self.labels}") from None

    def marginal(self, *labels: str) -> "MultipartiteState":
        """Reduced state on ``labels``, in the order given."""
        keep = [self.index(x) for x in labels]
        m = partial_trace(self.matrix, self.dims, keep)
        return MultipartiteState(m, tuple(self.dims[k] for k in keep), tuple(labels), validate=False)

    def reorder(self, *labels: str) -> "MultipartiteState":
        if sorted(labels) != sorted(self.labels):
            raise ValueError(f"{labels} is not a permutation of {self.labels}")
        order = [self.index(x) for x in labels]
        m = permute_subsystems(self.matrix, self.dims, order)
        return MultipartiteState(m, tuple(self.dims[k] for k in order), tuple(labels), validate=False)

    def relabel(self, *labels: str) -> "MultipartiteState":
        return MultipartiteState(self.matrix, self.dims, tuple(labels), validate=False)

    def entropy(self, *labels: str) -> float:
        if not labels or tuple(labels) == self.labels:
            return von_neumann_entropy(self.matrix)
        return von_neumann_entropy(self.marginal(*labels).matrix)


def _spectrum(rho) -> np.ndarray:
    m = rho.matrix if isinstance(rho, MultipartiteState) else as_matrix(rho)
    w = hermitian_eig(m).eigenvalues
    if w.size and w[0] < -STATE_TOL:
        raise ValueError(f"state is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    tr = w.sum()
    if abs(tr - 1.0) > STATE_TOL:
        raise ValueError(f"state trace is {tr:.12g}, expected 1")
    return np.clip(w, 0.0, None)


def von_neumann_entropy(rho) -> float:
    """Entropy in bits; eigenvalues at or below 1e-12 contribute nothing."""
    return _entropy_of_spectrum(_spectrum(rho))


def _entropy_of_spectrum(w: np.ndarray) -> float:
    w = w[w > _ZERO_EIG]
    return float(-np.sum(w * np.log2(w))) + 0.0  # no negative zero


def purification_ket(rho, cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    """Vector sum_k sqrt(l_k) |v_k>|k> over the support, eigenvalues ascending.

    Returned with shape ``(dim, rank)``; flatten for the ket on the joint space.
    """
    m = rho.matrix if isinstance(rho, MultipartiteState) else as_matrix(rho)
    spec = hermitian_eig(m)
    w = np.clip(spec.eigenvalues, 0.0, None)
    keep = w > cutoff * max(float(w.max()), 1e-300)
    return spec.basis[:, keep] * np.sqrt(w[keep])


def purify(rho: MultipartiteState, new_label: str = "D") -> MultipartiteState:
    """Purification on an extra subsystem whose dimension is the rank of ``rho``."""
    if new_label in rho.labels:
        raise ValueError(f"label {new_label!r} already in use")
    psi = purification_ket(rho).ravel()
    rank = psi.size // rho.dim
    return MultipartiteState(
        np.outer(psi, psi.conj()), rho.dims + (rank,), rho.labels + (new_label,), validate=False
    )


def ket_marginal(psi: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix of a pure state given as a ket."""
    dims = [int(d) for d in dims]
    t = np.asarray(psi).reshape(dims)
    keep = list(keep)
    rest = [i for i in range(len(dims)) if i not in keep]
    t = np.transpose(t, keep + rest)
    dk = int(np.prod([dims[k] for k in keep])) if keep else 1
    t = t.reshape(dk, -1)
    return t @ t.conj().T


@dataclass
class GapReport:
    """An entropy inequality written ``lhs <= rhs``; ``gap_bits = rhs - lhs``."""

    identity_name: str
    lhs_bits: float
    rhs_bits: float
    gap_bits: float
    saturated: bool
    tol: float = SATURATION_TOL
    details: dict = field(default_factory=dict)

    @classmethod
    def build(cls, name: str, lhs: float, rhs: float, tol: float, **details) -> "GapReport":
        gap = rhs - lhs
        return cls(name, float(lhs), float(rhs), float(gap) + 0.0, bool(abs(gap) <= tol), float(tol), details)


def _require_arity(rho: MultipartiteState, n: int, what: str) -> None:
    if not isinstance(rho, MultipartiteState):
        raise TypeError(f"{what} expects a MultipartiteState")
    if rho.arity != n:
        raise ValueError(f"{what} needs exactly {n} subsystems, state has {rho.arity} {rho.labels}")


def ssa_gap_v1(rho: MultipartiteState, tol: float = SATURATION_TOL) -> GapReport:
    """S(AB) + S(BC) - S(ABC) - S(B) for the subsystems in stored order."""
    _require_arity(rho, 3, "ssa_gap_v1")
    a, b, c = rho.labels
    s_abc = rho.entropy()
    s_b = rho.entropy(b)
    s_ab = rho.entropy(a, b)
    s_bc = rho.entropy(b, c)
    return GapReport.build("ssa_v1", s_abc + s_b, s_ab + s_bc, tol)


def ssa_gap_v2(sigma: MultipartiteState, tol: float = SATURATION_TOL) -> GapReport:
    """S(AB) + S(CB) - S(A) - S(C) for the subsystems in stored order."""
    _require_arity(sigma, 3, "ssa_gap_v2")
    a, b, c = sigma.labels
    lhs = sigma.entropy(a) + sigma.entropy(c)
    rhs = sigma.entropy(a, b) + sigma.entropy(b, c)
    return GapReport.build("ssa_v2", lhs, rhs, tol)


def araki_lieb_gap(omega: MultipartiteState, tol: float = SATURATION_TOL) -> GapReport:
    """S(BC) - S(B) + S(C) for a bipartite state (B, C)."""
    _require_arity(omega, 2, "araki_lieb_gap")
    b, c = omega.labels
    return GapReport.build("araki_lieb", omega.entropy(b) - omega.entropy(c), omega.entropy(), tol)


def bi_ssa_gap(rho: MultipartiteState, tol: float = SATURATION_TOL) -> GapReport:
    """Sum of the v1 gaps for the orderings (A,B,C) and (B,A,C).

    ``saturated`` requires each of the two gaps to be within ``tol``.
    """
    _require_arity(rho, 3, "bi_ssa_gap")
    a, b, c = rho.labels
    g1 = ssa_gap_v1(rho, tol)
    g2 = ssa_gap_v1(rho.reorder(b, a, c), tol)
    rep = GapReport.build("bi_ssa_pair", g1.lhs_bits + g2.lhs_bits, g1.rhs_bits + g2.rhs_bits, tol,
                          gap_abc=g1.gap_bits, gap_bac=g2.gap_bits)
    rep.saturated = g1.saturated and g2.saturated
    return rep


@dataclass
class PurificationResiduals:
    """Gaps of the three rewritings of the v2 identity on the purified state.

    ``eq_ad_cd``: S(CD) + S(AD) - S(A) - S(C);
    ``eq_a``: S(AB) + S(AD) - S(A) - S(ABD), the v1 gap of (B, A, D);
    ``eq_c``: S(CD) + S(CB) - S(CBD) - S(C), the v1 gap of (B, C, D).
    """

    eq_ad_cd: float
    eq_a: float
    eq_c: float
    rank_d: int


def purification_identities(sigma: MultipartiteState) -> PurificationResiduals:
    _require_arity(sigma, 3, "purification_identities")
    psi = purification_ket(sigma).ravel()
    dims = list(sigma.dims) + [psi.size // sigma.dim]

    def s(*idx):
        return _entropy_of_spectrum(np.linalg.eigvalsh(ket_marginal(psi, dims, idx)))

    A, B, C, D = 0, 1, 2, 3
    return PurificationResiduals(
        eq_ad_cd=s(C, D) + s(A, D) - s(A) - s(C),
        eq_a=s(A, B) + s(A, D) - s(A) - s(A, B, D),
        eq_c=s(C, D) + s(C, B) - s(C, B, D) - s(C),
        rank_d=dims[3],
    )


def ghz(n: int = 3, labels: Sequence[str] | None = None) -> MultipartiteState:
    psi = np.zeros(2**n, dtype=np.complex128)
    psi[0] = psi[-1] = 1 / np.sqrt(2)
    labels = tuple(labels) if labels is not None else tuple("ABCDEFGH"[:n])
    return MultipartiteState.from_ket(psi, (2,) * n, labels)


def bell(labels: Sequence[str] = ("B", "C")) -> MultipartiteState:
    psi = np.array([1, 0, 0, 1], dtype=np.complex128) / np.sqrt(2)
    return MultipartiteState.from_ket(psi, (2, 2), tuple(labels))
