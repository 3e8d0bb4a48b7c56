"""Finite-dimensional *-algebras: closure of a generating set and block structure.

A *-algebra on C^n is unitarily a direct sum of blocks ``M_{dL} (x) I_{dR}``.
:func:`wedderburn_blocks` recovers the isometries realizing that form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import StructureVerificationError
from ..linalg import as_matrix, null_space, orthonormalize

DROP_TOL = 1e-10
CLOSURE_TOL = 1e-8
BLOCK_TOL = 1e-8
_SEED = 0x5EED


@dataclass(frozen=True, eq=False)
class FactorBlock:
    dim_L: int
    dim_R: int
    isometry: np.ndarray  # (system dim) x (dim_L * dim_R), column index l * dim_R + r

    @property
    def projector(self) -> np.ndarray:
        return self.isometry @ self.isometry.conj().T


@dataclass(frozen=True, eq=False)
class FactorDecomposition:
    """Orthogonal direct sum of tensor-product blocks inside one subsystem."""

    system_label: str
    system_dim: int
    blocks: tuple[FactorBlock, ...]

    def dims(self) -> list[tuple[int, int]]:
        return [(b.dim_L, b.dim_R) for b in self.blocks]

    def dims_multiset(self) -> list[tuple[int, int]]:
        return sorted(self.dims())

    def isometry_error(self) -> float:
        """Worst deviation of W^dag W from the identity across all block pairs."""
        w = np.hstack([b.isometry for b in self.blocks])
        return float(np.abs(w.conj().T @ w - np.eye(w.shape[1])).max())

    def support_projector(self) -> np.ndarray:
        return sum(b.projector for b in self.blocks)

    def reorder(self, order: Sequence[int]) -> "FactorDecomposition":
        return FactorDecomposition(self.system_label, self.system_dim, tuple(self.blocks[k] for k in order))

    def relabel(self, label: str) -> "FactorDecomposition":
        return FactorDecomposition(label, self.system_dim, self.blocks)


@dataclass(frozen=True, eq=False)
class OperatorAlgebra:
    ambient_dim: int
    basis: tuple[np.ndarray, ...]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def stacked(self) -> np.ndarray:
        return np.stack([b.ravel() for b in self.basis])

    def closure_residual(self) -> float:
        """Largest distance of a basis product or adjoint from the span."""
        return _closure_defect(self.stacked(), self.ambient_dim)[0]

    def unit(self) -> np.ndarray:
        """Projector onto the common range of the algebra (its identity element)."""
        n = self.ambient_dim
        pos = sum(b @ b.conj().T for b in self.basis) if self.basis else np.zeros((n, n))
        w, v = np.linalg.eigh((pos + pos.conj().T) / 2)
        u = v[:, w > 1e-8 * max(float(w.max(initial=0.0)), 1e-300)]
        return u @ u.conj().T


def _closure_defect(stack: np.ndarray, n: int) -> tuple[float, np.ndarray]:
    """Residuals of all pairwise products and adjoints after projection onto the span."""
    mats = stack.reshape(-1, n, n)
    prods = np.einsum("aij,bjk->abik", mats, mats).reshape(-1, n * n)
    adj = np.conj(np.transpose(mats, (0, 2, 1))).reshape(-1, n * n)
    cand = np.vstack([prods, adj])
    coeff = cand @ stack.conj().T
    resid = cand - coeff @ stack
    norms = np.linalg.norm(resid, axis=1)
    return float(norms.max(initial=0.0)), resid[norms > CLOSURE_TOL]


def algebra_closure(generators: Sequence, ambient_dim: int,
                    drop_tol: float = DROP_TOL, closure_tol: float = CLOSURE_TOL) -> OperatorAlgebra:
    """Smallest *-closed, product-closed span containing ``generators``."""
    n = int(ambient_dim)
    gens = [as_matrix(g) for g in generators]
    for g in gens:
        if g.shape != (n, n):
            raise ValueError(f"generator of shape {g.shape} is not {n}x{n}")
    basis = orthonormalize(gens + [g.conj().T for g in gens], drop_tol=drop_tol)
    for _ in range(n * n + 1):
        if not basis:
            return OperatorAlgebra(n, ())
        stack = np.stack([b.ravel() for b in basis])
        worst, fresh = _closure_defect(stack, n)
        if worst <= closure_tol:
            return OperatorAlgebra(n, tuple(basis))
        new = orthonormalize([f.reshape(n, n) for f in fresh], drop_tol=closure_tol, basis=basis)
        if not new:
            return OperatorAlgebra(n, tuple(basis))
        basis.extend(new)
        if len(basis) > n * n:
            break
    raise RuntimeError("algebra closure did not converge")


def _clusters(w: np.ndarray, gap: float) -> list[np.ndarray]:
    """Split sorted eigenvalues into runs separated by more than ``gap``."""
    cuts = np.nonzero(np.diff(w) > gap)[0] + 1
    return np.split(np.arange(w.size), cuts)


def _random_hermitian(mats: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    c = rng.standard_normal(len(mats)) + 1j * rng.standard_normal(len(mats))
    x = np.tensordot(c, mats, axes=1)
    return x + x.conj().T


def _center(alg: OperatorAlgebra) -> np.ndarray:
    mats = np.stack(alg.basis)
    m = len(mats)
    # column k: commutators [B_k, B_l] for all l, stacked
    comm = np.einsum("kij,ljm->klim", mats, mats) - np.einsum("lij,kjm->klim", mats, mats)
    coeffs = null_space(comm.reshape(m, -1).T, threshold=1e-7)
    return np.einsum("km,kij->mij", coeffs, mats)


def _block_units(sub: np.ndarray, dim_L: int, dim_R: int, rng: np.random.Generator):
    """Matrix-unit basis for an algebra ``M_dL (x) I_dR`` given in arbitrary coordinates.

    ``sub`` holds the restricted algebra elements (k, r, r) with r = dim_L*dim_R.
    Returns the r x r unitary whose column ``l*dim_R + s`` is |l>|s>, or None.
    """
    r = dim_L * dim_R
    if dim_L == 1:
        return np.eye(r, dtype=np.complex128)
    h = _random_hermitian(sub, rng)
    w, v = np.linalg.eigh(h)
    groups = _clusters(w, 1e-6 * max(1.0, float(np.abs(w).max())))
    if len(groups) != dim_L or any(len(g) != dim_R for g in groups):
        return None
    c = rng.standard_normal(len(sub)) + 1j * rng.standard_normal(len(sub))
    x = np.tensordot(c, sub, axes=1)
    e1 = v[:, groups[0]]
    cols = [e1]
    for g in groups[1:]:
        ek = v[:, g]
        t = ek.conj().T @ x @ e1
        scale = np.linalg.norm(t) / np.sqrt(dim_R)
        if scale < 1e-6:
            return None
        cols.append(ek @ (t / scale))
    return np.hstack(cols)


def _block_residual(mats: np.ndarray, w: np.ndarray, dim_L: int, dim_R: int) -> float:
    comp = np.einsum("ia,kij,jb->kab", w.conj(), mats, w)
    t = comp.reshape(-1, dim_L, dim_R, dim_L, dim_R)
    red = np.einsum("kaibi->kab", t) / dim_R
    expect = np.einsum("kab,ij->kaibj", red, np.eye(dim_R))
    return float(np.abs(t - expect).max(initial=0.0))


def wedderburn_blocks(alg: OperatorAlgebra, label: str = "", tol: float = BLOCK_TOL,
                      attempts: int = 5) -> FactorDecomposition:
    """Decompose the algebra's unit space into blocks ``H_L (x) H_R`` on which it
    acts as ``M(H_L) (x) I_R``.

    Blocks are ordered by descending ``dim_L * dim_R``, then descending ``dim_L``.
    """
    n = alg.ambient_dim
    if not alg.basis:
        raise ValueError("empty algebra has no block structure")
    mats = np.stack(alg.basis)
    unit = alg.unit()
    wu, vu = np.linalg.eigh(unit)
    support = vu[:, wu > 0.5]
    center = _center(alg)
    if len(center) == 0:
        raise StructureVerificationError("algebra has trivial center; not a *-algebra", 1.0)
    rng = np.random.default_rng(_SEED)
    worst = np.inf
    for _ in range(attempts):
        hc = support.conj().T @ _random_hermitian(center, rng) @ support
        wc, vc = np.linalg.eigh(hc)
        groups = _clusters(wc, 1e-6 * max(1.0, float(np.abs(wc).max())))
        blocks = []
        ok = True
        for g in groups:
            q = support @ vc[:, g]
            sub = np.einsum("ia,kij,jb->kab", q.conj(), mats, q)
            rank = int(np.sum(np.linalg.svd(sub.reshape(len(sub), -1), compute_uv=False) > 1e-8))
            dim_L = int(round(np.sqrt(rank)))
            if dim_L * dim_L != rank or len(g) % dim_L:
                ok = False
                break
            dim_R = len(g) // dim_L
            units = _block_units(sub, dim_L, dim_R, rng)
            if units is None:
                ok = False
                break
            blocks.append(FactorBlock(dim_L, dim_R, q @ units))
        if not ok:
            continue
        worst = max(_block_residual(mats, b.isometry, b.dim_L, b.dim_R) for b in blocks)
        full = np.hstack([b.isometry for b in blocks])
        # the algebra must not couple different blocks
        off = full.conj().T @ mats @ full
        mask = np.zeros(off.shape[1:], dtype=bool)
        start = 0
        for b in blocks:
            size = b.dim_L * b.dim_R
            mask[start:start + size, start:start + size] = True
            start += size
        worst = max(worst, float(np.abs(off[:, ~mask]).max(initial=0.0)))
        if worst <= tol:
            blocks.sort(key=lambda b: (-b.dim_L * b.dim_R, -b.dim_L))
            return FactorDecomposition(label, n, tuple(blocks))
    raise StructureVerificationError("algebra is not a direct sum of M_L (x) I_R blocks", worst)
