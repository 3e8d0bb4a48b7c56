"""Decomposition of states saturating S(A) + S(C) <= S(AB) + S(CB).

With a purifying system D, saturation makes (B, A, D) and (B, C, D) Markov
chains. Their middle-system block structures split A and C into
``aL (x) aR`` and ``cL (x) cR`` sums; compressing the state cell by cell then
exposes a pure ``aL B cL`` factor times a residual ``aR cR`` state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import NotSaturatedError, RefinementExhaustedError, StructureVerificationError
from ..linalg import partial_trace, trace_distance
from ..states import (
    SATURATION_TOL,
    GapReport,
    MultipartiteState,
    _require_arity,
    ket_marginal,
    purification_ket,
    ssa_gap_v2,
)
from .algebra import FactorBlock, FactorDecomposition
from .markov import MATRIX_TOL, _compress, _expand, fixed_point_decomposition

PURITY_TOL = 1e-7
MAX_DEPTH = 3
_CELL_CUTOFF = 1e-12


@dataclass
class TheoremOneStructure:
    """sigma_ABC = sum_ij mu_ij (W^A_i (x) I (x) W^C_j)(psi_ij (x) tau_ij)(...)^dag.

    ``pure_blocks[(i, j)]`` lives on (aL_i, B, cL_j) and ``residual_states[(i, j)]``
    on (aR_i, cR_j); only cells with positive weight are present.
    """

    labels: tuple[str, str, str]
    dims: tuple[int, int, int]
    a_decomposition: FactorDecomposition
    c_decomposition: FactorDecomposition
    joint_weights: np.ndarray
    pure_blocks: dict[tuple[int, int], np.ndarray]
    residual_states: dict[tuple[int, int], np.ndarray]
    reassembly_error: float = float("nan")
    min_purity: float = float("nan")
    gap: GapReport | None = field(default=None, repr=False)

    def cells(self) -> list[tuple[int, int]]:
        return sorted(self.pure_blocks)

    def cell_operator(self, i: int, j: int) -> np.ndarray:
        """psi_ij (x) tau_ij reordered to (aL, aR, B, cL, cR)."""
        a = self.a_decomposition.blocks[i]
        c = self.c_decomposition.blocks[j]
        db = self.dims[1]
        op = np.kron(self.pure_blocks[(i, j)], self.residual_states[(i, j)])
        sub = [a.dim_L, db, c.dim_L, a.dim_R, c.dim_R]
        return partial_trace(op, sub, [0, 3, 1, 2, 4])

    def reassemble(self) -> np.ndarray:
        out = np.zeros((int(np.prod(self.dims)),) * 2, dtype=np.complex128)
        db = self.dims[1]
        for i, j in self.cells():
            a = self.a_decomposition.blocks[i]
            c = self.c_decomposition.blocks[j]
            op = self.joint_weights[i, j] * self.cell_operator(i, j)
            dims = [a.dim_L * a.dim_R, db, c.dim_L * c.dim_R]
            op = _expand(op, dims, 0, a.isometry)
            dims[0] = a.isometry.shape[0]
            out += _expand(op, dims, 2, c.isometry)
        return out

    def a_dims(self) -> list[tuple[int, int]]:
        return self.a_decomposition.dims()

    def c_dims(self) -> list[tuple[int, int]]:
        return self.c_decomposition.dims()


def _side_decompositions(sigma: MultipartiteState) -> tuple[FactorDecomposition, FactorDecomposition]:
    """Block structures of A and C from the (B, A, D) and (B, C, D) chains."""
    psi = purification_ket(sigma).ravel()
    da, db, dc = sigma.dims
    rank = psi.size // sigma.dim
    dims = [da, db, dc, rank]
    rho_ad = ket_marginal(psi, dims, [0, 3])
    rho_cd = ket_marginal(psi, dims, [2, 3])
    a_label, _, c_label = sigma.labels
    adec = fixed_point_decomposition(rho_ad, da, rank, label=a_label)
    cdec = fixed_point_decomposition(rho_cd, dc, rank, label=c_label)
    return adec, cdec


def _cells(sigma: np.ndarray, dims, adec: FactorDecomposition, cdec: FactorDecomposition):
    da, db, dc = dims
    mu = np.zeros((len(adec.blocks), len(cdec.blocks)))
    pure, resid = {}, {}
    for i, a in enumerate(adec.blocks):
        xa = _compress(sigma, dims, 0, a.isometry)
        for j, c in enumerate(cdec.blocks):
            x = _compress(xa, [a.dim_L * a.dim_R, db, dc], 2, c.isometry)
            w = float(np.trace(x).real)
            if w <= _CELL_CUTOFF:
                continue
            mu[i, j] = w
            sub = [a.dim_L, a.dim_R, db, c.dim_L, c.dim_R]
            pure[(i, j)] = partial_trace(x, sub, [0, 2, 3]) / w
            resid[(i, j)] = partial_trace(x, sub, [1, 4]) / w
    return mu, pure, resid


def _largest_eigenvalue(m: np.ndarray) -> float:
    return float(np.linalg.eigvalsh((m + m.conj().T) / 2)[-1])


def _refine(sigma: np.ndarray, dims, labels, adec, cdec, mu, pure, depth: int):
    """Split every impure cell by re-running the decomposition inside it.

    Only cells whose A-block and C-block appear in no other cell can be
    refined independently; anything else is reported as exhausted.
    """
    impure = [k for k, p in pure.items() if _largest_eigenvalue(p) < 1 - PURITY_TOL]
    if not impure:
        return adec, cdec
    worst = min(_largest_eigenvalue(pure[k]) for k in impure)
    if depth <= 0:
        raise RefinementExhaustedError(worst, MAX_DEPTH)
    a_blocks = list(adec.blocks)
    c_blocks = list(cdec.blocks)
    new_a: dict[int, list[FactorBlock]] = {}
    new_c: dict[int, list[FactorBlock]] = {}
    for i, j in impure:
        if np.count_nonzero(mu[i]) != 1 or np.count_nonzero(mu[:, j]) != 1:
            raise RefinementExhaustedError(worst, MAX_DEPTH - depth)
        a, c = a_blocks[i], c_blocks[j]
        x = _compress(_compress(sigma, dims, 0, a.isometry), [a.dim_L * a.dim_R, dims[1], dims[2]], 2, c.isometry)
        x = x / np.trace(x).real
        cell = MultipartiteState(x, (a.dim_L * a.dim_R, dims[1], c.dim_L * c.dim_R), labels, validate=False)
        sub = _decompose(cell, depth - 1)
        new_a[i] = [FactorBlock(b.dim_L, b.dim_R, a.isometry @ b.isometry) for b in sub.a_decomposition.blocks]
        new_c[j] = [FactorBlock(b.dim_L, b.dim_R, c.isometry @ b.isometry) for b in sub.c_decomposition.blocks]
    a_out = [b for k, blk in enumerate(a_blocks) for b in new_a.get(k, [blk])]
    c_out = [b for k, blk in enumerate(c_blocks) for b in new_c.get(k, [blk])]
    return (FactorDecomposition(adec.system_label, adec.system_dim, tuple(a_out)),
            FactorDecomposition(cdec.system_label, cdec.system_dim, tuple(c_out)))


def _decompose(sigma: MultipartiteState, depth: int) -> TheoremOneStructure:
    adec, cdec = _side_decompositions(sigma)
    mu, pure, resid = _cells(sigma.matrix, sigma.dims, adec, cdec)
    if any(_largest_eigenvalue(p) < 1 - PURITY_TOL for p in pure.values()):
        adec, cdec = _refine(sigma.matrix, sigma.dims, sigma.labels, adec, cdec, mu, pure, depth)
        mu, pure, resid = _cells(sigma.matrix, sigma.dims, adec, cdec)
    a_order = sorted(range(len(adec.blocks)), key=lambda i: (-mu[i].sum(), -adec.blocks[i].dim_L))
    c_order = sorted(range(len(cdec.blocks)), key=lambda j: (-mu[:, j].sum(), -cdec.blocks[j].dim_L))
    a_pos = {old: new for new, old in enumerate(a_order)}
    c_pos = {old: new for new, old in enumerate(c_order)}
    return TheoremOneStructure(
        labels=sigma.labels,
        dims=sigma.dims,
        a_decomposition=adec.reorder(a_order),
        c_decomposition=cdec.reorder(c_order),
        joint_weights=mu[np.ix_(a_order, c_order)],
        pure_blocks={(a_pos[i], c_pos[j]): p for (i, j), p in pure.items()},
        residual_states={(a_pos[i], c_pos[j]): r for (i, j), r in resid.items()},
    )


def theorem1_decompose(sigma: MultipartiteState, tol: float = SATURATION_TOL,
                       matrix_tol: float = MATRIX_TOL, max_depth: int = MAX_DEPTH) -> TheoremOneStructure:
    """Recover the A and C block structures and the pure (aL, B, cL) factors."""
    _require_arity(sigma, 3, "theorem1_decompose")
    gap = ssa_gap_v2(sigma, tol)
    if gap.gap_bits > tol:
        raise NotSaturatedError("ssa_v2", gap.gap_bits, tol)
    st = _decompose(sigma, max_depth)
    st.gap = gap
    st.min_purity = min(_largest_eigenvalue(p) for p in st.pure_blocks.values())
    if st.min_purity < 1 - PURITY_TOL:
        raise RefinementExhaustedError(st.min_purity, max_depth)
    st.reassembly_error = trace_distance(st.reassemble(), sigma.matrix)
    if st.reassembly_error > matrix_tol:
        raise StructureVerificationError("cell reassembly does not match the state", st.reassembly_error)
    return st
