"""States saturating SSA for both (A, B, C) and (B, A, C).

Both Markov decompositions are computed; the A-blocks and B-blocks then tile
the state into cells with weights p_ij. Cells connected through a shared block
form one sector k, and in each sector the C part must factor off:
rho = sum_k p_k rho_AB^(k) (x) rho_C^(k).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NotSaturatedError, StructureVerificationError
from ..linalg import partial_trace, trace_distance
from ..states import SATURATION_TOL, GapReport, MultipartiteState, _require_arity, ssa_gap_v1
from .markov import MATRIX_TOL, MarkovStructure, markov_decompose

CELL_CUTOFF = 1e-9


@dataclass
class BiSsaReport:
    gap_abc: GapReport
    gap_bac: GapReport
    b_markov: MarkovStructure  # decomposition of B from (A, B, C)
    a_markov: MarkovStructure  # decomposition of A from (B, A, C)
    cell_weights: np.ndarray  # p[i, j], i over A-blocks, j over B-blocks
    sectors: dict[tuple[int, int], int]
    sector_weights: np.ndarray
    c_states: list[np.ndarray]
    consistency_error: float
    reassembly_error: float

    @property
    def n_sectors(self) -> int:
        return len(self.sector_weights)


def _sector_map(support: np.ndarray) -> dict[tuple[int, int], int]:
    """Label connected components of the bipartite cell graph, in row-major discovery order."""
    n_a, n_b = support.shape
    row = [-1] * n_a
    col = [-1] * n_b
    k = 0
    for i0, j0 in zip(*np.nonzero(support)):
        if row[i0] >= 0:
            continue
        stack = [("a", int(i0))]
        row[i0] = k
        while stack:
            side, x = stack.pop()
            if side == "a":
                for j in np.nonzero(support[x])[0]:
                    if col[j] < 0:
                        col[j] = k
                        stack.append(("b", int(j)))
            else:
                for i in np.nonzero(support[:, x])[0]:
                    if row[i] < 0:
                        row[i] = k
                        stack.append(("a", int(i)))
        k += 1
    return {(int(i), int(j)): row[i] for i, j in zip(*np.nonzero(support))}


def bi_ssa_report(rho: MultipartiteState, tol: float = SATURATION_TOL,
                  matrix_tol: float = MATRIX_TOL) -> BiSsaReport:
    """Sector structure of a state that is Markov in both A-B-C and B-A-C order."""
    _require_arity(rho, 3, "bi_ssa_report")
    a, b, c = rho.labels
    swapped = rho.reorder(b, a, c)
    g1 = ssa_gap_v1(rho, tol)
    g2 = ssa_gap_v1(swapped, tol)
    for name, g in (("ssa_v1 (A,B,C)", g1), ("ssa_v1 (B,A,C)", g2)):
        if g.gap_bits > tol:
            raise NotSaturatedError(name, g.gap_bits, tol)
    mb = markov_decompose(rho, tol, matrix_tol)
    ma = markov_decompose(swapped, tol, matrix_tol)
    da, db, dc = rho.dims
    pa = [blk.projector for blk in ma.b_decomposition.blocks]
    pb = [blk.projector for blk in mb.b_decomposition.blocks]
    rho_ab = rho.marginal(a, b).matrix
    p = np.array([[float(np.trace(np.kron(x, y) @ rho_ab).real) for y in pb] for x in pa])
    sectors = _sector_map(p > CELL_CUTOFF)

    # C marginal of every block in both decompositions; cells must agree
    c_of_b = [partial_trace(r, [blk.dim_R, dc], [1]) for r, blk in zip(mb.right_states, mb.b_decomposition.blocks)]
    c_of_a = [partial_trace(r, [blk.dim_R, dc], [1]) for r, blk in zip(ma.right_states, ma.b_decomposition.blocks)]
    consistency = max((trace_distance(c_of_a[i], c_of_b[j]) for i, j in sectors), default=0.0)
    if consistency > matrix_tol:
        raise StructureVerificationError("C factors of the two Markov decompositions disagree", consistency)

    n_k = max(sectors.values()) + 1
    weights = np.zeros(n_k)
    c_states: list[np.ndarray] = [None] * n_k
    out = np.zeros_like(rho.matrix)
    for k in range(n_k):
        rows = sorted({i for (i, j), s in sectors.items() if s == k})
        cols = sorted({j for (i, j), s in sectors.items() if s == k})
        proj = np.kron(np.kron(sum(pa[i] for i in rows), sum(pb[j] for j in cols)), np.eye(dc))
        block = proj @ rho.matrix @ proj
        weights[k] = float(np.trace(block).real)
        c_states[k] = c_of_b[cols[0]]
        out += np.kron(partial_trace(block, [da, db, dc], [0, 1]), c_states[k])
    err = trace_distance(out, rho.matrix)
    if err > matrix_tol:
        raise StructureVerificationError("sector reassembly does not match the state", err)
    return BiSsaReport(g1, g2, mb, ma, p, sectors, weights, c_states, consistency, err)
