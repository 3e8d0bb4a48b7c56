"""Markov (SSA-saturating) states: Petz recovery oracle and block decomposition.

The decomposition of the middle system is read off the fixed-point algebra of
the unital dual of ``Tr_C o R_{B->BC}``, where ``R`` is the Petz map of
``rho_BC``. That algebra is ``sum_j M(b^L_j) (x) I(b^R_j)``; compressing the
state with the block isometries gives the weights and block states.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import NotSaturatedError, StructureVerificationError
from ..linalg import null_space, partial_trace, psd_roots, trace_distance, trace_norm
from ..states import SATURATION_TOL, GapReport, MultipartiteState, _require_arity, ssa_gap_v1
from .algebra import FactorDecomposition, algebra_closure, wedderburn_blocks

MATRIX_TOL = 1e-7
FIXED_POINT_THRESHOLD = 1e-8


def petz_recovery(rho_bc: np.ndarray, dim_b: int, dim_c: int, x: np.ndarray) -> np.ndarray:
    """R(X) = rho_BC^1/2 (rho_B^-1/2 X rho_B^-1/2 (x) I_C) rho_BC^1/2 for X on (.., B).

    ``x`` may carry an untouched leading factor: shape (dA*dB, dA*dB).
    """
    sq_bc, _ = psd_roots(rho_bc)
    rho_b = np.einsum("acbc->ab", rho_bc.reshape(dim_b, dim_c, dim_b, dim_c))
    _, inv_b = psd_roots(rho_b)
    d_a = x.shape[0] // dim_b
    inner = np.kron(np.eye(d_a), inv_b) @ x @ np.kron(np.eye(d_a), inv_b)
    lifted = np.kron(inner, np.eye(dim_c))
    outer = np.kron(np.eye(d_a), sq_bc)
    return outer @ lifted @ outer


def petz_markov_error(rho: MultipartiteState) -> float:
    """Trace-norm distance between rho_ABC and the Petz recovery of rho_AB."""
    _require_arity(rho, 3, "petz_markov_error")
    a, b, c = rho.labels
    _, db, dc = rho.dims
    rec = petz_recovery(rho.marginal(b, c).matrix, db, dc, rho.marginal(a, b).matrix)
    return trace_norm(rho.matrix - rec)


def _dual_superoperator(rho_yz: np.ndarray, dy: int, dz: int) -> np.ndarray:
    """Matrix of Y -> rho_Y^-1/2 Tr_Z[rho_YZ^1/2 (Y (x) I) rho_YZ^1/2] rho_Y^-1/2 on vec(Y)."""
    sq, _ = psd_roots(rho_yz)
    s = sq.reshape(dy, dz, dy, dz)
    rho_y = np.einsum("azbz->ab", rho_yz.reshape(dy, dz, dy, dz))
    _, inv_y = psd_roots(rho_y)
    # L[a, d, b, c] = sum_{z, w} S[a z, b w] S[c w, d z]
    lin = np.einsum("azbw,cwdz->adbc", s, s)
    t = np.einsum("ia,adbc,dj->ijbc", inv_y, lin, inv_y)
    return t.reshape(dy * dy, dy * dy)


def fixed_point_decomposition(rho_yz: np.ndarray, dy: int, dz: int, label: str = "") -> FactorDecomposition:
    """Block structure of Y from the fixed points of the Petz-composed dual map."""
    t = _dual_superoperator(rho_yz, dy, dz)
    fixed = null_space(t - np.eye(dy * dy), threshold=FIXED_POINT_THRESHOLD)
    gens = [fixed[:, k].reshape(dy, dy) for k in range(fixed.shape[1])]
    if not gens:
        raise StructureVerificationError("dual map has no fixed points", 1.0)
    alg = algebra_closure(gens, dy)
    return wedderburn_blocks(alg, label=label)


def _compress(rho: np.ndarray, dims, which: int, w: np.ndarray) -> np.ndarray:
    """(I (x) W (x) I)^dag rho (I (x) W (x) I) with W acting on subsystem ``which``."""
    dims = list(dims)
    n = len(dims)
    t = rho.reshape(dims + dims)
    t = np.tensordot(w.conj().T, t, axes=([1], [which]))
    t = np.moveaxis(t, 0, which)
    t = np.tensordot(t, w, axes=([n + which], [0]))
    t = np.moveaxis(t, -1, n + which)
    dims[which] = w.shape[1]
    d = int(np.prod(dims))
    return t.reshape(d, d)


def _expand(block: np.ndarray, dims, which: int, w: np.ndarray) -> np.ndarray:
    """Inverse direction of :func:`_compress`: push a block operator through W."""
    dims = list(dims)
    n = len(dims)
    dims[which] = w.shape[1]
    t = block.reshape(dims + dims)
    t = np.tensordot(w, t, axes=([1], [which]))
    t = np.moveaxis(t, 0, which)
    t = np.tensordot(t, w.conj(), axes=([n + which], [1]))
    t = np.moveaxis(t, -1, n + which)
    dims[which] = w.shape[0]
    d = int(np.prod(dims))
    return t.reshape(d, d)


@dataclass
class MarkovStructure:
    """rho_ABC = sum_j w_j (I (x) W_j (x) I)(rho_{A bL_j} (x) rho_{bR_j C})(...)^dag."""

    labels: tuple[str, str, str]
    dims: tuple[int, int, int]
    b_decomposition: FactorDecomposition
    weights: np.ndarray
    left_states: list[np.ndarray]
    right_states: list[np.ndarray]
    reassembly_error: float = float("nan")
    gap: GapReport | None = field(default=None, repr=False)
    petz_error: float = float("nan")

    def reassemble(self) -> np.ndarray:
        da, _, dc = self.dims
        out = np.zeros((int(np.prod(self.dims)),) * 2, dtype=np.complex128)
        for w, blk, left, right in zip(self.weights, self.b_decomposition.blocks,
                                       self.left_states, self.right_states):
            out += w * _expand(np.kron(left, right), [da, blk.dim_L * blk.dim_R, dc], 1, blk.isometry)
        return out

    def block_dims(self) -> list[tuple[int, int]]:
        return self.b_decomposition.dims()


def markov_decompose(rho: MultipartiteState, tol: float = SATURATION_TOL,
                     matrix_tol: float = MATRIX_TOL) -> MarkovStructure:
    """Decompose the middle subsystem of an SSA-saturating tripartite state."""
    _require_arity(rho, 3, "markov_decompose")
    gap = ssa_gap_v1(rho, tol)
    if gap.gap_bits > tol:
        raise NotSaturatedError("ssa_v1", gap.gap_bits, tol)
    petz = petz_markov_error(rho)
    if petz > matrix_tol:
        raise NotSaturatedError("petz_recovery", petz, matrix_tol)
    a, b, c = rho.labels
    da, db, dc = rho.dims
    dec = fixed_point_decomposition(rho.marginal(b, c).matrix, db, dc, label=b)
    weights, lefts, rights = [], [], []
    for blk in dec.blocks:
        x = _compress(rho.matrix, rho.dims, 1, blk.isometry)
        sub = [da, blk.dim_L, blk.dim_R, dc]
        lam = float(np.trace(x).real)
        weights.append(lam)
        lefts.append(partial_trace(x, sub, [0, 1]) / lam)
        rights.append(partial_trace(x, sub, [2, 3]) / lam)
    order = sorted(range(len(weights)), key=lambda k: (-weights[k], -dec.blocks[k].dim_L))
    st = MarkovStructure(
        labels=rho.labels,
        dims=rho.dims,
        b_decomposition=dec.reorder(order),
        weights=np.array([weights[k] for k in order]),
        left_states=[lefts[k] for k in order],
        right_states=[rights[k] for k in order],
        gap=gap,
        petz_error=petz,
    )
    st.reassembly_error = trace_distance(st.reassemble(), rho.matrix)
    if st.reassembly_error > matrix_tol:
        raise StructureVerificationError("Markov block reassembly does not match the state",
                                         st.reassembly_error)
    return st
