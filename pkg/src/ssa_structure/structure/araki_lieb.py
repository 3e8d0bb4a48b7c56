"""Bipartite states saturating S(B) - S(C) <= S(BC).

Saturation forces B = L (x) R with omega_BC = omega_L (x) |psi><psi|_RC. The
factorization is read off the C eigenbasis: the partial matrix elements
``<c_i|omega_BC|c_j> / sqrt(s_i s_j)`` equal ``omega_L (x) |r_i><r_j|``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import NotSaturatedError, StructureVerificationError
from ..linalg import SUPPORT_CUTOFF, trace_distance
from ..states import SATURATION_TOL, GapReport, MultipartiteState, _require_arity, araki_lieb_gap
from .markov import MATRIX_TOL


@dataclass
class ArakiLiebStructure:
    """omega_BC = (W (x) I_C)(omega_L (x) |psi><psi|_RC)(W (x) I_C)^dag."""

    labels: tuple[str, str]
    dims: tuple[int, int]
    dim_L: int
    dim_R: int
    isometry: np.ndarray  # dim_B x (dim_L * dim_R), column l * dim_R + r
    omega_L: np.ndarray
    psi_RC: np.ndarray  # density on (R, C)
    reassembly_error: float = float("nan")
    purity: float = float("nan")
    gap: GapReport | None = field(default=None, repr=False)

    @property
    def b_factorization(self) -> tuple[int, int, np.ndarray]:
        return self.dim_L, self.dim_R, self.isometry

    def reassemble(self) -> np.ndarray:
        w = np.kron(self.isometry, np.eye(self.dims[1]))
        return w @ np.kron(self.omega_L, self.psi_RC) @ w.conj().T


def araki_lieb_decompose(omega: MultipartiteState, tol: float = SATURATION_TOL,
                         matrix_tol: float = MATRIX_TOL) -> ArakiLiebStructure:
    """Factor B into L (x) R with a pure RC part and a product L part."""
    _require_arity(omega, 2, "araki_lieb_decompose")
    gap = araki_lieb_gap(omega, tol)
    if gap.gap_bits > tol:
        raise NotSaturatedError("araki_lieb", gap.gap_bits, tol)
    db, dc = omega.dims
    t = omega.matrix.reshape(db, dc, db, dc)
    s, vecs = np.linalg.eigh(omega.marginal(omega.labels[1]).matrix)
    keep = s > SUPPORT_CUTOFF * max(float(s.max()), 1.0)
    s, vecs = s[keep], vecs[:, keep]
    dim_R = s.size
    ref = int(np.argmax(s))

    def n(i: int, j: int) -> np.ndarray:
        b = np.einsum("c,acbd,d->ab", vecs[:, i].conj(), t, vecs[:, j])
        return b / np.sqrt(s[i] * s[j])

    lw, lv = np.linalg.eigh(n(ref, ref))
    lk = lw > SUPPORT_CUTOFF * max(float(lw.max()), 1.0)
    lw, lv = lw[::-1][lk[::-1]], lv[:, ::-1][:, lk[::-1]]
    dim_L = lw.size
    w = np.zeros((db, dim_L * dim_R), dtype=np.complex128)
    for i in range(dim_R):
        cols = n(i, ref) @ lv / lw
        w[:, np.arange(dim_L) * dim_R + i] = cols
    ket = np.zeros((dim_R, dc), dtype=np.complex128)
    for i in range(dim_R):
        ket[i] = np.sqrt(s[i]) * vecs[:, i]
    ket = ket.ravel()
    st = ArakiLiebStructure(
        labels=omega.labels,
        dims=omega.dims,
        dim_L=dim_L,
        dim_R=dim_R,
        isometry=w,
        omega_L=np.diag(lw).astype(np.complex128),
        psi_RC=np.outer(ket, ket.conj()),
        gap=gap,
    )
    iso_err = float(np.abs(w.conj().T @ w - np.eye(dim_L * dim_R)).max())
    st.purity = float(np.linalg.eigvalsh(st.psi_RC)[-1] / np.trace(st.psi_RC).real)
    st.reassembly_error = trace_distance(st.reassemble(), omega.matrix)
    if iso_err > matrix_tol:
        raise StructureVerificationError("recovered B factorization is not an isometry", iso_err)
    if st.reassembly_error > matrix_tol:
        raise StructureVerificationError("omega_L (x) psi_RC does not reassemble the state", st.reassembly_error)
    return st
