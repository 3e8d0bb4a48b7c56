"""Saturation diagnostics for channel entropy bounds.

Three analyses:

* ``channel_saturation_analyze``: rank of the complementary output, the
  amplitudes lambda_mu of a rank-one environment, the candidate reversal
  ``M = sum_mu lambda_mu K_mu^dag`` and the output-environment product test.
  Each sub-condition is reported on its own; none is inferred from another.
* ``holevo_saturation_analyze``: when the Holevo quantity of the induced
  ensemble meets the exchange entropy, the block structure of Phi(rho)
  obtained from the decomposition of the Stinespring state omega_ABC.
* ``coherent_saturation_check``: I_c against S(rho), plus an optional
  product-form test of the output in a proposed L (x) R split.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..channels import KrausChannel, _density, apply, average_entropy_report, complementary, \
    exchange_bound_report, omega_state
from ..errors import NotSaturatedError, StructureVerificationError
from ..linalg import partial_trace, trace_distance, trace_norm
from ..states import SATURATION_TOL, GapReport, von_neumann_entropy
from .markov import MATRIX_TOL
from .theorem1 import TheoremOneStructure, theorem1_decompose


@dataclass
class ChannelSaturationReport:
    gram: np.ndarray
    singular_values: np.ndarray
    gram_second_singular: float
    rank_one: bool
    lam: np.ndarray | None
    M: np.ndarray | None
    reconstruction_error: float | None
    product_identity_error: float
    average_entropy: GapReport = field(repr=False)


def _gauge(v: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the first largest-modulus entry is real and >= 0."""
    k = int(np.argmax(np.abs(v) > np.abs(v).max() * (1 - 1e-12)))
    if abs(v[k]) == 0:
        return v
    return v * (abs(v[k]) / v[k])


def channel_saturation_analyze(phi: KrausChannel, rho, tol: float = SATURATION_TOL) -> ChannelSaturationReport:
    rho = _density(phi, rho)
    g = complementary(phi, rho)
    out = apply(phi, rho)
    u, s, _ = np.linalg.svd(g)
    second = float(s[1]) if s.size > 1 else 0.0
    rank_one = second <= tol * float(s[0])
    lam = m = recon = None
    if rank_one:
        lam = _gauge(np.sqrt(s[0]) * u[:, 0])
        m = sum(l * k.conj().T for l, k in zip(lam, phi.kraus))
        recon = trace_norm(rho - m @ out @ m.conj().T)
    ks = np.stack(phi.kraus)
    blocks = np.einsum("mij,jk,nlk->mnil", ks, rho, ks.conj())
    n, d = phi.n_kraus, phi.dim_out
    joint = blocks.transpose(2, 0, 3, 1).reshape(d * n, d * n)
    prod_err = trace_norm(joint - np.kron(out, g))
    return ChannelSaturationReport(
        gram=g,
        singular_values=s,
        gram_second_singular=second,
        rank_one=bool(rank_one),
        lam=lam,
        M=m,
        reconstruction_error=recon,
        product_identity_error=prod_err,
        average_entropy=average_entropy_report(phi, rho, tol),
    )


@dataclass
class OutputBlock:
    """One A-block of Phi(rho): weight and normalized state on (aL, aR)."""

    dim_L: int
    dim_R: int
    weight: float
    isometry: np.ndarray
    state: np.ndarray


@dataclass
class HolevoSaturationReport:
    gap: GapReport
    structure: TheoremOneStructure
    output_blocks: list[OutputBlock]
    output_error: float


def holevo_saturation_analyze(phi: KrausChannel, rho, tol: float = SATURATION_TOL,
                              matrix_tol: float = MATRIX_TOL) -> HolevoSaturationReport:
    """Block structure of Phi(rho) when the Holevo quantity meets the exchange entropy."""
    rho = _density(phi, rho)
    gap = exchange_bound_report(phi, rho, tol)
    if gap.gap_bits > tol:
        raise NotSaturatedError("exchange_bound", gap.gap_bits, tol)
    om = omega_state(phi, rho).state
    st = theorem1_decompose(om, tol, matrix_tol)
    db = st.dims[1]
    blocks = []
    for i, a in enumerate(st.a_decomposition.blocks):
        acc = np.zeros((a.dim_L * a.dim_R,) * 2, dtype=np.complex128)
        for j, c in enumerate(st.c_decomposition.blocks):
            if (i, j) not in st.pure_blocks:
                continue
            left = partial_trace(st.pure_blocks[(i, j)], [a.dim_L, db, c.dim_L], [0])
            right = partial_trace(st.residual_states[(i, j)], [a.dim_R, c.dim_R], [0])
            acc += st.joint_weights[i, j] * np.kron(left, right)
        w = float(np.trace(acc).real)
        blocks.append(OutputBlock(a.dim_L, a.dim_R, w, a.isometry, acc / w))
    recon = sum(b.weight * b.isometry @ b.state @ b.isometry.conj().T for b in blocks)
    err = trace_distance(recon, apply(phi, rho))
    if err > matrix_tol:
        raise StructureVerificationError("block structure does not reproduce Phi(rho)", err)
    return HolevoSaturationReport(gap, st, blocks, err)


@dataclass
class CoherentSaturationReport:
    coherent_information: float
    input_entropy: float
    gap_bits: float
    saturated: bool
    product_error: float | None = None
    product_ok: bool | None = None


def coherent_saturation_check(phi: KrausChannel, rho, proposed=None, tol: float = SATURATION_TOL,
                              matrix_tol: float = MATRIX_TOL) -> CoherentSaturationReport:
    """|I_c - S(rho)| and, given ``(dim_L, dim_R, W)``, whether W^dag Phi(rho) W is a product."""
    rho = _density(phi, rho)
    out = apply(phi, rho)
    ic = von_neumann_entropy(out) - von_neumann_entropy(complementary(phi, rho))
    s_in = von_neumann_entropy(rho)
    rep = CoherentSaturationReport(ic, s_in, s_in - ic, abs(s_in - ic) <= tol)
    if proposed is not None:
        dl, dr, w = proposed
        w = np.asarray(w, dtype=np.complex128)
        if w.shape != (phi.dim_out, dl * dr):
            raise ValueError(f"proposed isometry has shape {w.shape}, expected {(phi.dim_out, dl * dr)}")
        if np.abs(w @ w.conj().T - np.eye(phi.dim_out)).max() > 1e-9 or \
                np.abs(w.conj().T @ w - np.eye(dl * dr)).max() > 1e-9:
            raise ValueError("proposed isometry must be unitary onto the output space")
        x = w.conj().T @ out @ w
        prod = np.kron(partial_trace(x, [dl, dr], [0]), partial_trace(x, [dl, dr], [1]))
        rep.product_error = trace_distance(x, prod)
        rep.product_ok = rep.product_error <= matrix_tol
    return rep
