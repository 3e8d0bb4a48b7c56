"""Seeded random states and channels, and planted instances of the saturating families.

All randomness comes from a Philox counter-based generator; complex Gaussians
are drawn with Box-Muller on fixed-order uniform draws, so equal seeds give
bit-identical outputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg

from .channels import KrausChannel
from .linalg import kron_all
from .states import MultipartiteState
from .structure.algebra import FactorBlock, FactorDecomposition

MIN_WEIGHT = 0.05

__all__ = [
    "make_rng",
    "complex_normal",
    "haar_unitary",
    "random_pure",
    "random_density",
    "random_state",
    "random_channel",
    "random_weights",
    "BlockSpec",
    "planted_markov",
    "planted_theorem1",
    "planted_araki_lieb",
    "planted_bi_ssa",
    "scramble_local",
    "local_unitary",
]


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.Philox(seed))


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard complex Gaussian entries (unit variance per real component)."""
    n = int(np.prod(shape))
    u1 = rng.random(n)
    u2 = rng.random(n)
    r = np.sqrt(-2.0 * np.log1p(-u1))
    theta = 2.0 * np.pi * u2
    return (r * np.cos(theta) + 1j * r * np.sin(theta)).reshape(shape)


def _isometry(g: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    phases = np.where(np.abs(d) > 0, d / np.abs(d), 1.0)
    return q * phases


def haar_unitary(d: int, seed) -> np.ndarray:
    return _isometry(complex_normal(make_rng(seed), (d, d)))


def random_pure(d: int, seed) -> np.ndarray:
    v = complex_normal(make_rng(seed), (d,))
    return v / np.linalg.norm(v)


def random_density(d: int, rank: int | None = None, seed=0) -> np.ndarray:
    """Hilbert-Schmidt-type sample G G^dag / Tr with G a d x rank Ginibre matrix."""
    rank = d if rank is None else int(rank)
    if not 1 <= rank <= d:
        raise ValueError(f"rank must lie in [1, {d}], got {rank}")
    g = complex_normal(make_rng(seed), (d, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def random_state(dims: Sequence[int], labels: Sequence[str] | None = None, rank: int | None = None,
                 seed=0) -> MultipartiteState:
    dims = tuple(int(d) for d in dims)
    labels = tuple(labels) if labels is not None else tuple("ABCDEFGH"[: len(dims)])
    return MultipartiteState(random_density(int(np.prod(dims)), rank, seed), dims, labels)


def random_channel(d_in: int, d_out: int, n_kraus: int, seed=0) -> KrausChannel:
    """Slice a random isometry C^d_in -> C^(n_kraus*d_out) into Kraus blocks."""
    if n_kraus < 1 or n_kraus * d_out < d_in:
        raise ValueError(f"need n_kraus * d_out >= d_in, got {n_kraus} * {d_out} < {d_in}")
    v = _isometry(complex_normal(make_rng(seed), (n_kraus * d_out, d_in)))
    return KrausChannel(tuple(v[m * d_out:(m + 1) * d_out] for m in range(n_kraus)))


def random_weights(n: int, seed, minimum: float = MIN_WEIGHT) -> np.ndarray:
    """Probability vector with every entry at least ``minimum``."""
    if n * minimum > 1:
        raise ValueError(f"cannot give {n} weights a floor of {minimum}")
    x = make_rng(seed).random(n) + 0.1
    return minimum + (1 - n * minimum) * x / x.sum()


@dataclass(frozen=True)
class BlockSpec:
    """Per-block (dim_L, dim_R, weight) plus the side dimensions of a family."""

    blocks: tuple[tuple[int, int, float], ...]
    dim_A: int = 1
    dim_C: int = 1

    def __post_init__(self):
        blocks = tuple((int(l), int(r), float(w)) for l, r, w in self.blocks)
        if not blocks:
            raise ValueError("a block spec needs at least one block")
        if any(l < 1 or r < 1 for l, r, _ in blocks) or self.dim_A < 1 or self.dim_C < 1:
            raise ValueError("all dimensions must be at least 1")
        w = np.array([b[2] for b in blocks])
        if np.any(w <= 0) or abs(w.sum() - 1) > 1e-12:
            raise ValueError(f"block weights must be positive and sum to 1, got {w.tolist()}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def weights(self) -> np.ndarray:
        return np.array([b[2] for b in self.blocks])

    @property
    def system_dim(self) -> int:
        return sum(l * r for l, r, _ in self.blocks)


def _embeddings(shapes: Sequence[tuple[int, int]], label: str) -> FactorDecomposition:
    """Blocks on consecutive coordinates of the standard basis."""
    total = sum(l * r for l, r in shapes)
    blocks = []
    start = 0
    for l, r in shapes:
        w = np.zeros((total, l * r), dtype=np.complex128)
        w[start:start + l * r] = np.eye(l * r)
        blocks.append(FactorBlock(l, r, w))
        start += l * r
    return FactorDecomposition(label, total, tuple(blocks))


def _embed(op: np.ndarray, isometries: Sequence[np.ndarray | int]) -> np.ndarray:
    """Conjugate ``op`` by the Kronecker product of the given isometries (ints mean identity)."""
    w = kron_all(*[np.eye(x) if isinstance(x, (int, np.integer)) else x for x in isometries])
    return w @ op @ w.conj().T


def _pure(d: int, rng) -> np.ndarray:
    v = random_pure(d, rng)
    return np.outer(v, v.conj())


def planted_markov(spec: BlockSpec, seed) -> tuple[MultipartiteState, FactorDecomposition]:
    """sum_j w_j rho_{A bL_j} (x) rho_{bR_j C}, with B the direct sum of the blocks."""
    rng = make_rng(seed)
    dec = _embeddings([(l, r) for l, r, _ in spec.blocks], "B")
    dA, dC = spec.dim_A, spec.dim_C
    rho = np.zeros((dA * dec.system_dim * dC,) * 2, dtype=np.complex128)
    for (l, r, w), blk in zip(spec.blocks, dec.blocks):
        left = random_density(dA * l, seed=rng)
        right = random_density(r * dC, seed=rng)
        rho += w * _embed(np.kron(left, right), [dA, blk.isometry, dC])
    state = MultipartiteState((rho + rho.conj().T) / 2, (dA, dec.system_dim, dC), ("A", "B", "C"))
    return state, dec


def _components(support: np.ndarray) -> list[tuple[list[int], list[int]]]:
    """Connected components of the bipartite row/column graph of a boolean matrix."""
    rows, cols = support.shape
    seen_r, seen_c = set(), set()
    comps = []
    for start in range(rows):
        if start in seen_r or not support[start].any():
            continue
        rs, cs = {start}, set()
        frontier = [("r", start)]
        while frontier:
            kind, k = frontier.pop()
            if kind == "r":
                for j in np.nonzero(support[k])[0]:
                    if j not in cs:
                        cs.add(int(j))
                        frontier.append(("c", int(j)))
            else:
                for i in np.nonzero(support[:, k])[0]:
                    if i not in rs:
                        rs.add(int(i))
                        frontier.append(("r", int(i)))
        seen_r |= rs
        seen_c |= cs
        comps.append((sorted(rs), sorted(cs)))
    return comps


def planted_theorem1(mu, a_blocks: Sequence[tuple[int, int]], c_blocks: Sequence[tuple[int, int]],
                     dim_B: int, seed) -> tuple[MultipartiteState, FactorDecomposition, FactorDecomposition]:
    """Direct sum over cells (i, j) of mu_ij psi_{aL_i B cL_j} (x) sigma_{aR_i cR_j}.

    Each psi is a random pure state and each sigma a random full-rank state.
    Cells that share an A-block or a C-block only saturate the v2 identity
    when their left factors are trivial and carry one common pure B state, so
    a connected group of several positive cells must have ``dim_L == 1`` on
    every block it touches; such a group is sampled with a shared B state.
    """
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (len(a_blocks), len(c_blocks)):
        raise ValueError(f"mu has shape {mu.shape}, expected {(len(a_blocks), len(c_blocks))}")
    if np.any(mu < 0) or abs(mu.sum() - 1) > 1e-12:
        raise ValueError("mu must be a joint probability distribution")
    for i, row in enumerate(mu):
        if not (row > 0).any():
            raise ValueError(f"A-block {i} carries no weight")
    for j, col in enumerate(mu.T):
        if not (col > 0).any():
            raise ValueError(f"C-block {j} carries no weight")
    comps = _components(mu > 0)
    for rs, cs in comps:
        if len(rs) * len(cs) > 1 and np.count_nonzero(mu[np.ix_(rs, cs)]) > 1:
            if any(a_blocks[i][0] != 1 for i in rs) or any(c_blocks[j][0] != 1 for j in cs):
                raise ValueError(
                    "cells sharing an A-block or C-block need one-dimensional left factors "
                    f"(component rows {rs}, columns {cs})"
                )
    rng = make_rng(seed)
    adec = _embeddings(a_blocks, "A")
    cdec = _embeddings(c_blocks, "C")
    dA, dC = adec.system_dim, cdec.system_dim
    sigma = np.zeros((dA * dim_B * dC,) * 2, dtype=np.complex128)
    for rs, cs in comps:
        shared = _pure(dim_B, rng) if np.count_nonzero(mu[np.ix_(rs, cs)]) > 1 else None
        for i in rs:
            for j in cs:
                if mu[i, j] <= 0:
                    continue
                aL, aR = a_blocks[i]
                cL, cR = c_blocks[j]
                psi = shared if shared is not None else _pure(aL * dim_B * cL, rng)
                tau = random_density(aR * cR, seed=rng)
                cell = np.kron(psi, tau)
                # (aL, B, cL, aR, cR) -> (aL, aR, B, cL, cR)
                t = cell.reshape([aL, dim_B, cL, aR, cR] * 2)
                t = t.transpose(0, 3, 1, 2, 4, 5, 8, 6, 7, 9)
                cell = t.reshape(cell.shape)
                sigma += mu[i, j] * _embed(cell, [adec.blocks[i].isometry, dim_B, cdec.blocks[j].isometry])
    state = MultipartiteState((sigma + sigma.conj().T) / 2, (dA, dim_B, dC), ("A", "B", "C"))
    return state, adec, cdec


def planted_araki_lieb(dim_L: int, dim_R: int, dim_C: int | None = None, seed=0,
                       omega_L=None, psi_RC=None) -> MultipartiteState:
    """omega_L (x) |psi><psi|_RC on (B = L (x) R, C)."""
    dim_C = dim_R if dim_C is None else int(dim_C)
    rng = make_rng(seed)
    if omega_L is None:
        omega_L = random_density(dim_L, seed=rng)
    if psi_RC is None:
        psi_RC = random_pure(dim_R * dim_C, rng)
    psi = np.asarray(psi_RC, dtype=np.complex128).ravel()
    psi = psi / np.linalg.norm(psi)
    m = np.kron(np.asarray(omega_L, dtype=np.complex128), np.outer(psi, psi.conj()))
    return MultipartiteState(m, (dim_L * dim_R, dim_C), ("B", "C"))


def planted_bi_ssa(p, a_blocks: Sequence[tuple[int, int]], b_blocks: Sequence[tuple[int, int]],
                   sectors: Mapping[tuple[int, int], int], dim_C: int, seed) -> MultipartiteState:
    """sum_ij p_ij rho_{aL_i} (x) rho_{aR_i bL_j} (x) rho_{bR_j} (x) rho_C^(k(i,j)).

    ``sectors`` maps every cell with p_ij > 0 to its sector; the map must be a
    function of i alone and of j alone on those cells.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (len(a_blocks), len(b_blocks)):
        raise ValueError(f"p has shape {p.shape}, expected {(len(a_blocks), len(b_blocks))}")
    if np.any(p < 0) or abs(p.sum() - 1) > 1e-12:
        raise ValueError("p must be a joint probability distribution")
    k_row: dict[int, int] = {}
    k_col: dict[int, int] = {}
    for i, j in zip(*np.nonzero(p > 0)):
        i, j = int(i), int(j)
        if (i, j) not in sectors:
            raise ValueError(f"cell {(i, j)} has weight but no sector")
        k = sectors[(i, j)]
        if k_row.setdefault(i, k) != k or k_col.setdefault(j, k) != k:
            raise ValueError(f"sector map is not a function of i alone and of j alone at cell {(i, j)}")
    rng = make_rng(seed)
    adec = _embeddings(a_blocks, "A")
    bdec = _embeddings(b_blocks, "B")
    rho_aL = [random_density(l, seed=rng) for l, _ in a_blocks]
    rho_bR = [random_density(r, seed=rng) for _, r in b_blocks]
    rho_C = {k: random_density(dim_C, seed=rng) for k in sorted(set(sectors.values()))}
    dA, dB = adec.system_dim, bdec.system_dim
    rho = np.zeros((dA * dB * dim_C,) * 2, dtype=np.complex128)
    for i, j in zip(*np.nonzero(p > 0)):
        mid = random_density(a_blocks[i][1] * b_blocks[j][0], seed=rng)
        cell = kron_all(rho_aL[i], mid, rho_bR[j], rho_C[sectors[(int(i), int(j))]])
        rho += p[i, j] * _embed(cell, [adec.blocks[i].isometry, bdec.blocks[j].isometry, dim_C])
    return MultipartiteState((rho + rho.conj().T) / 2, (dA, dB, dim_C), ("A", "B", "C"))


def local_unitary(d: int, seed, strength: float = 1.0) -> np.ndarray:
    """Haar unitary raised to ``strength`` on the principal branch (0 gives the identity)."""
    u = haar_unitary(d, seed)
    if strength == 1.0:
        return u
    t, z = scipy.linalg.schur(u, output="complex")
    phases = np.angle(np.diag(t))
    return (z * np.exp(1j * strength * phases)) @ z.conj().T


def scramble_local(state: MultipartiteState, which_labels: Sequence[str], seed,
                   strength: float = 1.0) -> MultipartiteState:
    """Conjugate by independent Haar unitaries on the listed subsystems."""
    rng = make_rng(seed)
    idx = {state.index(x) for x in which_labels}
    factors = [local_unitary(d, rng, strength) if k in idx else np.eye(d)
               for k, d in enumerate(state.dims)]
    u = kron_all(*factors)
    m = u @ state.matrix @ u.conj().T
    return MultipartiteState((m + m.conj().T) / 2, state.dims, state.labels)
