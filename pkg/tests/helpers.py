"""Planted-spec samplers and brute-force oracles shared by the test modules."""

import numpy as np

from ssa_structure.generators import BlockSpec, random_weights


def markov_spec(seed: int) -> BlockSpec:
    """Random identifiable Markov spec: A and C at least 2-dimensional, B at most 6."""
    rng = np.random.default_rng(seed)
    while True:
        k = int(rng.integers(1, 4))
        shapes = [tuple(int(x) for x in rng.integers(1, 3, size=2)) for _ in range(k)]
        da, dc = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        db = sum(l * r for l, r in shapes)
        if db <= 6 and da * db * dc <= 216:
            w = random_weights(k, seed)
            return BlockSpec(tuple((l, r, x) for (l, r), x in zip(shapes, w)), da, dc)


def theorem1_spec(seed: int):
    """Random matched Eq.-6-type spec (mu supported on a permutation).

    Left factors obey aL <= dim_B * cL and cL <= aL * dim_B so the sampled pure
    blocks have full-rank marginals and the planted blocks are identifiable.
    """
    rng = np.random.default_rng(seed)
    while True:
        k = int(rng.integers(1, 4))
        db = int(rng.integers(1, 3))
        cells = []
        for _ in range(k):
            aL, aR, cL, cR = (int(x) for x in rng.integers(1, 3, size=4))
            if aL <= db * cL and cL <= aL * db:
                cells.append(((aL, aR), (cL, cR)))
        if not cells:
            continue
        da = sum(l * r for (l, r), _ in cells)
        dc = sum(l * r for _, (l, r) in cells)
        if da > 6 or dc > 6 or da * db * dc > 216:
            continue
        n = len(cells)
        perm = rng.permutation(n)
        a_blocks = [a for a, _ in cells]
        c_blocks = [None] * n
        for i, p in enumerate(perm):
            c_blocks[p] = cells[i][1]
        mu = np.zeros((n, n))
        mu[np.arange(n), perm] = random_weights(n, seed)
        return mu, a_blocks, c_blocks, db


def sequential_partial_trace(m: np.ndarray, dims, keep):
    """Trace out subsystems one at a time with explicit loops (reference oracle)."""
    dims = list(dims)
    labels = list(range(len(dims)))
    for k in sorted(set(range(len(dims))) - set(keep), reverse=True):
        before = int(np.prod(dims[:k]))
        d = dims[k]
        after = int(np.prod(dims[k + 1:]))
        t = m.reshape(before, d, after, before, d, after)
        out = np.zeros((before, after, before, after), dtype=m.dtype)
        for i in range(d):
            out += t[:, i, :, :, i, :]
        m = out.reshape(before * after, before * after)
        del dims[k]
        del labels[k]
    # reorder remaining subsystems into the requested order
    order = [labels.index(k) for k in keep]
    n = len(dims)
    t = m.reshape(dims + dims)
    t = t.transpose(order + [n + o for o in order])
    d = int(np.prod(dims))
    return t.reshape(d, d)


def entropy_oracle(rho: np.ndarray) -> float:
    """Entropy in bits through the Jacobi eigensolver rather than LAPACK."""
    from ssa_structure.linalg import jacobi_eig

    w = jacobi_eig(rho).eigenvalues
    w = w[w > 1e-12]
    return float(-(w * np.log2(w)).sum())
