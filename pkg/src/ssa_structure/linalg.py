"""Dense complex linear algebra on labeled tensor-product spaces.

Matrices are plain ``numpy`` complex128 arrays. Subsystems are ordered
big-endian, so for ``dims = [dA, dB]`` the basis index is ``a * dB + b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

MAX_DIM = 4096
SUPPORT_CUTOFF = 1e-10
HERMITIAN_TOL = 1e-9
PSD_TOL = 1e-10

__all__ = [
    "MAX_DIM",
    "SUPPORT_CUTOFF",
    "SpectralDecomposition",
    "as_matrix",
    "dagger",
    "hermitize",
    "kron",
    "kron_all",
    "partial_trace",
    "permute_subsystems",
    "hermitian_eig",
    "jacobi_eig",
    "psd_roots",
    "support_projector",
    "trace_norm",
    "trace_distance",
    "hs_inner",
    "orthonormalize",
    "null_space",
]


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray  # ascending
    basis: np.ndarray  # columns are eigenvectors

    def reassemble(self) -> np.ndarray:
        return (self.basis * self.eigenvalues) @ self.basis.conj().T


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite 2-d complex array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def hermitize(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2


def kron(a, b, max_dim: int = MAX_DIM) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if max(rows, cols) > max_dim:
        raise ValueError(f"kron result {rows}x{cols} exceeds max dimension {max_dim}")
    return np.kron(a, b)


def kron_all(*mats, max_dim: int = MAX_DIM) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for m in mats:
        out = kron(out, m, max_dim=max_dim)
    return out


def _check_dims(m: np.ndarray, dims: Sequence[int]) -> None:
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got {m.shape}")
    if any(int(d) < 1 for d in dims):
        raise ValueError(f"subsystem dimensions must be positive, got {list(dims)}")
    if int(np.prod(dims)) != m.shape[0]:
        raise ValueError(f"dims {list(dims)} do not multiply to matrix size {m.shape[0]}")


def partial_trace(m, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every subsystem not in ``keep``.

    The kept subsystems appear in the order given by ``keep``, so this also
    permutes them when ``keep`` is not sorted.
    """
    m = as_matrix(m)
    dims = [int(d) for d in dims]
    _check_dims(m, dims)
    n = len(dims)
    keep = [int(k) for k in keep]
    if len(set(keep)) != len(keep) or any(k < 0 or k >= n for k in keep):
        raise ValueError(f"invalid subsystem selection {keep} for {n} subsystems")
    traced = [i for i in range(n) if i not in keep]
    t = m.reshape(dims + dims)
    row = list(range(n))
    col = list(range(n, 2 * n))
    for i in traced:
        col[i] = row[i]
    out = [row[k] for k in keep] + [col[k] for k in keep]
    r = np.einsum(t, row + col, out)
    d = int(np.prod([dims[k] for k in keep])) if keep else 1
    return r.reshape(d, d)


def permute_subsystems(m, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors: new factor ``k`` is old factor ``order[k]``."""
    if sorted(order) != list(range(len(dims))):
        raise ValueError(f"{list(order)} is not a permutation of {len(dims)} subsystems")
    return partial_trace(m, dims, order)


def jacobi_eig(h, tol: float = 1e-12, max_sweeps: int = 100) -> SpectralDecomposition:
    """Cyclic Jacobi eigensolver for a Hermitian matrix.

    Each rotation first removes the phase of the pivot with a diagonal
    unitary, then applies a real Givens rotation.
    """
    a = hermitize(as_matrix(h)).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = max(1.0, float(np.linalg.norm(a)))
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off < tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p, q]
                g = abs(b)
                if g < 1e-300:
                    continue
                phase = b / g
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2 * g)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                # columns p, q of G = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                gp = np.array([c, -s * np.conj(phase)])
                gq = np.array([s, c * np.conj(phase)])
                cols = a[:, [p, q]]
                new_p = cols @ gp
                new_q = cols @ gq
                a[:, p] = new_p
                a[:, q] = new_q
                rows = a[[p, q], :]
                a[p, :] = gp.conj() @ rows
                a[q, :] = gq.conj() @ rows
                a[p, q] = 0.0
                a[q, p] = 0.0
                vc = v[:, [p, q]]
                v[:, p] = vc @ gp
                v[:, q] = vc @ gq
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    w = np.diag(a).real
    idx = np.argsort(w, kind="stable")
    return SpectralDecomposition(w[idx], v[:, idx])


def hermitian_eig(h, method: str = "lapack") -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    The input is Hermitized by averaging with its adjoint; a deviation above
    ``HERMITIAN_TOL`` (Frobenius) is rejected.
    """
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise ValueError(f"matrix must be square, got {h.shape}")
    dev = np.linalg.norm(h - h.conj().T)
    if dev > HERMITIAN_TOL * max(1.0, np.linalg.norm(h)):
        raise ValueError(f"matrix is not Hermitian (||H - H^dag||_F = {dev:.3e})")
    if method == "jacobi":
        return jacobi_eig(h)
    if method != "lapack":
        raise ValueError(f"unknown eigensolver {method!r}")
    w, v = np.linalg.eigh(hermitize(h))
    return SpectralDecomposition(w, v)


def _support(w: np.ndarray, cutoff: float) -> np.ndarray:
    top = float(np.max(np.abs(w))) if w.size else 0.0
    return w > cutoff * max(top, 1e-300)


def psd_roots(p, cutoff: float = SUPPORT_CUTOFF) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(P**0.5, pinv(P)**0.5)`` with the pseudo-inverse taken on the support."""
    spec = hermitian_eig(p)
    w = spec.eigenvalues
    if w.size and w[0] < -PSD_TOL * max(1.0, abs(w[-1])):
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    w = np.clip(w, 0.0, None)
    on = _support(w, cutoff)
    u = spec.basis
    sq = np.sqrt(w)
    inv = np.zeros_like(w)
    inv[on] = 1.0 / sq[on]
    return (u * sq) @ u.conj().T, (u * inv) @ u.conj().T


def support_projector(p, cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    spec = hermitian_eig(p)
    u = spec.basis[:, _support(spec.eigenvalues, cutoff)]
    return u @ u.conj().T


def trace_norm(m) -> float:
    m = as_matrix(m)
    if np.allclose(m, m.conj().T, atol=1e-12):
        return float(np.sum(np.abs(np.linalg.eigvalsh(hermitize(m)))))
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def trace_distance(a, b) -> float:
    """Half the trace norm of ``a - b``."""
    return 0.5 * trace_norm(as_matrix(a) - as_matrix(b))


def hs_inner(a, b) -> complex:
    return complex(np.vdot(a, b))


def orthonormalize(mats: Sequence[np.ndarray], drop_tol: float = 1e-10,
                   basis: Sequence[np.ndarray] = ()) -> list[np.ndarray]:
    """Hilbert-Schmidt Gram-Schmidt (two passes) of ``mats`` against ``basis``.

    Returns only the new orthonormal elements; inputs whose residual norm is
    at most ``drop_tol`` are dropped.
    """
    out: list[np.ndarray] = []
    ref = list(basis)
    for m in mats:
        r = as_matrix(m).copy()
        norm0 = np.linalg.norm(r)
        if norm0 <= drop_tol:
            continue
        for _ in range(2):
            for e in ref + out:
                r -= np.vdot(e, r) * e
        nr = np.linalg.norm(r)
        if nr <= drop_tol * max(1.0, norm0):
            continue
        out.append(r / nr)
    return out


def null_space(a, threshold: float = 1e-8) -> np.ndarray:
    """Orthonormal columns spanning the right singular vectors of ``a`` with
    singular value at most ``threshold``."""
    a = as_matrix(a)
    _, s, vh = np.linalg.svd(a)
    rank = int(np.sum(s > threshold))
    return vh[rank:].conj().T
