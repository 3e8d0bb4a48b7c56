import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import sequential_partial_trace
from ssa_structure.generators import haar_unitary, random_density
from ssa_structure.linalg import (
    hermitian_eig,
    jacobi_eig,
    kron,
    kron_all,
    null_space,
    orthonormalize,
    partial_trace,
    permute_subsystems,
    psd_roots,
    support_projector,
    trace_distance,
    trace_norm,
)

dims_strategy = st.lists(st.integers(1, 3), min_size=1, max_size=4)


@given(dims=dims_strategy, seed=st.integers(0, 2**32), data=st.data())
def test_partial_trace_matches_sequential_oracle(dims, seed, data):
    m = random_density(int(np.prod(dims)), seed=seed)
    keep = data.draw(st.permutations(range(len(dims))).map(lambda p: p[: data.draw(st.integers(0, len(dims)))]))
    got = partial_trace(m, dims, keep)
    assert np.allclose(got, sequential_partial_trace(m, dims, list(keep)), atol=1e-13)


@given(dims=dims_strategy, seed=st.integers(0, 2**32))
def test_partial_trace_preserves_trace_and_positivity(dims, seed):
    m = random_density(int(np.prod(dims)), seed=seed)
    for k in range(len(dims)):
        r = partial_trace(m, dims, [k])
        assert abs(np.trace(r) - 1) < 1e-12
        assert np.linalg.eigvalsh(r)[0] > -1e-12


def test_partial_trace_of_product_returns_factor():
    a, b, c = (random_density(d, seed=s) for d, s in ((2, 1), (3, 2), (2, 3)))
    m = kron_all(a, b, c)
    assert np.allclose(partial_trace(m, [2, 3, 2], [1]), b)
    assert np.allclose(partial_trace(m, [2, 3, 2], [2, 0]), np.kron(c, a))


def test_partial_trace_rejects_bad_dims():
    with pytest.raises(ValueError):
        partial_trace(np.eye(6), [2, 2], [0])
    with pytest.raises(ValueError):
        partial_trace(np.eye(4), [2, 2], [0, 0])


def test_permute_subsystems_swaps_kron_factors():
    a, b = random_density(2, seed=1), random_density(3, seed=2)
    assert np.allclose(permute_subsystems(np.kron(a, b), [2, 3], [1, 0]), np.kron(b, a))
    with pytest.raises(ValueError):
        permute_subsystems(np.eye(6), [2, 3], [0, 0])


def test_kron_dimension_guard():
    with pytest.raises(ValueError):
        kron(np.eye(64), np.eye(65))
    assert kron(np.eye(2), np.eye(3)).shape == (6, 6)


@given(n=st.integers(1, 7), seed=st.integers(0, 2**32))
def test_jacobi_agrees_with_lapack(n, seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = g + g.conj().T
    jac = jacobi_eig(h)
    lap = hermitian_eig(h)
    assert np.allclose(jac.eigenvalues, lap.eigenvalues, atol=1e-10)
    assert np.allclose(jac.reassemble(), h, atol=1e-10)
    assert np.allclose(jac.basis.conj().T @ jac.basis, np.eye(n), atol=1e-10)


def test_jacobi_degenerate_spectrum():
    u = haar_unitary(4, 5)
    h = u @ np.diag([1.0, 1.0, 2.0, 2.0]) @ u.conj().T
    spec = jacobi_eig(h)
    assert np.allclose(spec.eigenvalues, [1, 1, 2, 2], atol=1e-12)
    assert np.allclose(spec.reassemble(), h, atol=1e-12)


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(ValueError):
        hermitian_eig(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        hermitian_eig(np.eye(2), method="qr")


def test_psd_roots_on_support():
    u = haar_unitary(3, 9)
    p = u @ np.diag([0.0, 0.25, 0.75]) @ u.conj().T
    sq, inv = psd_roots(p)
    assert np.allclose(sq @ sq, p, atol=1e-12)
    assert np.allclose(sq @ inv, support_projector(p), atol=1e-10)
    with pytest.raises(ValueError):
        psd_roots(np.diag([1.0, -0.5]))


def test_trace_norm_values():
    assert trace_norm(np.diag([1.0, -2.0, 0.5])) == pytest.approx(3.5)
    # non-Hermitian: sum of singular values
    assert trace_norm(np.array([[0, 2], [0, 0]])) == pytest.approx(2.0)
    a = np.diag([1.0, 0.0])
    b = np.diag([0.0, 1.0])
    assert trace_distance(a, b) == pytest.approx(1.0)


def test_orthonormalize_drops_dependent_and_respects_basis():
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    z = np.diag([1.0, -1.0]).astype(complex)
    out = orthonormalize([x, 2 * x, z])
    assert len(out) == 2
    gram = np.array([[np.vdot(a, b) for b in out] for a in out])
    assert np.allclose(gram, np.eye(2))
    assert orthonormalize([x + z], basis=out) == []


def test_null_space_absolute_threshold():
    a = np.diag([1.0, 1e-9, 0.0])
    ns = null_space(a, threshold=1e-8)
    assert ns.shape == (3, 2)
    assert np.allclose(a @ ns, 0, atol=1e-8)


def test_kron_small_cases_and_rank():
    assert np.allclose(kron(np.eye(2), np.eye(2)), np.eye(4))
    assert np.allclose(kron(np.diag([1, 2]), np.diag([3, 4])), np.diag([3, 4, 6, 8]))
    rng = np.random.default_rng(3)
    a = rng.standard_normal((3, 2)) @ rng.standard_normal((2, 3))
    b = rng.standard_normal((2, 2))
    ranks = [int(np.sum(np.linalg.svd(m, compute_uv=False) > 1e-10)) for m in (a, b, kron(a, b))]
    assert ranks == [2, 2, 4]


@given(seed=st.integers(0, 2**32))
def test_kron_associative(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) for n in (2, 3, 2))
    assert np.allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=1e-12)


def test_bell_marginal_is_maximally_mixed():
    v = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert np.allclose(partial_trace(np.outer(v, v), [2, 2], [0]), np.eye(2) / 2)


def test_eigen_small_cases():
    x = np.array([[0, 1], [1, 0]])
    assert np.allclose(hermitian_eig(x).eigenvalues, [-1, 1])
    spec = hermitian_eig(np.diag([0.2, 0.8]))
    assert np.allclose(spec.eigenvalues, [0.2, 0.8])
    assert np.allclose(np.abs(spec.basis), np.eye(2))


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_eigen_reassembly_and_trace_12x12(method):
    rng = np.random.default_rng(12)
    g = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
    h = g + g.conj().T
    spec = hermitian_eig(h, method=method)
    assert np.linalg.norm(spec.reassemble() - h) <= 1e-10 * max(1.0, np.linalg.norm(h))
    assert np.linalg.norm(spec.basis.conj().T @ spec.basis - np.eye(12)) <= 1e-10
    assert spec.eigenvalues.sum() == pytest.approx(np.trace(h).real, abs=1e-9)
    assert np.all(np.diff(spec.eigenvalues) >= 0)


def test_psd_roots_simple_cases():
    sq, inv = psd_roots(np.eye(3))
    assert np.allclose(sq, np.eye(3)) and np.allclose(inv, np.eye(3))
    sq, inv = psd_roots(np.diag([4.0, 0.0]))
    assert np.allclose(sq, np.diag([2.0, 0.0])) and np.allclose(inv, np.diag([0.5, 0.0]))
