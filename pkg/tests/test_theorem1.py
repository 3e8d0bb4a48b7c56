import numpy as np
import pytest

from helpers import theorem1_spec
from ssa_structure.errors import NotSaturatedError, RefinementExhaustedError
from ssa_structure.generators import planted_theorem1, random_pure, random_state, scramble_local
from ssa_structure.states import MultipartiteState, ghz, ssa_gap_v2
from ssa_structure.structure import theorem1_decompose


def test_ghz_single_cell():
    r = theorem1_decompose(ghz(3))
    assert r.a_dims() == [(2, 1)] and r.c_dims() == [(2, 1)]
    assert r.joint_weights == pytest.approx(np.array([[1.0]]))
    psi = r.pure_blocks[(0, 0)]
    assert np.linalg.eigvalsh(psi)[-1] == pytest.approx(1.0)
    # psi is GHZ up to the local gauge on A and C: same spectrum on every cut
    g = MultipartiteState(psi, (2, 2, 2), "ABC", validate=False)
    for sub in ("A", "B", "C"):
        assert g.entropy(sub) == pytest.approx(1.0, abs=1e-9)


def test_pure_tripartite_state_is_one_pure_block():
    s = MultipartiteState.from_ket(random_pure(12, 3), (2, 3, 2), "ABC")
    r = theorem1_decompose(s)
    assert r.a_dims() == [(2, 1)] and r.c_dims() == [(2, 1)]
    assert r.min_purity >= 1 - 1e-7


def test_single_product_cell_recovered():
    st, adec, cdec = planted_theorem1(np.array([[1.0]]), [(2, 2)], [(1, 3)], 2, seed=4)
    r = theorem1_decompose(scramble_local(st, ["A", "C"], seed=5))
    assert r.a_dims() == [(2, 2)] and r.c_dims() == [(1, 3)]
    assert r.reassembly_error <= 1e-7


def test_two_by_two_planted_example():
    mu = np.diag([0.6, 0.4])
    st, adec, cdec = planted_theorem1(mu, [(2, 2), (1, 2)], [(1, 2), (2, 1)], 2, seed=0)
    r = theorem1_decompose(scramble_local(st, ["A", "C"], seed=1))
    assert r.a_dims() == [(2, 2), (1, 2)]
    assert r.c_dims() == [(1, 2), (2, 1)]
    assert np.allclose(r.joint_weights, mu, atol=1e-9)
    assert r.reassembly_error <= 1e-7
    assert abs(r.joint_weights.sum() - 1) <= 1e-9


def test_classical_mixture_cells_saturate():
    mu = np.array([[0.2, 0.3], [0.4, 0.1]])
    st, _, _ = planted_theorem1(mu, [(1, 2), (1, 1)], [(1, 1), (1, 2)], 2, seed=9)
    assert abs(ssa_gap_v2(st).gap_bits) <= 1e-9
    # structure is valid even though the planted split is not identifiable here
    r = theorem1_decompose(st)
    assert r.reassembly_error <= 1e-7


def test_shared_blocks_need_trivial_left_factors():
    with pytest.raises(ValueError):
        planted_theorem1(np.array([[0.5, 0.5]]), [(2, 1)], [(1, 1), (1, 1)], 1, seed=0)


@pytest.mark.parametrize("seed", range(20))
def test_round_trip_on_random_specs(seed):
    mu, ab, cb, db = theorem1_spec(seed)
    st, _, _ = planted_theorem1(mu, ab, cb, db, seed)
    assert abs(ssa_gap_v2(st).gap_bits) <= 1e-9
    r = theorem1_decompose(scramble_local(st, ["A", "C"], seed + 500))
    assert sorted(r.a_dims()) == sorted(ab)
    assert sorted(r.c_dims()) == sorted(cb)
    assert np.allclose(sorted(r.joint_weights[r.joint_weights > 0]), sorted(mu[mu > 0]), atol=1e-9)
    assert r.min_purity >= 1 - 1e-7
    assert r.reassembly_error <= 1e-7


def test_not_saturated_rejected():
    with pytest.raises(NotSaturatedError):
        theorem1_decompose(random_state((2, 2, 2), seed=3))


def test_refinement_exhausted_carries_worst_eigenvalue():
    err = RefinementExhaustedError(0.75, 3)
    assert err.worst_eigenvalue == 0.75 and "0.75" in str(err)
