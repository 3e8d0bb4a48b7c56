import numpy as np
import pytest

from ssa_structure.errors import NotSaturatedError
from ssa_structure.generators import planted_bi_ssa, random_density, scramble_local
from ssa_structure.states import MultipartiteState, ghz, ssa_gap_v1
from ssa_structure.structure import bi_ssa_report


def test_product_ab_c_single_sector():
    s = MultipartiteState(np.kron(random_density(4, seed=1), random_density(2, seed=2)), (2, 2, 2), "ABC")
    r = bi_ssa_report(s)
    assert r.n_sectors == 1 and r.reassembly_error <= 1e-7


def test_ghz_rejected():
    with pytest.raises(NotSaturatedError):
        bi_ssa_report(ghz(3))


def test_single_cell_is_full_product():
    s = planted_bi_ssa(np.array([[1.0]]), [(1, 2)], [(2, 1)], {(0, 0): 0}, 2, seed=3)
    r = bi_ssa_report(s)
    assert r.n_sectors == 1


@pytest.mark.parametrize("seed", range(5))
def test_two_sectors_recovered(seed):
    p = np.array([[0.35, 0.0], [0.0, 0.65]])
    s = planted_bi_ssa(p, [(1, 2), (2, 1)], [(2, 1), (1, 2)], {(0, 0): 0, (1, 1): 1}, 2, seed)
    for order in (("A", "B", "C"), ("B", "A", "C")):
        assert abs(ssa_gap_v1(s.reorder(*order)).gap_bits) <= 1e-9
    r = bi_ssa_report(scramble_local(s, ["A", "B"], seed + 1))
    assert r.n_sectors == 2
    assert np.allclose(sorted(r.sector_weights), [0.35, 0.65], atol=1e-9)
    assert r.reassembly_error <= 1e-7 and r.consistency_error <= 1e-7


def test_sector_depending_on_i_only():
    # k = k1(i): two A-blocks, one B-block shared by both
    p = np.array([[0.4], [0.6]])
    s = planted_bi_ssa(p, [(1, 1), (1, 2)], [(2, 1)], {(0, 0): 0, (1, 0): 0}, 2, seed=5)
    r = bi_ssa_report(scramble_local(s, ["A"], 6))
    assert r.n_sectors == 1
    assert r.reassembly_error <= 1e-7


def test_inconsistent_sector_map_rejected():
    p = np.array([[0.5, 0.5]])
    with pytest.raises(ValueError):
        planted_bi_ssa(p, [(1, 1)], [(1, 1), (1, 1)], {(0, 0): 0, (0, 1): 1}, 2, seed=0)
