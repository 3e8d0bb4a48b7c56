import numpy as np
import pytest

from ssa_structure.errors import NotSaturatedError
from ssa_structure.generators import planted_araki_lieb, random_pure, scramble_local
from ssa_structure.states import MultipartiteState, araki_lieb_gap
from ssa_structure.structure import araki_lieb_decompose


def test_pure_state_has_trivial_left_factor():
    s = MultipartiteState.from_ket(random_pure(6, 1), (3, 2), ("B", "C"))
    r = araki_lieb_decompose(s)
    assert (r.dim_L, r.dim_R) == (1, 2)
    assert np.allclose(r.omega_L, [[1.0]])


def test_maximally_mixed_left_with_bell():
    bell = np.eye(2).ravel() / np.sqrt(2)
    s = planted_araki_lieb(2, 2, omega_L=np.eye(2) / 2, psi_RC=bell)
    assert abs(araki_lieb_gap(s).gap_bits) < 1e-12
    r = araki_lieb_decompose(scramble_local(s, ["B"], 3))
    assert (r.dim_L, r.dim_R) == (2, 2)
    assert r.reassembly_error <= 1e-7
    assert np.allclose(np.diag(r.omega_L), [0.5, 0.5])


@pytest.mark.parametrize("dims", [(1, 2, 2), (2, 2, 3), (3, 2, 2), (2, 3, 3), (2, 1, 1)])
@pytest.mark.parametrize("seed", range(4))
def test_round_trip(dims, seed):
    s = planted_araki_lieb(*dims, seed=seed)
    assert abs(araki_lieb_gap(s).gap_bits) <= 1e-9
    r = araki_lieb_decompose(scramble_local(s, ["B", "C"], seed + 10))
    assert (r.dim_L, r.dim_R) == (dims[0], min(dims[1], dims[2]))
    assert r.reassembly_error <= 1e-7
    assert r.purity >= 1 - 1e-7


def test_mixed_product_not_saturated():
    s = MultipartiteState(np.kron(np.eye(2) / 2, np.diag([0.3, 0.7])), (2, 2), ("B", "C"))
    with pytest.raises(NotSaturatedError):
        araki_lieb_decompose(s)


def test_degenerate_c_spectrum():
    # maximally entangled RC gives a fully degenerate omega_C
    psi = np.eye(3).ravel() / np.sqrt(3)
    s = planted_araki_lieb(2, 3, omega_L=np.diag([0.25, 0.75]), psi_RC=psi)
    r = araki_lieb_decompose(scramble_local(s, ["B"], 1))
    assert (r.dim_L, r.dim_R) == (2, 3)
    assert r.reassembly_error <= 1e-7
