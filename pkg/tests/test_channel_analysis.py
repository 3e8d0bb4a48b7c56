import numpy as np
import pytest

from ssa_structure.channels import (
    KrausChannel,
    complementary,
    dephasing_channel,
    identity_channel,
    unitary_channel,
)
from ssa_structure.errors import NotSaturatedError
from ssa_structure.generators import haar_unitary, random_channel, random_density
from ssa_structure.structure import (
    channel_saturation_analyze,
    coherent_saturation_check,
    holevo_saturation_analyze,
)

PLUS = np.full((2, 2), 0.5)


@pytest.mark.parametrize("seed", range(3))
def test_unitary_channel_is_rank_one_and_reversible(seed):
    u = haar_unitary(3, seed)
    rho = random_density(3, seed=seed + 1)
    r = channel_saturation_analyze(unitary_channel(u), rho)
    assert r.rank_one
    assert r.lam == pytest.approx(np.array([1.0]))
    assert np.allclose(r.M, u.conj().T)
    assert r.reconstruction_error <= 1e-9
    assert np.allclose(r.gram, complementary(unitary_channel(u), rho), atol=1e-10)


def test_scaled_identity_mixture():
    t = 0.3
    phi = KrausChannel((np.sqrt(t) * np.eye(2), np.sqrt(1 - t) * np.eye(2)))
    r = channel_saturation_analyze(phi, random_density(2, seed=4))
    assert r.rank_one
    assert r.lam == pytest.approx(np.array([np.sqrt(t), np.sqrt(1 - t)]))
    assert np.allclose(r.M, np.eye(2))
    assert r.reconstruction_error <= 1e-9
    assert r.product_identity_error <= 1e-9
    assert np.sum(np.abs(r.lam) ** 2) == pytest.approx(1.0, abs=1e-8)


def test_dephasing_plus_regression():
    # average entropy bound is met, yet the environment state is not rank one
    r = channel_saturation_analyze(dephasing_channel(2), PLUS)
    assert abs(r.average_entropy.gap_bits) <= 1e-9
    assert np.allclose(r.gram, np.eye(2) / 2)
    assert not r.rank_one
    assert r.lam is None and r.M is None
    assert r.product_identity_error == pytest.approx(1.5, abs=1e-12)


def test_lambda_gauge_makes_largest_entry_real():
    u = np.exp(0.7j) * haar_unitary(2, 5)
    r = channel_saturation_analyze(unitary_channel(u), np.diag([1.0, 0.0]))
    assert r.lam[0].imag == 0 and r.lam[0].real > 0
    t = 0.8
    phi = KrausChannel((np.sqrt(t) * np.eye(2), -1j * np.sqrt(1 - t) * np.eye(2)))
    r = channel_saturation_analyze(phi, random_density(2, seed=3))
    assert r.lam[0] == pytest.approx(np.sqrt(t))
    assert r.lam[1] == pytest.approx(-1j * np.sqrt(1 - t))


@pytest.mark.parametrize("p", [0.1, 0.3, 0.5])
def test_holevo_dephasing_sectors(p):
    r = holevo_saturation_analyze(dephasing_channel(2), np.diag([p, 1 - p]))
    assert abs(r.gap.gap_bits) <= 1e-9
    assert [(b.dim_L, b.dim_R) for b in r.output_blocks] == [(1, 1), (1, 1)]
    assert sorted(b.weight for b in r.output_blocks) == pytest.approx(sorted([p, 1 - p]))
    assert r.output_error <= 1e-7


def test_holevo_unitary_single_block():
    u = haar_unitary(2, 3)
    r = holevo_saturation_analyze(unitary_channel(u), random_density(2, seed=1))
    assert len(r.output_blocks) == 1
    assert r.output_blocks[0].weight == pytest.approx(1.0)


def test_holevo_random_channel_not_saturated():
    with pytest.raises(NotSaturatedError) as exc:
        holevo_saturation_analyze(random_channel(2, 2, 3, seed=1), random_density(2, seed=1))
    assert exc.value.gap_bits > 0


def test_coherent_identity_cases():
    r = coherent_saturation_check(identity_channel(2), np.eye(2) / 2, (2, 1, np.eye(2)))
    assert r.saturated and r.product_ok
    rho = np.kron(random_density(2, seed=1), random_density(2, seed=2))
    r = coherent_saturation_check(identity_channel(4), rho, (2, 2, np.eye(4)))
    assert r.saturated and r.product_ok


def test_coherent_entangled_output_fails_product_check():
    v = np.array([1, 0, 0, 1]) / np.sqrt(2)
    rho = 0.5 * np.outer(v, v) + 0.5 * np.eye(4) / 4
    r = coherent_saturation_check(identity_channel(4), rho, (2, 2, np.eye(4)))
    assert r.saturated and not r.product_ok


def test_coherent_dephasing():
    # pure input: I_c = 0 = S(rho), saturated
    r = coherent_saturation_check(dephasing_channel(2), PLUS)
    assert r.coherent_information == pytest.approx(0.0, abs=1e-12) and r.saturated
    # maximally mixed input: I_c = 0 < 1 = S(rho)
    r = coherent_saturation_check(dephasing_channel(2), np.eye(2) / 2)
    assert r.coherent_information == pytest.approx(0.0, abs=1e-12)
    assert r.gap_bits == pytest.approx(1.0) and not r.saturated


def test_coherent_rejects_bad_proposal():
    with pytest.raises(ValueError):
        coherent_saturation_check(identity_channel(4), np.eye(4) / 4, (2, 2, np.eye(4)[:, :3]))
