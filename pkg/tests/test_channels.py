import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ssa_structure.channels import (
    Ensemble,
    KrausChannel,
    apply,
    average_entropy_report,
    coherent_information,
    complementary,
    compose,
    dephasing_channel,
    depolarizing_channel,
    exchange_bound_report,
    holevo,
    identity_channel,
    induced_ensemble,
    omega_state,
    stinespring_isometry,
    tensor,
    unitary_channel,
)
from ssa_structure.generators import haar_unitary, random_channel, random_density
from ssa_structure.states import von_neumann_entropy


def binary_entropy(p):
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))


def test_kraus_completeness_enforced():
    with pytest.raises(ValueError):
        KrausChannel((np.eye(2) * 0.9,))
    with pytest.raises(ValueError):
        KrausChannel((np.eye(2), np.eye(3)))
    with pytest.raises(ValueError):
        KrausChannel(())


def test_apply_and_dimension_checks():
    u = haar_unitary(3, 1)
    rho = random_density(3, seed=2)
    assert np.allclose(apply(unitary_channel(u), rho), u @ rho @ u.conj().T)
    with pytest.raises(ValueError):
        apply(identity_channel(2), rho)


def test_complementary_entries():
    phi = random_channel(2, 3, 3, seed=5)
    rho = random_density(2, seed=6)
    g = complementary(phi, rho)
    for m, km in enumerate(phi.kraus):
        for n, kn in enumerate(phi.kraus):
            assert g[m, n] == pytest.approx(np.trace(km @ rho @ kn.conj().T), abs=1e-14)


def test_induced_ensemble_drops_null_branches():
    ens = induced_ensemble(dephasing_channel(2), np.diag([1.0, 0.0]))
    assert ens.weights == (1.0,)
    with pytest.raises(ValueError):
        Ensemble((0.5, 0.4), (np.eye(2) / 2, np.eye(2) / 2))


@pytest.mark.parametrize("t", [0.1, 0.3, 0.5])
def test_holevo_analytic_phase_flip_mixture(t):
    # Kraus {sqrt(t) I, sqrt(1-t) Z} on |+>: ensemble {|+>, |->} with weights (t, 1-t)
    phi = KrausChannel((np.sqrt(t) * np.eye(2), np.sqrt(1 - t) * np.diag([1.0, -1.0])))
    plus = np.full((2, 2), 0.5)
    chi = holevo(induced_ensemble(phi, plus))
    assert chi == pytest.approx(binary_entropy(t), abs=1e-12)
    rep = exchange_bound_report(phi, plus)
    assert rep.saturated and rep.rhs_bits == pytest.approx(binary_entropy(t), abs=1e-12)


def test_depolarizing_on_pure_state():
    rep = exchange_bound_report(depolarizing_channel(), np.diag([1.0, 0.0]))
    assert rep.lhs_bits == pytest.approx(1.0, abs=1e-12)
    assert rep.rhs_bits == pytest.approx(1.0, abs=1e-12)


def _pair(seed):
    rng = np.random.default_rng(seed)
    d_in, d_out, n = (int(x) for x in rng.integers(1, 4, size=3))
    while n * d_out < d_in:
        n += 1
    return random_channel(d_in, d_out, n, seed=seed), random_density(d_in, rank=int(rng.integers(1, d_in + 1)), seed=seed)


@given(seed=st.integers(0, 2**32))
def test_exchange_and_average_entropy_bounds(seed):
    phi, rho = _pair(seed)
    assert exchange_bound_report(phi, rho).gap_bits >= -1e-8
    rep = average_entropy_report(phi, rho)
    assert rep.gap_bits >= -1e-8
    assert rep.details["omega_identity_residual"] <= 1e-8


@given(seed=st.integers(0, 2**32))
def test_environment_spectrum_matches_omega_bc(seed):
    phi, rho = _pair(seed)
    g = np.linalg.eigvalsh(complementary(phi, rho))
    w = np.linalg.eigvalsh(omega_state(phi, rho).state.marginal("B", "C").matrix)
    w = w[w > 1e-12]
    g = g[g > 1e-12]
    assert np.allclose(np.sort(g), np.sort(w), atol=1e-9)


@given(seed=st.integers(0, 2**32))
def test_omega_is_symmetric_in_b_and_c(seed):
    phi, rho = _pair(seed)
    om = omega_state(phi, rho)
    assert om.bc_swap_error() < 1e-12
    v = stinespring_isometry(phi)
    assert np.allclose(v.conj().T @ v, np.eye(phi.dim_in), atol=1e-12)
    assert np.allclose(om.state.marginal("A").matrix, apply(phi, rho), atol=1e-12)


@given(seed=st.integers(0, 2**32))
def test_coherent_information_bounded_by_input_entropy(seed):
    phi, rho = _pair(seed)
    ci = coherent_information(phi, rho)
    assert ci.value <= ci.input_entropy + 1e-8


def test_coherent_information_identity_and_pure_inputs():
    ci = coherent_information(identity_channel(2), np.eye(2) / 2)
    assert ci.saturated and ci.value == pytest.approx(1.0)
    # a pure input always gives I_c = 0 = S(rho)
    ci = coherent_information(dephasing_channel(2), np.full((2, 2), 0.5))
    assert ci.value == pytest.approx(0.0, abs=1e-12) and ci.saturated


def test_compose_and_tensor():
    a = random_channel(2, 2, 2, seed=1)
    b = random_channel(2, 3, 2, seed=2)
    rho = random_density(2, seed=3)
    assert np.allclose(apply(compose(b, a), rho), apply(b, apply(a, rho)))
    r2 = random_density(2, seed=4)
    assert np.allclose(apply(tensor(a, b), np.kron(rho, r2)), np.kron(apply(a, rho), apply(b, r2)))
    with pytest.raises(ValueError):
        compose(a, b)


def test_depolarizing_output_is_maximally_mixed():
    rho = random_density(2, seed=8)
    assert np.allclose(apply(depolarizing_channel(), rho), np.eye(2) / 2)
    assert von_neumann_entropy(apply(depolarizing_channel(), rho)) == pytest.approx(1.0)


def test_holevo_small_ensembles():
    plus = np.full((2, 2), 0.5)
    zero = np.diag([1.0, 0.0])
    assert holevo(Ensemble((1.0,), (plus,))) == pytest.approx(0.0, abs=1e-12)
    assert holevo(Ensemble((0.5, 0.5), (zero, np.diag([0.0, 1.0])))) == pytest.approx(1.0, abs=1e-12)
    lam = np.array([1 + 1 / np.sqrt(2), 1 - 1 / np.sqrt(2)]) / 2
    want = float(-(lam * np.log2(lam)).sum())
    assert holevo(Ensemble((0.5, 0.5), (zero, plus))) == pytest.approx(want, abs=1e-12)
    assert want == pytest.approx(0.6009, abs=1e-4)


def test_depolarizing_coherent_information_on_maximally_mixed():
    ci = coherent_information(depolarizing_channel(), np.eye(2) / 2)
    assert ci.value == pytest.approx(-1.0, abs=1e-10) and not ci.saturated
    rho = random_density(3, seed=4)
    ci = coherent_information(identity_channel(3), rho)
    assert ci.value == pytest.approx(von_neumann_entropy(rho), abs=1e-10) and ci.saturated


def test_omega_of_dephasing_on_diagonal_state():
    p = 0.3
    om = omega_state(dephasing_channel(2), np.diag([p, 1 - p])).state.matrix
    want = np.zeros((8, 8))
    want[0, 0], want[7, 7] = p, 1 - p
    assert np.allclose(om, want)


def test_complementary_small_cases():
    u = haar_unitary(2, 5)
    assert np.allclose(complementary(unitary_channel(u), random_density(2, seed=5)), [[1.0]])
    assert np.allclose(complementary(dephasing_channel(2), np.diag([0.3, 0.7])), np.diag([0.3, 0.7]))
