import numpy as np
import pytest
import scipy.sparse as sp

from decobec import model, oracle
from decobec.errors import AccuracyError, InvalidArgumentError, ResourceError


@pytest.fixture
def two_modes():
    return model.explicit_grid([1.0, -0.5], [0.2, 0.1 - 0.05j])


def test_basis_indexing_and_sectors():
    trunc = oracle.TruncationSpec(2, 3, 2)
    ham = oracle.build_hamiltonian_single(model.explicit_grid([1.0, 2.0], [0.1, 0.1]), 0.0, 0.0, trunc)
    basis = ham.basis
    assert basis.dim == 3 * 16
    assert basis.index((1,), (2, 3)) == 16 + 2 * 4 + 3
    assert basis.sectors() == {0: slice(0, 16), 1: slice(16, 32), 2: slice(32, 48)}
    with pytest.raises(InvalidArgumentError):
        basis.index((0,), (4, 0))


def test_double_basis_sectors_are_contiguous():
    trunc = oracle.TruncationSpec(3, 2, 1)
    ham = oracle.build_hamiltonian_double(model.explicit_grid([1.0], [0.0], tunnel_coupling=[0.1]),
                                          1.0, 0.2, trunc)
    f = 3
    sectors = ham.basis.sectors()
    assert [sectors[n].stop - sectors[n].start for n in range(4)] == [f * (n + 1) for n in range(4)]


def test_cap_is_enforced(two_modes):
    with pytest.raises(ResourceError):
        oracle.build_hamiltonian_single(two_modes, 1.0, 0.0, oracle.TruncationSpec(2, 30, 2, cap=1000))


def test_mode_count_must_match(two_modes):
    with pytest.raises(InvalidArgumentError):
        oracle.build_hamiltonian_single(two_modes, 1.0, 0.0, oracle.TruncationSpec(2, 3, 1))


@pytest.mark.parametrize("double", [False, True])
def test_hamiltonian_hermitian_and_conserves_atoms(double):
    grid = model.explicit_grid([1.0, 0.3], [0.2j, 0.1], tunnel_coupling=[0.05, 0.1j] if double else None)
    trunc = oracle.TruncationSpec(2, 3, 2)
    if double:
        ham = oracle.build_hamiltonian_double(grid, 0.5, 0.2, trunc)
    else:
        ham = oracle.build_hamiltonian_single(grid, 0.5, 0.3, trunc)
    h = ham.matrix
    assert abs(h - h.conj().T).max() < 1e-15
    assert abs(h @ ham.number_operator - ham.number_operator @ h).max() < 1e-13


def test_population_operator_spectrum():
    trunc = oracle.TruncationSpec(3, 1, 1)
    ham = oracle.build_hamiltonian_double(model.explicit_grid([1.0], [0.0], tunnel_coupling=[0.0]),
                                          0.0, 0.1, trunc)
    pop = oracle.population_operator(ham.basis)
    block = ham.basis.sectors()[3]
    values = np.unique(np.round(pop[block, block].diagonal().real))
    assert values.tolist() == [-3, -1, 1, 3]


def test_expm_and_ode_agree(two_modes):
    trunc = oracle.TruncationSpec(2, 8, 2)
    ham = oracle.build_hamiltonian_single(two_modes, 1.0, 0.2, trunc)
    psi0 = oracle.product_state(ham.basis, {(0,): 0.6, (2,): 0.8})
    a = oracle.evolve(ham, psi0, 3.0, method="expm")
    b = oracle.evolve(ham, psi0, 3.0, method="ode")
    assert np.max(np.abs(a.amplitudes - b.amplitudes)) < 1e-8
    both = oracle.evolve(ham, psi0, 3.0, method="both")
    assert both.norm() == pytest.approx(1.0, abs=1e-12)
    by_sector = oracle.evolve_by_sector(ham, psi0, 3.0)
    assert np.max(np.abs(by_sector.amplitudes - a.amplitudes)) < 1e-12
    assert oracle.evolve(ham, psi0, 0.0).amplitudes is not psi0.amplitudes


def test_evolve_rejects_bad_input(two_modes):
    ham = oracle.build_hamiltonian_single(two_modes, 1.0, 0.2, oracle.TruncationSpec(1, 2, 2))
    with pytest.raises(InvalidArgumentError):
        oracle.evolve(ham, np.zeros(3), 1.0)
    with pytest.raises(InvalidArgumentError):
        oracle.evolve(ham, np.eye(ham.basis.dim)[0], 1.0, method="rk4")


def test_norm_drift_is_detected():
    # a non-Hermitian generator loses norm
    h = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, -1j]]))
    with pytest.raises(AccuracyError):
        oracle.evolve(h, np.array([1.0, 1.0]) / np.sqrt(2), 1.0)


def test_partial_trace_of_product_state(two_modes):
    ham = oracle.build_hamiltonian_single(two_modes, 1.0, 0.0, oracle.TruncationSpec(2, 2, 2))
    psi = oracle.product_state(ham.basis, {(0,): 0.6, (1,): 0.8j})
    rho = oracle.partial_trace_field(psi)
    assert np.allclose(rho, [[0.36, -0.48j, 0], [0.48j, 0.64, 0], [0, 0, 0]])
    assert oracle.overlap(psi, psi) == pytest.approx(1.0)


def test_truncation_gate():
    grid = model.explicit_grid([1.0], [0.3])
    t = 4.0

    def observable(trunc):
        return oracle.single_well_mean_field(grid, 2, t, trunc)

    ok, change = oracle.truncation_converged(observable, oracle.TruncationSpec(2, 20, 1))
    assert ok and change < 1e-7
    ok, change = oracle.truncation_converged(observable, oracle.TruncationSpec(2, 2, 1))
    assert not ok


def test_truncation_spec_validation():
    with pytest.raises(InvalidArgumentError):
        oracle.TruncationSpec(0, 3, 1)
    assert oracle.TruncationSpec(2, 3, 2).doubled().max_photons_per_mode == 6
