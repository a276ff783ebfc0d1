import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from decobec import doublewell as dw
from decobec import model, oracle
from decobec.errors import InvalidArgumentError


def tunnel_grid(zeta=0.1, mu=0.0, omega=1.0):
    return model.explicit_grid([omega], [mu], tunnel_coupling=[zeta])


@given(st.integers(0, 60), st.floats(-3, 3), st.floats(0, 100))
def test_f_amplitudes_normalised(n, delta, t):
    total = sum(abs(dw.amplitude_f(n, m, delta, t)) ** 2 for m in range(n + 1))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_f_rejects_bad_indices():
    with pytest.raises(InvalidArgumentError):
        dw.amplitude_f(3, 4, 0.1, 0.0)


@given(st.floats(0.1, 4.0))
def test_poisson_weights(alpha):
    w = dw.poisson_weights(alpha, 1e-12)
    assert abs(1.0 - w.sum()) < 1e-12
    assert abs(alpha ** 2 - np.dot(np.arange(w.size), w)) < 1e-11


@settings(max_examples=25, deadline=None)
@given(st.floats(0.2, 2.5), st.floats(0.05, 1.0), st.floats(0, 40))
def test_zero_coupling_is_harmonic(alpha, delta, t):
    grid = tunnel_grid(zeta=0.0)
    p = dw.population_difference_exact(alpha, grid, delta, t)
    assert p == pytest.approx(-alpha ** 2 * math.cos(2 * delta * t), abs=1e-9)
    compact = dw.population_difference_compact(alpha, 1.0, 0.0, delta, t)
    assert p == pytest.approx(compact, abs=1e-9)


def test_fock_state_sign_from_oracle():
    # a single atom on the left: p(0) = -1, and the oracle agrees over time
    grid = tunnel_grid(zeta=0.0)
    times = np.linspace(0, 10, 11)
    ref = oracle.double_well_population_difference(grid, [0, 1], 0.0, 0.3, times,
                                                   oracle.TruncationSpec(1, 1, 1))
    ours = [dw.population_difference([0.0, 1.0], grid, 0.3, t) for t in times]
    assert ref[0] == pytest.approx(-1.0)
    assert np.allclose(ours, ref, atol=1e-12)


def test_population_difference_matches_oracle():
    grid = model.explicit_grid([1.0, 0.4], [0.05, 0.02j], tunnel_coupling=[0.1, 0.07])
    c = np.array([0.5, 0.6, 0.5, 0.37], dtype=complex)
    c /= np.linalg.norm(c)
    times = np.linspace(0, 12, 13)
    ref = oracle.double_well_population_difference(grid, c, 0.7, 0.25, times,
                                                   oracle.TruncationSpec(3, 12, 2))
    ours = [dw.population_difference(np.abs(c) ** 2, grid, 0.25, t) for t in times]
    assert np.max(np.abs(np.asarray(ours) - ref)) < 1e-8


def test_revival_leaves_only_kick_phases():
    zeta, omega = 0.3, 1.0
    grid = tunnel_grid(zeta=zeta, omega=omega)
    t = 2 * math.pi / omega
    kick = t / omega  # (w t - sin w t) / w^2 at w t = 2 pi
    for n in (1, 4, 7):
        for m in range(n):
            o = dw.tunnel_overlap(n, m, grid, t)
            assert abs(o) == pytest.approx(1.0, abs=1e-12)
            expected = np.exp(4j * zeta ** 2 * kick * (n - 2 * m - 1))
            assert o == pytest.approx(expected, abs=1e-12)


def _poisson_sum_with_model(alpha, J, S, delta, t):
    # exact double sum of p with O_m replaced by J exp(i m S)
    w = dw.poisson_weights(alpha, 1e-14)
    total = 0.0
    for n in range(1, w.size):
        for m in range(n):
            fm = dw.amplitude_f(n, m, delta, t)
            fm1 = dw.amplitude_f(n, m + 1, delta, t)
            total += w[n] * fm * np.conj(fm1) * math.sqrt((m + 1) * (n - m)) * J * np.exp(1j * m * S)
    return 2.0 * total.real


@pytest.mark.parametrize("alpha,J,S,t", [(1.0, 0.8, 0.7, 1.3), (1.7, 0.5, -2.0, 4.0),
                                         (0.6, 1.0, 3.0, 0.2)])
def test_corrected_compact_form_is_exact_for_geometric_overlaps(alpha, J, S, t):
    delta = 0.3
    ref = _poisson_sum_with_model(alpha, J, S, delta, t)
    assert dw.population_difference_compact(alpha, J, S, delta, t) == pytest.approx(ref, abs=1e-10)
    verbatim = dw.population_difference_compact(alpha, J, S, delta, t, "verbatim")
    assert abs(verbatim - ref) > 1e-3


def test_phase_shift_reproduces_compact_form():
    alpha, J, S, delta = 1.2, 0.7, 0.9, 0.25
    env = abs(np.exp(-0.5 * (1 - np.exp(-1j * S)) * alpha ** 2))
    theta = dw.phase_shift(S, alpha)
    for t in (0.0, 1.1, 5.0):
        p = dw.population_difference_compact(alpha, J, S, delta, t)
        assert p == pytest.approx(-J * alpha ** 2 * env * math.sin(2 * delta * t + theta), abs=1e-12)
    assert dw.phase_shift(0.0, 1.0) == pytest.approx(math.pi / 2)
    assert math.isnan(dw.phase_shift(math.pi, 40.0))


def test_extract_js():
    fit = dw.extract_JS(tunnel_grid(zeta=0.0), 5, 3.0)
    assert fit.J == pytest.approx(1.0) and fit.S == pytest.approx(0.0)
    assert fit.residual < 1e-14
    fit = dw.extract_JS(tunnel_grid(zeta=0.2), 5, 3.0)
    assert 0 < fit.J < 1 and fit.defined
    assert dw.default_n_ref(1.0) == 4
    with pytest.raises(InvalidArgumentError):
        dw.extract_JS(tunnel_grid(), 1, 1.0)
    with pytest.raises(InvalidArgumentError):
        dw.population_difference_compact(1.0, 1.5, 0.0, 0.1, 0.0)


def test_decoherence_suppresses_tunnelling():
    grid = tunnel_grid(zeta=0.1)
    delta = 0.2
    period = math.pi / delta
    times = np.linspace(0, 3 * period, 601)
    tr = dw.tunneling_trace(1.0, grid, delta, times)
    peaks = [np.max(np.abs(tr.p_exact[(times >= k * period) & (times <= (k + 1) * period)]))
             for k in range(3)]
    assert peaks[0] >= peaks[1] >= peaks[2]
    assert tr.p_exact[0] == pytest.approx(-1.0, abs=1e-11)
    assert np.all(np.isfinite(tr.theta)) and np.all(tr.J <= 1.0)
