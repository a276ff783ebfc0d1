"""
Exact single-well pure-dephasing dynamics.

Every vacuum mode driven by an n-atom condensate ends up in a coherent state
with amplitude ``n g (exp(-i w t) - 1) / (i w)`` and a c-number phase
``n^2 |g|^2 (w t - sin w t) / w^2``. This corresponds to the mode Hamiltonian
``w a^dag a - i n (g a^dag - g^* a)``. Decoherence factors are overlaps
``O_mn = <v_m|v_n>`` of the field states attached to sectors m and n; they
are evaluated in log space so that grids with many modes do not underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from . import specfun
from .errors import InvalidArgumentError
from .model import (
    FreeSpace, ModeGrid, PumpConfig, SpectralDensity, Tabulated,
    continuum_prefactor, hartree_fock_energy,
)

__all__ = [
    "ModeDisplacement",
    "EntangledState",
    "displacement",
    "drive_profile",
    "kick_profile",
    "coherent_overlap",
    "log_decoherence_factor",
    "decoherence_factor_discrete",
    "decoherence_kernel",
    "decoherence_exponent_integral",
    "decoherence_norm_integral",
    "decoherence_norm_cavity",
    "coherent_amplitudes",
    "evolve_entangled_state",
    "reduced_density_matrix",
    "purity",
]

# below this |w t| the kick phase uses its Taylor series
_KICK_SERIES_SWITCH = 0.1


@dataclass(frozen=True)
class ModeDisplacement:
    """Coherent amplitudes ``alpha`` and kick phases ``gamma``, one per mode."""

    alpha: np.ndarray
    gamma: np.ndarray


def drive_profile(omega, t):
    """(exp(-i w t) - 1) / (i w), written as -t exp(-i w t/2) sinc so w = 0 is regular."""
    omega = np.asarray(omega, dtype=float)
    x = omega * t
    return -t * np.exp(-0.5j * x) * np.sinc(x / (2.0 * np.pi))


def kick_profile(omega, t):
    """(w t - sin w t) / w^2, with a series branch near w t = 0."""
    omega = np.asarray(omega, dtype=float)
    x = omega * t
    out = np.empty(np.broadcast(x).shape)
    small = np.abs(x) < _KICK_SERIES_SWITCH
    xs = x[small]
    x2 = xs * xs
    # (x - sin x)/x^2 = x/3! - x^3/5! + x^5/7! - x^7/9! + x^9/11!
    series = xs * (1 / 6 - x2 * (1 / 120 - x2 * (1 / 5040 - x2 * (1 / 362880 - x2 / 39916800))))
    out[small] = series * t * t
    xl = x[~small]
    out[~small] = (xl - np.sin(xl)) / np.broadcast_to(omega, x.shape)[~small] ** 2
    return out


def _sin2_profile(omega, t):
    """sin^2(w t / 2) / w^2."""
    x = np.asarray(omega, dtype=float) * t
    return 0.25 * t * t * np.sinc(x / (2.0 * np.pi)) ** 2


def displacement(n: int, g, omega, t: float) -> ModeDisplacement:
    """Coherent displacement and kick phase of modes driven by n atoms for time t.

    ``g`` and ``omega`` may be arrays (one entry per mode).
    """
    if t < 0:
        raise InvalidArgumentError("t must be >= 0")
    g = np.asarray(g, dtype=complex)
    alpha = n * g * drive_profile(omega, t)
    gamma = n * n * np.abs(g) ** 2 * kick_profile(omega, t)
    return ModeDisplacement(alpha=np.atleast_1d(alpha), gamma=np.atleast_1d(gamma))


def coherent_overlap(a: ModeDisplacement, b: ModeDisplacement, log: bool = False):
    """<v_a|v_b> for product states prod_k exp(i gamma_k)|alpha_k>."""
    expo = np.sum(1j * (b.gamma - a.gamma)
                  - 0.5 * np.abs(a.alpha) ** 2 - 0.5 * np.abs(b.alpha) ** 2
                  + np.conj(a.alpha) * b.alpha)
    return expo if log else np.exp(expo)


def log_decoherence_factor(m: int, n: int, grid: ModeGrid, t: float) -> complex:
    """ln O_mn on a mode grid.

    Real part -2 (m-n)^2 sum_k w_k |g_k|^2 sin^2(w_k t/2) / w_k^2, imaginary
    part (n^2 - m^2) sum_k w_k |g_k|^2 (w_k t - sin w_k t) / w_k^2.
    """
    if t < 0:
        raise InvalidArgumentError("t must be >= 0")
    strength = grid.weight * np.abs(grid.coupling) ** 2
    norm = -2.0 * (m - n) ** 2 * np.sum(strength * _sin2_profile(grid.omega, t))
    phase = (n * n - m * m) * np.sum(strength * kick_profile(grid.omega, t))
    return complex(norm, phase)


def decoherence_factor_discrete(m: int, n: int, grid: ModeGrid, t: float) -> complex:
    """Decoherence factor O_mn = <v_m|v_n> on a discrete mode grid."""
    if m == n:
        return 1.0 + 0.0j
    return complex(np.exp(log_decoherence_factor(m, n, grid, t)))


# ---------------------------------------------------------------------------
# continuum


def decoherence_kernel(k, t: float, pump: PumpConfig, density: SpectralDensity, c: float = 1.0):
    """sin^2(t (c k - w0)/2) k^3 mu(k) / (c k - w0)^2.

    Within |c k - w0| < 1e-8 w0 the analytic limit t^2/4 k^3 mu(k) is used.
    """
    k = np.asarray(k, dtype=float)
    w0 = pump.pump_frequency
    x = c * k - w0
    near = np.abs(x) < 1e-8 * w0
    xs = np.where(near, 1.0, x)
    ratio = np.where(near, 0.25 * t * t, np.sin(0.5 * t * xs) ** 2 / xs ** 2)
    return ratio * density.moment3(k)


def _tail_estimate(t, pump, density, c, k_cut, tol):
    # large-k tail: sin^2 = (1 - cos)/2; the cosine part by two integrations by parts
    w0 = pump.pump_frequency

    def h(k):
        return density.moment3(k) / (c * k - w0) ** 2

    def mapped(u):
        return h(k_cut / u) * k_cut / u ** 2

    smooth = specfun.integrate_adaptive(mapped, 0.0, 1.0, tol)
    phase = t * (c * k_cut - w0)
    step = 1e-4 * k_cut
    dh = (h(k_cut + step) - h(k_cut - step)) / (2.0 * step)
    tc = t * c
    oscillating = 0.5 * math.sin(phase) * h(k_cut) / tc + 0.5 * math.cos(phase) * dh / tc ** 2
    value = 0.5 * smooth.value + float(oscillating)
    return value, smooth


def decoherence_exponent_integral(t: float, pump: PumpConfig, density: SpectralDensity,
                                  tol: float = 1e-10, k_max: float | None = None,
                                  c: float = 1.0, cutoffs: Sequence[float] | None = None
                                  ) -> specfun.QuadratureResult:
    """int_0^inf decoherence_kernel(k) dk.

    Free space is integrated up to a rising sequence of cutoffs (default
    (1e2, 1e3, 1e4) w0/c) and reported as diverged when it keeps growing.
    Densities defined to infinity are integrated to ``k_max`` (default
    1e3 w0/c) plus an asymptotic tail; tabulated densities only over their
    support.
    """
    if t < 0:
        raise InvalidArgumentError("t must be >= 0")
    w0 = pump.pump_frequency
    k_res = w0 / c
    if t == 0:
        return specfun.QuadratureResult(0.0, 0.0, 0)

    def kernel(k):
        return decoherence_kernel(k, t, pump, density, c)

    opts = dict(breakpoints=(k_res,), initial_width=math.pi / (2.0 * t * c))

    if isinstance(density, FreeSpace):
        cuts = cutoffs if cutoffs is not None else [f * k_res for f in (1e2, 1e3, 1e4)]
        return specfun.integrate_to_cutoff(kernel, 0.0, cuts, tol, **opts)

    if isinstance(density, Tabulated):
        lo, hi = density.support
        if k_max is not None:
            hi = min(hi, k_max)
        return specfun.integrate_adaptive(kernel, lo, hi, tol, **opts)

    k_cut = k_max if k_max is not None else 1e3 * k_res
    if not k_cut > k_res:
        raise InvalidArgumentError("k_max must exceed w0/c")
    body = specfun.integrate_adaptive(kernel, 0.0, k_cut, tol, **opts)
    tail, tail_q = _tail_estimate(t, pump, density, c, k_cut, tol)
    return specfun.QuadratureResult(
        value=body.value + tail,
        abs_error_estimate=body.abs_error_estimate + tail_q.abs_error_estimate,
        evaluations=body.evaluations + tail_q.evaluations + 3)


def decoherence_norm_integral(m: int, n: int, pump: PumpConfig, density: SpectralDensity,
                              t: float, tol: float = 1e-10, k_max: float | None = None,
                              hbar: float = 1.0, c: float = 1.0,
                              cutoffs: Sequence[float] | None = None
                              ) -> specfun.QuadratureResult:
    """|O_mn(t)| from the continuum integral over an isotropic mode density.

    ``value`` is the norm itself. For a diverging integral (free space) the
    norm is the sentinel 0.0 with ``diverged=True``; ``partials`` then carries
    the growing exponents, one per cutoff.
    """
    quad = decoherence_exponent_integral(t, pump, density, tol, k_max, c, cutoffs)
    scale = (m - n) ** 2 * continuum_prefactor(pump, hbar, c)
    exponent = scale * quad.value
    partials = tuple(scale * p for p in quad.partials)
    if quad.diverged:
        return specfun.QuadratureResult(0.0, 0.0, quad.evaluations, True, partials)
    norm = math.exp(-exponent)
    return specfun.QuadratureResult(norm, norm * scale * quad.abs_error_estimate,
                                    quad.evaluations, False, partials)


def decoherence_norm_cavity(lam: float, omega0: float, t, variant: str = "corrected"):
    """Closed-form |O_mn(t)| for mu(k) = xi_c / k^3.

    ``corrected``: exp(-lam [pi t - 2/w0 + 2 cos(w0 t)/w0 + 2 Si(w0 t) t]),
    which equals 1 at t = 0. ``verbatim`` keeps a bare ``-2`` in place of
    ``-2/w0``; it is only consistent for w0 = 1.
    """
    if lam < 0 or not omega0 > 0:
        raise InvalidArgumentError("need lam >= 0 and omega0 > 0")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise InvalidArgumentError("t must be >= 0")
    if variant == "corrected":
        const = -2.0 / omega0
    elif variant == "verbatim":
        const = -2.0
    else:
        raise InvalidArgumentError(f"unknown variant {variant!r}")
    bracket = (np.pi * t + const + 2.0 * np.cos(omega0 * t) / omega0
               + 2.0 * specfun.sine_integral(omega0 * t) * t)
    out = np.exp(-lam * bracket)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# entangled state and reduced density matrix


@dataclass(frozen=True)
class EntangledState:
    """sum_n amplitude_n |n> (x) |alpha^n>, kick phases folded into the amplitudes."""

    sectors: np.ndarray
    amplitudes: np.ndarray
    alpha: np.ndarray  # shape (sectors, modes)
    t: float


def coherent_amplitudes(alpha: complex, n_max: int) -> np.ndarray:
    """c_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!) for n = 0..n_max."""
    n = np.arange(n_max + 1)
    if alpha == 0:
        return (n == 0).astype(complex)
    logmag = -0.5 * abs(alpha) ** 2 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(logmag + 1j * n * np.angle(alpha))


def evolve_entangled_state(c: Sequence[complex], grid: ModeGrid, omega0: float,
                           kappa: float, t: float) -> EntangledState:
    """Exact state at time t from sum_n c_n |n> (x) |vacuum>.

    ``c[n]`` is the amplitude of the n-atom Fock state.
    """
    c = np.asarray(c, dtype=complex)
    if abs(np.sum(np.abs(c) ** 2) - 1.0) > 1e-9:
        raise InvalidArgumentError("initial amplitudes must be normalised to 1e-9")
    if t < 0:
        raise InvalidArgumentError("t must be >= 0")
    n = np.arange(c.size)
    geff = grid.effective_coupling
    drive = drive_profile(grid.omega, t)
    kick_sum = np.sum(np.abs(geff) ** 2 * kick_profile(grid.omega, t))
    energies = np.asarray(hartree_fock_energy(n, omega0, kappa), dtype=float)
    amplitudes = c * np.exp(-1j * energies * t + 1j * n ** 2 * kick_sum)
    alpha = n[:, None] * (geff * drive)[None, :]
    return EntangledState(sectors=n, amplitudes=amplitudes, alpha=alpha, t=t)


def reduced_density_matrix(state: EntangledState, grid: ModeGrid | None = None) -> np.ndarray:
    """Atomic density matrix rho_mn = a_m a_n^* <alpha^n|alpha^m>.

    ``grid`` is accepted for symmetry with the other constructors but not
    needed: the state already holds every displacement.
    """
    a = state.amplitudes
    alpha = state.alpha
    size = a.size
    sq = np.sum(np.abs(alpha) ** 2, axis=1)
    rho = np.empty((size, size), dtype=complex)
    for i in range(size):
        rho[i, i] = abs(a[i]) ** 2
        for j in range(i + 1, size):
            log_ov = np.sum(np.conj(alpha[j]) * alpha[i]) - 0.5 * (sq[i] + sq[j])
            rho[i, j] = a[i] * np.conj(a[j]) * np.exp(log_ov)
            rho[j, i] = np.conj(rho[i, j])
    return rho


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ rho)))
