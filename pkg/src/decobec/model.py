"""
Physical parameters, spectral densities, trap geometry and coupling constants.

Natural units (hbar = c = 1) are the default everywhere; every formula takes
``hbar`` and/or ``c`` keywords so they can be overridden. Couplings stored on
a :class:`ModeGrid` are frequencies (eta_k / hbar, mu_k / hbar, zeta_k / hbar).

Gaussian convention: a mode function of width ``sigma`` is
``phi(r) = (pi sigma^2)^(-3/4) exp(-|r - r0|^2 / (2 sigma^2))``, so that
``|phi|^2`` has Fourier transform ``exp(-sigma^2 q^2 / 4)`` and two such
functions a distance ``a`` apart overlap by ``exp(-a^2 / (4 sigma^2))``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import InvalidArgumentError

__all__ = [
    "PumpConfig",
    "FreeSpace",
    "CavityInverseCubic",
    "Tabulated",
    "SpectralDensity",
    "SingleWell",
    "DoubleWell",
    "TrapGeometry",
    "ModeGrid",
    "GridSpec",
    "coupling_g",
    "calibrated_coupling_scale",
    "continuum_prefactor",
    "mode_function",
    "form_factor_eta",
    "local_couplings",
    "gaussian_overlap",
    "hartree_fock_energy",
    "kappa_from_trap",
    "lambda_mn",
    "splitting_delta",
    "build_mode_grid",
    "explicit_grid",
]


# ---------------------------------------------------------------------------
# parameter containers


@dataclass(frozen=True)
class PumpConfig:
    """Classical pump laser.

    ``rabi_frequency`` (R), ``detuning`` (Delta) and ``pump_frequency``
    (omega_0) are frequencies; ``dipole`` (d) and ``coupling_scale`` (g_0)
    are model-unit scalars.
    """

    rabi_frequency: float
    detuning: float
    pump_frequency: float
    dipole: float = 1.0
    coupling_scale: float = 1.0

    def __post_init__(self):
        if not self.rabi_frequency > 0:
            raise InvalidArgumentError("rabi_frequency must be > 0")
        if self.detuning == 0 or not math.isfinite(self.detuning):
            raise InvalidArgumentError("detuning must be finite and non-zero")
        if not self.pump_frequency > 0:
            raise InvalidArgumentError("pump_frequency must be > 0")
        if not self.dipole > 0:
            raise InvalidArgumentError("dipole must be > 0")
        if not self.coupling_scale > 0:
            raise InvalidArgumentError("coupling_scale must be > 0")
        if abs(self.detuning) < self.rabi_frequency:
            warnings.warn(
                f"|detuning| = {abs(self.detuning)} < rabi_frequency = "
                f"{self.rabi_frequency}: outside the far-off-resonance regime",
                RuntimeWarning, stacklevel=3)

    def k0(self, c: float = 1.0) -> float:
        """Pump wavenumber omega_0 / c."""
        return self.pump_frequency / c


@dataclass(frozen=True)
class FreeSpace:
    """Unmodified vacuum, mu(k) = 1."""

    def __call__(self, k):
        return np.ones_like(np.asarray(k, dtype=float))

    def moment3(self, k):
        k = np.asarray(k, dtype=float)
        return k ** 3

    @property
    def support(self):
        return (0.0, math.inf)


@dataclass(frozen=True)
class CavityInverseCubic:
    """Cavity-modified density mu(k) = scale / k^3."""

    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise InvalidArgumentError("cavity density scale must be > 0")

    def __call__(self, k):
        k = np.asarray(k, dtype=float)
        return self.scale / k ** 3

    def moment3(self, k):
        # k^3 mu(k) is constant; avoids 0 * inf at k = 0
        return np.full_like(np.asarray(k, dtype=float), self.scale)

    @property
    def support(self):
        return (0.0, math.inf)


@dataclass(frozen=True)
class Tabulated:
    """Piecewise-linear mu(k) through ``samples`` of (k, mu) pairs."""

    samples: tuple

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
            raise InvalidArgumentError("tabulated density needs >= 2 (k, mu) pairs")
        k, mu = arr.T
        if np.any(k <= 0) or np.any(np.diff(k) <= 0):
            raise InvalidArgumentError("tabulated k must be positive and strictly ascending")
        if np.any(mu < 0) or not np.all(np.isfinite(mu)):
            raise InvalidArgumentError("tabulated mu must be finite and >= 0")
        object.__setattr__(self, "samples", tuple(map(tuple, arr.tolist())))

    @property
    def support(self):
        return (self.samples[0][0], self.samples[-1][0])

    def __call__(self, k):
        k = np.asarray(k, dtype=float)
        lo, hi = self.support
        if np.any(k < lo) or np.any(k > hi):
            raise InvalidArgumentError(
                f"tabulated density evaluated outside [{lo}, {hi}]")
        ks, mus = np.asarray(self.samples).T
        return np.interp(k, ks, mus)

    def moment3(self, k):
        k = np.asarray(k, dtype=float)
        return k ** 3 * self(k)


SpectralDensity = Union[FreeSpace, CavityInverseCubic, Tabulated]


@dataclass(frozen=True)
class SingleWell:
    width: float
    trap_frequency: float = 1.0

    def __post_init__(self):
        if not self.width > 0 or not self.trap_frequency > 0:
            raise InvalidArgumentError("single well needs width > 0 and trap_frequency > 0")


@dataclass(frozen=True)
class DoubleWell:
    """Symmetric double well with minima at x = -a/2 (left) and +a/2 (right)."""

    separation: float
    local_width: float
    barrier_height: float = 1.0
    mass: float = 1.0
    splitting_scale: float = 1.0

    def __post_init__(self):
        if self.separation < 0:
            raise InvalidArgumentError("separation must be >= 0")
        for name in ("local_width", "barrier_height", "mass", "splitting_scale"):
            if not getattr(self, name) > 0:
                raise InvalidArgumentError(f"{name} must be > 0")
        if self.separation < 4 * self.local_width:
            warnings.warn(
                f"separation {self.separation} < 4 * local_width: local modes "
                "overlap appreciably", RuntimeWarning, stacklevel=3)

    @property
    def barrier_parameter(self) -> float:
        """xi_b = sqrt(2 M V_0)."""
        return math.sqrt(2.0 * self.mass * self.barrier_height)


TrapGeometry = Union[SingleWell, DoubleWell]


@dataclass(frozen=True)
class GridSpec:
    k_min: float
    k_max: float
    n_radial: int = 64
    n_angular: int = 1

    def __post_init__(self):
        if not 0 < self.k_min < self.k_max:
            raise InvalidArgumentError("need 0 < k_min < k_max")
        if self.n_radial < 1 or self.n_angular < 1:
            raise InvalidArgumentError("grid counts must be >= 1")


@dataclass(frozen=True, eq=False)
class ModeGrid:
    """Finite set of vacuum modes.

    Each mode carries a wavenumber, a quadrature ``weight`` (measure
    mu(k) k^2 sin(theta) dtheta dphi dk), the detuned frequency
    ``omega = c k - omega_0`` and a complex coupling in frequency units.
    ``tunnel_coupling`` is only present for double-well grids, where
    ``coupling`` holds mu_k/hbar and ``tunnel_coupling`` holds zeta_k/hbar.
    """

    k: np.ndarray
    weight: np.ndarray
    omega: np.ndarray
    coupling: np.ndarray
    tunnel_coupling: Optional[np.ndarray] = None
    c: float = 1.0

    def __post_init__(self):
        for name in ("k", "weight", "omega"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float).ravel())
        object.__setattr__(self, "coupling", np.asarray(self.coupling, dtype=complex).ravel())
        if self.tunnel_coupling is not None:
            object.__setattr__(self, "tunnel_coupling",
                               np.asarray(self.tunnel_coupling, dtype=complex).ravel())
        n = self.k.size
        arrays = [self.weight, self.omega, self.coupling]
        if self.tunnel_coupling is not None:
            arrays.append(self.tunnel_coupling)
        if n == 0 or any(a.size != n for a in arrays):
            raise InvalidArgumentError("mode grid arrays must be non-empty and equally long")
        if np.any(self.weight < 0):
            raise InvalidArgumentError("mode weights must be >= 0")
        if not all(np.all(np.isfinite(a)) for a in arrays):
            raise InvalidArgumentError("mode grid entries must be finite")
        for arr in (self.k, self.weight, self.omega, self.coupling, self.tunnel_coupling):
            if arr is not None:
                arr.setflags(write=False)

    def __len__(self):
        return self.k.size

    @property
    def effective_coupling(self) -> np.ndarray:
        """Per-mode coupling scaled by sqrt(weight); the drive seen by one oscillator."""
        return np.sqrt(self.weight) * self.coupling

    @property
    def effective_tunnel_coupling(self) -> np.ndarray:
        if self.tunnel_coupling is None:
            return np.zeros_like(self.coupling)
        return np.sqrt(self.weight) * self.tunnel_coupling

    @property
    def is_double_well(self) -> bool:
        return self.tunnel_coupling is not None


def explicit_grid(omega, coupling, weight=None, tunnel_coupling=None, c=1.0, k=None) -> ModeGrid:
    """Build a :class:`ModeGrid` from explicit mode frequencies and couplings.

    Handy for desk-scale and oracle instances. Wavenumbers default to a
    placeholder of 1 since only ``omega`` enters the dynamics.
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    coupling = np.broadcast_to(np.asarray(coupling, dtype=complex), omega.shape)
    weight = np.ones_like(omega) if weight is None else np.broadcast_to(
        np.asarray(weight, dtype=float), omega.shape)
    if tunnel_coupling is not None:
        tunnel_coupling = np.broadcast_to(np.asarray(tunnel_coupling, dtype=complex), omega.shape)
    k = np.ones_like(omega) if k is None else np.broadcast_to(np.asarray(k, dtype=float), omega.shape)
    return ModeGrid(k=k.copy(), weight=weight.copy(), omega=omega.copy(), coupling=coupling.copy(),
                    tunnel_coupling=None if tunnel_coupling is None else tunnel_coupling.copy(),
                    c=c)


# ---------------------------------------------------------------------------
# couplings


def coupling_g(pump: PumpConfig, k, c: float = 1.0):
    """Bare light-atom coupling g_k = g_0 d |R| sqrt(c k) / (2 |Delta|)."""
    k = np.asarray(k, dtype=float)
    if np.any(k <= 0):
        raise InvalidArgumentError("coupling_g needs k > 0")
    g = (pump.coupling_scale * pump.dipole * abs(pump.rabi_frequency)
         * np.sqrt(c * k) / (2.0 * abs(pump.detuning)))
    return float(g) if g.ndim == 0 else g


def continuum_prefactor(pump: PumpConfig, hbar: float = 1.0, c: float = 1.0) -> float:
    """pi R^2 c d^2 / (8 (2 pi)^3 hbar Delta^2), the constant in front of the
    continuum decoherence exponent."""
    return (math.pi * pump.rabi_frequency ** 2 * c * pump.dipole ** 2
            / (8.0 * (2.0 * math.pi) ** 3 * hbar * pump.detuning ** 2))


def calibrated_coupling_scale(hbar: float = 1.0) -> float:
    """g_0 for which a mode grid reproduces :func:`continuum_prefactor`.

    The exact per-mode overlap decays as exp(-2 (m-n)^2 |g|^2 sin^2(wt/2) / w^2),
    so summing 2 |g_k|^2 over the measure k^2 dOmega dk must give the
    continuum constant: 2 * 4 pi * g_0^2 d^2 R^2 c / (4 Delta^2) = prefactor.
    """
    return 1.0 / math.sqrt(16.0 * (2.0 * math.pi) ** 3 * hbar)


def _gaussian(r, centre, sigma):
    r = np.asarray(r, dtype=float)
    d2 = np.sum((r - np.asarray(centre, dtype=float)) ** 2, axis=-1)
    return (math.pi * sigma ** 2) ** -0.75 * np.exp(-d2 / (2.0 * sigma ** 2))


def gaussian_overlap(separation: float, sigma: float) -> float:
    """Overlap of two normalised width-``sigma`` Gaussians ``separation`` apart."""
    return math.exp(-separation ** 2 / (4.0 * sigma ** 2))


def mode_function(geometry: TrapGeometry, which: str, r):
    """Evaluate a normalised single-particle mode function at points ``r``.

    ``which`` is one of ``ground``, ``excited``, ``left``, ``right``. For the
    double well the even/odd pair is built from the local modes and
    normalised exactly, including their residual overlap.
    """
    if isinstance(geometry, SingleWell):
        if which != "ground":
            raise InvalidArgumentError("single well only has a 'ground' mode")
        return _gaussian(r, (0.0, 0.0, 0.0), geometry.width)
    if not isinstance(geometry, DoubleWell):
        raise InvalidArgumentError(f"unknown geometry {geometry!r}")
    half = 0.5 * geometry.separation
    sigma = geometry.local_width
    left = _gaussian(r, (-half, 0.0, 0.0), sigma)
    right = _gaussian(r, (half, 0.0, 0.0), sigma)
    if which == "left":
        return left
    if which == "right":
        return right
    s = gaussian_overlap(geometry.separation, sigma)
    if which == "ground":
        return (right + left) / math.sqrt(2.0 * (1.0 + s))
    if which == "excited":
        if 1.0 - s < 1e-14:
            raise InvalidArgumentError("excited mode undefined at zero separation")
        return (right - left) / math.sqrt(2.0 * (1.0 - s))
    raise InvalidArgumentError(f"unknown mode {which!r}")


def _momentum_transfer(k_vec, k0_vec):
    q = np.asarray(k_vec, dtype=float) - np.asarray(k0_vec, dtype=float)
    return q


def form_factor_eta(geometry: SingleWell, pump: PumpConfig, k_vec, k0_vec,
                    hbar: float = 1.0, c: float = 1.0):
    """eta_k = hbar g_k int |phi_0|^2 exp(i (k - k0).r) d^3r for the Gaussian ground mode."""
    if not isinstance(geometry, SingleWell):
        raise InvalidArgumentError("form_factor_eta needs a single-well geometry")
    q = _momentum_transfer(k_vec, k0_vec)
    kmag = np.linalg.norm(np.asarray(k_vec, dtype=float), axis=-1)
    g = coupling_g(pump, kmag, c)
    ff = np.exp(-geometry.width ** 2 * np.sum(q * q, axis=-1) / 4.0)
    out = hbar * g * ff + 0j
    return complex(out) if np.ndim(out) == 0 else out


def local_couplings(geometry: DoubleWell, pump: PumpConfig, k_vec, k0_vec,
                    hbar: float = 1.0, c: float = 1.0):
    """(mu_k, zeta_k) for the displaced Gaussian local modes.

    mu_k carries the phase exp(-i q_x a/2) from the left-well centre; zeta_k
    is the left-right transition density, centred at the origin.
    """
    if not isinstance(geometry, DoubleWell):
        raise InvalidArgumentError("local_couplings needs a double-well geometry")
    q = _momentum_transfer(k_vec, k0_vec)
    kmag = np.linalg.norm(np.asarray(k_vec, dtype=float), axis=-1)
    g = coupling_g(pump, kmag, c)
    sigma = geometry.local_width
    envelope = hbar * g * np.exp(-sigma ** 2 * np.sum(q * q, axis=-1) / 4.0)
    mu = envelope * np.exp(-0.5j * q[..., 0] * geometry.separation)
    zeta = envelope * gaussian_overlap(geometry.separation, sigma) + 0j
    if np.ndim(mu) == 0:
        return complex(mu), complex(zeta)
    return mu, zeta


# ---------------------------------------------------------------------------
# scalar formulas


def hartree_fock_energy(n, omega0: float, kappa: float):
    """epsilon(n) = n (Omega_0 - kappa) + kappa n^2."""
    n = np.asarray(n)
    if np.any(n < 0):
        raise InvalidArgumentError("atom number must be >= 0")
    e = n * (omega0 - kappa) + kappa * n * n
    return e.item() if e.ndim == 0 else e


def kappa_from_trap(geometry: SingleWell, g_aa: float) -> float:
    """kappa = g_aa int |phi_0|^4 d^3r = g_aa (2 pi sigma^2)^(-3/2)."""
    if not isinstance(geometry, SingleWell):
        raise InvalidArgumentError("kappa_from_trap needs a single-well geometry")
    return g_aa * (2.0 * math.pi * geometry.width ** 2) ** -1.5


def lambda_mn(pump: PumpConfig, density_scale: float, m: int, n: int, hbar: float = 1.0) -> float:
    """Cavity decoherence rate constant xi_c (m-n)^2 R^2 d^2 / (256 pi^2 hbar Delta^2)."""
    if m < 0 or n < 0:
        raise InvalidArgumentError("sector labels must be >= 0")
    return (density_scale * (m - n) ** 2 * pump.rabi_frequency ** 2 * pump.dipole ** 2
            / (256.0 * math.pi ** 2 * hbar * pump.detuning ** 2))


def splitting_delta(geometry: DoubleWell, hbar: float = 1.0) -> float:
    """Tunnel splitting delta = C exp(-2 xi_b a) / (M xi_b hbar)."""
    if not isinstance(geometry, DoubleWell):
        raise InvalidArgumentError("splitting_delta needs a double-well geometry")
    xb = geometry.barrier_parameter
    return (geometry.splitting_scale * math.exp(-2.0 * xb * geometry.separation)
            / (geometry.mass * xb * hbar))


# ---------------------------------------------------------------------------
# mode grid


def _angular_nodes(n_angular: int):
    cos_t, w_t = np.polynomial.legendre.leggauss(n_angular)
    n_phi = 2 * n_angular
    phi = 2.0 * np.pi * (np.arange(n_phi) + 0.5) / n_phi
    w_phi = np.full(n_phi, 2.0 * np.pi / n_phi)
    return cos_t, w_t, phi, w_phi


def build_mode_grid(pump: PumpConfig, geometry: TrapGeometry, density: SpectralDensity,
                    spec: GridSpec, hbar: float = 1.0, c: float = 1.0) -> ModeGrid:
    """Discretise the vacuum on a product (k, cos theta, phi) Gauss grid.

    Radial nodes are Gauss-Legendre on [k_min, k_max]; the polar angle uses
    Gauss-Legendre in cos(theta) and the azimuth is a uniform midpoint rule
    with 2 * n_angular points. The pump wavevector lies along +x.
    """
    lo, hi = density.support
    if isinstance(density, Tabulated) and (spec.k_min < lo or spec.k_max > hi):
        raise InvalidArgumentError(
            f"tabulated density covers [{lo}, {hi}], grid needs [{spec.k_min}, {spec.k_max}]")
    x, wx = np.polynomial.legendre.leggauss(spec.n_radial)
    k = 0.5 * (spec.k_max - spec.k_min) * x + 0.5 * (spec.k_max + spec.k_min)
    wk = 0.5 * (spec.k_max - spec.k_min) * wx
    cos_t, w_t, phi, w_phi = _angular_nodes(spec.n_angular)

    K, CT, PH = np.meshgrid(k, cos_t, phi, indexing="ij")
    W = (wk[:, None, None] * w_t[None, :, None] * w_phi[None, None, :]
         * (k ** 2 * density(k))[:, None, None])
    sin_t = np.sqrt(1.0 - CT ** 2)
    k_vec = np.stack([K * CT, K * sin_t * np.cos(PH), K * sin_t * np.sin(PH)], axis=-1)
    k0_vec = np.array([pump.k0(c), 0.0, 0.0])

    if isinstance(geometry, SingleWell):
        coupling = form_factor_eta(geometry, pump, k_vec, k0_vec, hbar, c) / hbar
        tunnel = None
    elif isinstance(geometry, DoubleWell):
        mu, zeta = local_couplings(geometry, pump, k_vec, k0_vec, hbar, c)
        coupling, tunnel = mu / hbar, zeta / hbar
    else:
        raise InvalidArgumentError(f"unknown geometry {geometry!r}")

    return ModeGrid(
        k=K.ravel(), weight=W.ravel(), omega=(c * K - pump.pump_frequency).ravel(),
        coupling=np.ravel(coupling),
        tunnel_coupling=None if tunnel is None else np.ravel(tunnel), c=c)
