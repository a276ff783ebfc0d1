"""
Brute-force verification engine in a truncated Fock space.

Hamiltonians are assembled from ladder operators, with no use of the closed
forms in :mod:`decobec.dephasing` or :mod:`decobec.doublewell`. A field mode with
coupling g couples through the Hermitian displacement generator
-i (g a^dag - g^* a), scaled by sqrt(weight) and by the atomic operator it
multiplies.

Basis ordering is atom state major and photon multi-index minor
(lexicographic). Atom states are grouped by total atom number so every
conserved-number sector is a contiguous block.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from .errors import AccuracyError, InvalidArgumentError, ResourceError
from .model import ModeGrid

__all__ = [
    "TruncationSpec",
    "FockBasis",
    "DenseState",
    "FockHamiltonian",
    "build_hamiltonian_single",
    "build_hamiltonian_double",
    "evolve",
    "evolve_by_sector",
    "overlap",
    "partial_trace_field",
    "expectation",
    "product_state",
    "single_well_field_states",
    "single_well_field_series",
    "single_well_mean_field",
    "double_well_population_difference",
    "truncation_converged",
    "population_operator",
    "DEFAULT_CAP",
]

DEFAULT_CAP = 200_000
_DENSE_EXPM_LIMIT = 2000


@dataclass(frozen=True)
class TruncationSpec:
    max_atoms: int
    max_photons_per_mode: int
    num_modes: int
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if self.max_atoms < 1 or self.max_photons_per_mode < 1 or self.num_modes < 1:
            raise InvalidArgumentError("truncation sizes must be >= 1")

    @property
    def field_dim(self) -> int:
        return (self.max_photons_per_mode + 1) ** self.num_modes

    def doubled(self) -> "TruncationSpec":
        return TruncationSpec(self.max_atoms, 2 * self.max_photons_per_mode,
                              self.num_modes, self.cap)


@dataclass(frozen=True, eq=False)
class FockBasis:
    """Product basis |atom state> (x) |n_1 ... n_M>.

    ``atom_states`` are tuples: ``(n,)`` for one condensate mode or
    ``(n_left, n_right)`` for the double well.
    """

    atom_states: tuple
    photon_cutoff: int
    num_modes: int

    @property
    def field_dim(self) -> int:
        return (self.photon_cutoff + 1) ** self.num_modes

    @property
    def dim(self) -> int:
        return len(self.atom_states) * self.field_dim

    def atom_index(self, state) -> int:
        return self.atom_states.index(tuple(state))

    def index(self, atom_state, photons) -> int:
        p = 0
        for n in photons:
            if not 0 <= n <= self.photon_cutoff:
                raise InvalidArgumentError("photon number outside truncation")
            p = p * (self.photon_cutoff + 1) + n
        return self.atom_index(atom_state) * self.field_dim + p

    def sectors(self) -> Dict[int, slice]:
        """Row slice of each total-atom-number block."""
        out = {}
        for i, s in enumerate(self.atom_states):
            n = sum(s)
            lo, hi = out.get(n, (i, i + 1))
            out[n] = (min(lo, i), max(hi, i + 1))
        f = self.field_dim
        return {n: slice(lo * f, hi * f) for n, (lo, hi) in sorted(out.items())}

    def same_as(self, other: "FockBasis") -> bool:
        return (self.atom_states == other.atom_states
                and self.photon_cutoff == other.photon_cutoff
                and self.num_modes == other.num_modes)


@dataclass(frozen=True)
class DenseState:
    amplitudes: np.ndarray
    basis: FockBasis

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class FockHamiltonian:
    """Sparse Hermitian matrix in energy units, plus its basis and hbar."""

    matrix: sp.csr_matrix
    basis: FockBasis
    hbar: float = 1.0
    number_operator: sp.csr_matrix | None = None


def _check_cap(basis: FockBasis, cap: int):
    if basis.dim > cap:
        raise ResourceError(f"Hilbert space dimension {basis.dim} exceeds cap {cap}")


def _field_operators(cutoff: int, num_modes: int):
    d = cutoff + 1
    a = sp.diags(np.sqrt(np.arange(1, d)), 1, shape=(d, d), format="csr", dtype=complex)
    eye = sp.identity(d, format="csr", dtype=complex)
    ops = []
    for k in range(num_modes):
        factors = [eye] * num_modes
        factors[k] = a
        op = factors[0]
        for f in factors[1:]:
            op = sp.kron(op, f, format="csr")
        ops.append(op)
    return ops


def _field_parts(grid: ModeGrid, trunc: TruncationSpec):
    if len(grid) != trunc.num_modes:
        raise InvalidArgumentError(
            f"grid has {len(grid)} modes but truncation expects {trunc.num_modes}")
    ops = _field_operators(trunc.max_photons_per_mode, trunc.num_modes)
    h_field = sp.csr_matrix((trunc.field_dim, trunc.field_dim), dtype=complex)
    for w, a in zip(grid.omega, ops):
        h_field = h_field + w * (a.conj().T @ a)

    def generator(couplings):
        out = sp.csr_matrix((trunc.field_dim, trunc.field_dim), dtype=complex)
        for g, a in zip(couplings, ops):
            out = out - 1j * (g * a.conj().T - np.conj(g) * a)
        return out

    return h_field, generator


def build_hamiltonian_single(grid: ModeGrid, omega0: float, kappa: float,
                             trunc: TruncationSpec, hbar: float = 1.0) -> FockHamiltonian:
    """hbar [Omega b^dag b + kappa b^dag2 b^2 + sum w a^dag a + b^dag b sum(-i)(g a^dag - g^* a)]."""
    basis = FockBasis(tuple((n,) for n in range(trunc.max_atoms + 1)),
                      trunc.max_photons_per_mode, trunc.num_modes)
    _check_cap(basis, trunc.cap)
    na = trunc.max_atoms + 1
    b = np.diag(np.sqrt(np.arange(1, na)), 1).astype(complex)
    bd = b.conj().T
    number = bd @ b
    h_atom = omega0 * number + kappa * (bd @ bd @ b @ b)
    h_field, generator = _field_parts(grid, trunc)
    eye_a = sp.identity(na, format="csr", dtype=complex)
    eye_f = sp.identity(trunc.field_dim, format="csr", dtype=complex)
    h = (sp.kron(sp.csr_matrix(h_atom), eye_f) + sp.kron(eye_a, h_field)
         + sp.kron(sp.csr_matrix(number), generator(grid.effective_coupling)))
    n_op = sp.kron(sp.csr_matrix(number), eye_f, format="csr")
    return FockHamiltonian((hbar * h).tocsr(), basis, hbar, n_op)


def _double_atom_basis(max_atoms):
    # grouped by total N, then by atoms in the right well
    return tuple((N - nr, nr) for N in range(max_atoms + 1) for nr in range(N + 1))


def _double_atom_operators(states):
    index = {s: i for i, s in enumerate(states)}
    size = len(states)
    number = np.zeros((size, size), dtype=complex)
    tunnel = np.zeros((size, size), dtype=complex)
    pop_diff = np.zeros((size, size), dtype=complex)
    for i, (nl, nr) in enumerate(states):
        number[i, i] = nl + nr
        pop_diff[i, i] = nr - nl
        # b_r^dag b_l moves one atom left -> right, b_l^dag b_r the reverse
        if nl > 0:
            j = index[(nl - 1, nr + 1)]
            tunnel[j, i] += np.sqrt(nl * (nr + 1))
        if nr > 0:
            j = index[(nl + 1, nr - 1)]
            tunnel[j, i] += np.sqrt(nr * (nl + 1))
    return number, tunnel, pop_diff


def build_hamiltonian_double(grid: ModeGrid, omega: float, delta: float,
                             trunc: TruncationSpec, hbar: float = 1.0) -> FockHamiltonian:
    """hbar [Omega N + delta T + sum w a^dag a + sum(-i)((mu N + zeta T) a^dag - h.c.)]."""
    states = _double_atom_basis(trunc.max_atoms)
    basis = FockBasis(states, trunc.max_photons_per_mode, trunc.num_modes)
    _check_cap(basis, trunc.cap)
    number, tunnel, _ = _double_atom_operators(states)
    h_field, generator = _field_parts(grid, trunc)
    eye_a = sp.identity(len(states), format="csr", dtype=complex)
    eye_f = sp.identity(trunc.field_dim, format="csr", dtype=complex)
    h_atom = omega * number + delta * tunnel
    h = (sp.kron(sp.csr_matrix(h_atom), eye_f) + sp.kron(eye_a, h_field)
         + sp.kron(sp.csr_matrix(number), generator(grid.effective_coupling))
         + sp.kron(sp.csr_matrix(tunnel), generator(grid.effective_tunnel_coupling)))
    n_op = sp.kron(sp.csr_matrix(number), eye_f, format="csr")
    return FockHamiltonian((hbar * h).tocsr(), basis, hbar, n_op)


def population_operator(basis: FockBasis) -> sp.csr_matrix:
    """b_r^dag b_r - b_l^dag b_l on a double-well basis."""
    _, _, pop = _double_atom_operators(basis.atom_states)
    return sp.kron(sp.csr_matrix(pop), sp.identity(basis.field_dim, dtype=complex), format="csr")


# ---------------------------------------------------------------------------
# evolution


def _as_vector(psi):
    return psi.amplitudes if isinstance(psi, DenseState) else np.asarray(psi, dtype=complex)


def _evolve_expm(h, psi, t, hbar):
    dense = h.toarray() if sp.issparse(h) else np.asarray(h)
    if dense.shape[0] > _DENSE_EXPM_LIMIT:
        return sp.linalg.expm_multiply(-1j * t / hbar * sp.csr_matrix(dense), psi)
    return scipy.linalg.expm(-1j * t / hbar * dense) @ psi


def _evolve_ode(h, psi, t, hbar, tol):
    mat = sp.csr_matrix(h) if sp.issparse(h) else np.asarray(h)

    def rhs(_, y):
        return (-1j / hbar) * (mat @ y)

    sol = solve_ivp(rhs, (0.0, t), psi, method="DOP853", rtol=tol, atol=tol * 1e-2)
    if not sol.success:
        raise AccuracyError(f"ODE integration failed: {sol.message}")
    return sol.y[:, -1]


def evolve(h, psi0, t: float, tol: float = 1e-10, method: str = "expm", hbar: float = 1.0):
    """exp(-i H t / hbar) psi0.

    ``method`` is ``expm`` (scaling and squaring), ``ode`` (adaptive DOP853)
    or ``both``, which runs the two and insists they agree to 1e-8.
    Accepts a :class:`FockHamiltonian` or a raw matrix, and a
    :class:`DenseState` or a raw vector; returns the same kind of state.
    """
    if isinstance(h, FockHamiltonian):
        hbar, h = h.hbar, h.matrix
    vec = _as_vector(psi0)
    if h.shape[0] != vec.size:
        raise InvalidArgumentError("Hamiltonian and state dimensions differ")
    if t == 0:
        out = vec.copy()
    elif method == "expm":
        out = _evolve_expm(h, vec, t, hbar)
    elif method == "ode":
        out = _evolve_ode(h, vec, t, hbar, min(tol, 1e-10))
    elif method == "both":
        out = _evolve_expm(h, vec, t, hbar)
        other = _evolve_ode(h, vec, t, hbar, 1e-12)
        gap = float(np.max(np.abs(out - other)))
        if gap > 1e-8:
            raise AccuracyError(f"expm and ODE propagators disagree by {gap:.3g}")
    else:
        raise InvalidArgumentError(f"unknown method {method!r}")
    drift = abs(np.linalg.norm(out) - np.linalg.norm(vec))
    if drift > max(tol, 1e-9) * max(1.0, np.linalg.norm(vec)):
        raise AccuracyError(f"norm drifted by {drift:.3g} during evolution")
    if isinstance(psi0, DenseState):
        return DenseState(out, psi0.basis)
    return out


def evolve_by_sector(ham: FockHamiltonian, psi0: DenseState, t: float,
                     tol: float = 1e-10, method: str = "expm") -> DenseState:
    """Evolve each conserved-atom-number block separately and reassemble."""
    out = np.zeros_like(psi0.amplitudes)
    for _, block in ham.basis.sectors().items():
        piece = psi0.amplitudes[block]
        if not np.any(piece):
            continue
        sub = ham.matrix[block, block]
        out[block] = evolve(sub, piece, t, tol, method, ham.hbar)
    return DenseState(out, psi0.basis)


# ---------------------------------------------------------------------------
# observables


def overlap(a: DenseState, b: DenseState) -> complex:
    """<a|b>."""
    if not a.basis.same_as(b.basis):
        raise InvalidArgumentError("states live in different bases")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def expectation(op, psi: DenseState) -> complex:
    return complex(np.vdot(psi.amplitudes, op @ psi.amplitudes))


def partial_trace_field(psi: DenseState) -> np.ndarray:
    """Atomic reduced density matrix, indexed like ``basis.atom_states``."""
    amp = psi.amplitudes.reshape(len(psi.basis.atom_states), psi.basis.field_dim)
    rho = amp @ amp.conj().T
    return 0.5 * (rho + rho.conj().T)


def product_state(basis: FockBasis, atom_amplitudes: Dict[tuple, complex]) -> DenseState:
    """sum_s c_s |s> (x) |vacuum>."""
    vec = np.zeros(basis.dim, dtype=complex)
    vac = (0,) * basis.num_modes
    for state, amp in atom_amplitudes.items():
        vec[basis.index(state, vac)] = amp
    return DenseState(vec, basis)


# ---------------------------------------------------------------------------
# ready-made cross-checks


def single_well_field_states(grid: ModeGrid, sectors: Sequence[int], t: float,
                             trunc: TruncationSpec, method: str = "expm") -> Dict[int, np.ndarray]:
    """Field register |v_n(t)> of each sector, from evolving |n> (x) |vac> with
    Omega = kappa = 0 so that no atomic phase needs removing."""
    ham = build_hamiltonian_single(grid, 0.0, 0.0, trunc)
    blocks = ham.basis.sectors()
    out = {}
    for n in sectors:
        block = blocks[n]
        sub = ham.matrix[block, block]
        psi = np.zeros(ham.basis.field_dim, dtype=complex)
        psi[0] = 1.0
        out[n] = evolve(sub, psi, t, method=method, hbar=ham.hbar)
    return out


def single_well_field_series(grid: ModeGrid, sectors: Sequence[int], times: Sequence[float],
                             trunc: TruncationSpec, method: str = "expm") -> Dict[int, np.ndarray]:
    """Field registers |v_n(t)> for many times, shape (len(times), field_dim) per sector.

    Each sector block is diagonalised once; the result at the last time is
    checked against ``method`` before the series is trusted.
    """
    times = np.asarray(times, dtype=float)
    ham = build_hamiltonian_single(grid, 0.0, 0.0, trunc)
    blocks = ham.basis.sectors()
    out = {}
    for n in sectors:
        block = blocks[n]
        sub = ham.matrix[block, block].toarray() / ham.hbar
        evals, evecs = scipy.linalg.eigh(sub)
        coeff = evecs[0].conj()  # components of the vacuum
        series = (np.exp(-1j * np.outer(times, evals)) * coeff) @ evecs.T
        check = evolve(sub, np.eye(sub.shape[0], 1).ravel().astype(complex), times[-1],
                       method=method)
        if np.max(np.abs(check - series[-1])) > 1e-8:
            raise AccuracyError("eigendecomposition and propagator disagree")
        out[n] = series
    return out


def single_well_mean_field(grid: ModeGrid, n: int, t: float, trunc: TruncationSpec,
                           method: str = "expm") -> np.ndarray:
    """<a_k>(t) per mode in the n-atom sector."""
    v = single_well_field_states(grid, [n], t, trunc, method)[n]
    ops = _field_operators(trunc.max_photons_per_mode, trunc.num_modes)
    return np.array([np.vdot(v, a @ v) for a in ops])


def double_well_population_difference(grid: ModeGrid, c: Sequence[complex], omega: float,
                                      delta: float, times: Sequence[float],
                                      trunc: TruncationSpec, method: str = "expm") -> np.ndarray:
    """p(t) from exact evolution of sum_n c_n |n>_l (x) |0>_r (x) |vac>.

    ``c`` must not reach beyond ``trunc.max_atoms``. Uses per-sector
    eigendecompositions after checking them against ``method`` at the last time.
    """
    c = np.asarray(c, dtype=complex)
    if c.size > trunc.max_atoms + 1:
        raise InvalidArgumentError("initial state exceeds max_atoms")
    ham = build_hamiltonian_double(grid, omega, delta, trunc)
    psi0 = product_state(ham.basis, {(n, 0): cn for n, cn in enumerate(c) if cn != 0})
    pop = population_operator(ham.basis)
    times = np.asarray(times, dtype=float)
    blocks = ham.basis.sectors()
    pieces = []
    for n, block in blocks.items():
        start = psi0.amplitudes[block]
        if not np.any(start):
            continue
        sub = ham.matrix[block, block].toarray() / ham.hbar
        evals, evecs = scipy.linalg.eigh(sub)
        coeff = evecs.conj().T @ start
        check = evolve(sub, start, times[-1], method=method)
        direct = evecs @ (np.exp(-1j * evals * times[-1]) * coeff)
        if np.max(np.abs(check - direct)) > 1e-8:
            raise AccuracyError("eigendecomposition and propagator disagree")
        pieces.append((block, evecs, evals, coeff, pop[block, block]))
    out = np.empty_like(times)
    for i, t in enumerate(times):
        total = 0.0
        for block, evecs, evals, coeff, pblock in pieces:
            v = evecs @ (np.exp(-1j * evals * t) * coeff)
            total += np.vdot(v, pblock @ v).real
        out[i] = total
    return out


def truncation_converged(observable: Callable[[TruncationSpec], np.ndarray],
                         trunc: TruncationSpec, tol: float = 1e-7) -> tuple:
    """Compare an observable at ``trunc`` and at doubled photon cutoff.

    Returns (converged, max_change).
    """
    a = np.asarray(observable(trunc))
    b = np.asarray(observable(trunc.doubled()))
    change = float(np.max(np.abs(a - b))) if a.size else 0.0
    return change < tol, change
