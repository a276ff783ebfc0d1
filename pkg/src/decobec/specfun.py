"""
Special functions and quadrature primitives.

The sine integral is evaluated with a Taylor series near the origin and a
continued fraction for the auxiliary functions f(z), g(z) further out.
Quadrature is a vectorised adaptive Gauss-Kronrod (7, 15) bisection scheme;
kernels must accept numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import AccuracyError, InvalidArgumentError

__all__ = [
    "QuadratureResult",
    "sine_integral",
    "integrate_adaptive",
    "integrate_to_cutoff",
    "DIVERGENCE_RATIO",
]

# Gauss-Kronrod (7, 15) abscissae on [0, 1] half-range and weights, QUADPACK qk15.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# full 15-point rule on [-1, 1]
_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[-2::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[-2::-1]])
_GAUSS_W = np.zeros(15)
_GAUSS_W[1:7:2] = _WG[:3]
_GAUSS_W[7] = _WG[3]
_GAUSS_W[9:15:2] = _WG[2::-1]

#: increment ratio above which a cutoff sequence is declared divergent
DIVERGENCE_RATIO = 0.5

_SI_SWITCH = 4.0


@dataclass(frozen=True)
class QuadratureResult:
    """Outcome of a quadrature.

    ``diverged`` is only ever set by :func:`integrate_to_cutoff`, in which
    case ``value`` is the last partial integral and should be read as a lower
    bound. ``partials`` holds the partial integrals for each cutoff.
    """

    value: float
    abs_error_estimate: float
    evaluations: int
    diverged: bool = False
    partials: tuple = field(default=())


# ---------------------------------------------------------------------------
# sine integral


def _si_series(x):
    # Si(x) = sum_k (-1)^k x^(2k+1) / ((2k+1) (2k+1)!)
    x2 = x * x
    term = x.copy()
    total = x.copy()
    for k in range(1, 40):
        term = -term * x2 / ((2 * k) * (2 * k + 1))
        total = total + term / (2 * k + 1)
        if np.all(np.abs(term) <= 1e-18 * np.abs(total)):
            break
    return total


def _si_continued_fraction(x):
    # E1(ix) by modified Lentz; Si(x) = pi/2 + Im(e^{-ix} * h) for x > 0
    tiny = 1e-300
    b = 1.0 + 1j * x
    c = np.full_like(b, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    for i in range(2, 100_000):
        a = -float((i - 1) ** 2)
        b = b + 2.0
        d[active] = 1.0 / (a * d[active] + b[active])
        c[active] = b[active] + a / c[active]
        delta = c[active] * d[active]
        h[active] = h[active] * delta
        # freeze each element once its factor is within a few ulps of 1
        done = np.abs(delta - 1.0) < 4e-16
        idx = np.flatnonzero(active)
        active[idx[done]] = False
        if not active.any():
            break
    else:  # pragma: no cover - the fraction converges quickly for x > 4
        raise AccuracyError("sine integral continued fraction did not converge")
    h = (np.cos(x) - 1j * np.sin(x)) * h
    return 0.5 * np.pi + h.imag


def sine_integral(z):
    """Sine integral Si(z) = int_0^z sin(x)/x dx.

    Accepts a scalar or an array; returns the same shape. Relative accuracy
    is better than 1e-12 for |z| <= 1e4.
    """
    arr = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError("sine_integral requires finite input")
    ax = np.abs(np.atleast_1d(arr))
    out = np.empty_like(ax)
    small = ax <= _SI_SWITCH
    if np.any(small):
        out[small] = _si_series(ax[small])
    if np.any(~small):
        out[~small] = _si_continued_fraction(ax[~small])
    out = np.copysign(out, np.atleast_1d(arr))
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


# ---------------------------------------------------------------------------
# quadrature


def _gk15(kernel, lo, hi):
    """Apply the 15-point rule to every panel [lo_i, hi_i] in one kernel call."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(kernel(x), dtype=float)
    if fx.shape != x.shape:
        fx = np.broadcast_to(fx, x.shape)
    if not np.all(np.isfinite(fx)):
        bad = x[~np.isfinite(fx)][0]
        raise InvalidArgumentError(f"kernel is not finite at x={bad!r}")
    kron = half * (fx @ _KRONROD_W)
    gauss = half * (fx @ _GAUSS_W)
    return kron, np.abs(kron - gauss)


def _initial_edges(a, b, breakpoints, initial_width):
    pts = [a, b]
    pts += [p for p in breakpoints if a < p < b]
    pts = sorted(set(pts))
    edges = [pts[0]]
    for lo, hi in zip(pts[:-1], pts[1:]):
        count = 1
        if initial_width is not None and initial_width > 0:
            count = max(1, int(math.ceil((hi - lo) / initial_width)))
        edges.extend(np.linspace(lo, hi, count + 1)[1:].tolist())
    return np.asarray(edges)


def integrate_adaptive(
    kernel: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-10,
    *,
    breakpoints: Sequence[float] = (),
    initial_width: float | None = None,
    max_panels: int = 2_000_000,
) -> QuadratureResult:
    """Integrate ``kernel`` over [a, b] by adaptive Gauss-Kronrod bisection.

    Parameters
    ----------
    kernel : callable
        Vectorised real function; called with 2-D arrays of abscissae.
    a, b : float
        Finite limits with a < b.
    tol : float
        Target accuracy: the estimated error is driven below
        ``max(tol, tol * |value|)``.
    breakpoints : sequence of float, optional
        Points inside (a, b) that must be panel edges (kinks, removable
        singularities).
    initial_width : float, optional
        Upper bound on the width of the starting panels. Oscillatory kernels
        should pass a fraction of their period here.
    max_panels : int
        Work limit. Exceeding it raises :class:`AccuracyError`.

    Returns
    -------
    QuadratureResult
    """
    if not (np.isfinite(a) and np.isfinite(b)) or not a < b:
        raise InvalidArgumentError(f"need finite a < b, got a={a}, b={b}")
    if not tol > 0:
        raise InvalidArgumentError("tol must be positive")

    edges = _initial_edges(float(a), float(b), breakpoints, initial_width)
    lo, hi = edges[:-1], edges[1:]
    val, err = _gk15(kernel, lo, hi)
    evaluations = 15 * lo.size
    # converged panels are frozen; their contributions are accumulated here
    done_val = np.zeros(0)
    done_err = np.zeros(0)
    length = float(b) - float(a)

    while True:
        total = np.sum(done_val) + np.sum(val)
        total_err = np.sum(done_err) + np.sum(err)
        target = max(tol, tol * abs(total))
        if total_err <= target or lo.size == 0:
            break
        # a panel passes when its error is below its share of the budget
        share = 0.5 * target * (hi - lo) / length
        passed = err <= share
        if np.all(passed):
            # shares already met but total still above target: refine the worst
            passed = err < np.max(err)
        done_val = np.concatenate([done_val, val[passed]])
        done_err = np.concatenate([done_err, err[passed]])
        lo, hi = lo[~passed], hi[~passed]
        if lo.size + done_val.size > max_panels:
            raise AccuracyError(
                f"integrate_adaptive exceeded {max_panels} panels "
                f"(estimate {total!r} +/- {total_err:.3g})",
                best_estimate=float(total),
            )
        mid = 0.5 * (lo + hi)
        if np.any((mid <= lo) | (mid >= hi)):
            raise AccuracyError(
                "panel width underflow in integrate_adaptive",
                best_estimate=float(total),
            )
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        val, err = _gk15(kernel, lo, hi)
        evaluations += 15 * lo.size

    value = float(np.sum(np.concatenate([done_val, val])))
    error = float(np.sum(np.concatenate([done_err, err])))
    return QuadratureResult(value=value, abs_error_estimate=error,
                            evaluations=evaluations)


def integrate_to_cutoff(
    kernel: Callable[[np.ndarray], np.ndarray],
    a: float,
    cutoffs: Sequence[float],
    tol: float = 1e-10,
    *,
    ratio: float = DIVERGENCE_RATIO,
    **kwargs,
) -> QuadratureResult:
    """Integrate ``kernel`` from ``a`` up to each cutoff in turn.

    The partial integrals are accumulated panel by panel, so each cutoff only
    costs the new interval. With at least three cutoffs the sequence is
    declared divergent when the last increment exceeds ``ratio`` times the
    previous one; ``value`` is then the last partial integral, a lower bound
    for a positive kernel. Extra keyword arguments go to
    :func:`integrate_adaptive`.
    """
    cuts = [float(c) for c in cutoffs]
    if not cuts:
        raise InvalidArgumentError("need at least one cutoff")
    if any(c <= a for c in cuts) or any(c2 <= c1 for c1, c2 in zip(cuts, cuts[1:])):
        raise InvalidArgumentError("cutoffs must be strictly ascending and above a")

    partials = []
    running = 0.0
    err = 0.0
    evaluations = 0
    left = float(a)
    for cut in cuts:
        piece = integrate_adaptive(kernel, left, cut, tol, **kwargs)
        running += piece.value
        err += piece.abs_error_estimate
        evaluations += piece.evaluations
        partials.append(running)
        left = cut

    diverged = False
    if len(partials) >= 3:
        inc = np.diff([0.0] + partials)
        diverged = bool(abs(inc[-1]) > ratio * abs(inc[-2]))
    return QuadratureResult(value=partials[-1], abs_error_estimate=err,
                            evaluations=evaluations, diverged=diverged,
                            partials=tuple(partials))
