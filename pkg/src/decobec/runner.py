"""
Scenario dispatch, parameter sweeps and output writing.
"""

from __future__ import annotations

import itertools
import json
import math
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from . import __version__
from . import dephasing, doublewell, model, oracle
from .config import ScenarioConfig, apply_override, config_hash
from .errors import AccuracyError, DecobecError, InvalidArgumentError, ResourceError

__all__ = ["RunManifest", "run", "build_grid", "scenario_columns", "OUTPUT_DIR_ENV"]

OUTPUT_DIR_ENV = "DECOBEC_OUTPUT_DIR"
_DEFAULT_OUTPUT_DIR = "decobec_out"

# (name, unit, values)
Column = Tuple[str, str, np.ndarray]


@dataclass
class RunManifest:
    config_hash: str
    artifact_version: str
    wall_time: float
    outputs: List[str]
    scenario: str = ""
    failures: List[str] = field(default_factory=list)
    max_deviation: Optional[float] = None

    def to_json(self) -> str:
        data = {
            "config-hash": self.config_hash,
            "artifact-version": self.artifact_version,
            "wall-time": self.wall_time,
            "outputs": self.outputs,
            "scenario": self.scenario,
            "failures": self.failures,
        }
        if self.max_deviation is not None:
            data["max-deviation"] = self.max_deviation
        return json.dumps(data, indent=2)


# ---------------------------------------------------------------------------
# building physics objects from a config


def _pump(cfg: ScenarioConfig) -> model.PumpConfig:
    p = cfg.pump
    scale = p.coupling_scale
    if scale == "calibrated":
        scale = model.calibrated_coupling_scale(cfg.units.hbar)
    return model.PumpConfig(p.rabi_frequency, p.detuning, p.pump_frequency, p.dipole, scale)


def _density(cfg: ScenarioConfig):
    d = cfg.density
    if d.kind == "free_space":
        return model.FreeSpace()
    if d.kind == "cavity_inverse_cubic":
        return model.CavityInverseCubic(d.scale)
    return model.Tabulated(tuple(tuple(s) for s in d.samples))


def _geometry(cfg: ScenarioConfig):
    g = cfg.geometry
    if g.kind == "single_well":
        return model.SingleWell(g.width, g.trap_frequency)
    return model.DoubleWell(g.separation, g.local_width, g.barrier_height, g.mass,
                            g.splitting_scale)


def build_grid(cfg: ScenarioConfig) -> model.ModeGrid:
    g = cfg.grid
    if g.kind == "explicit":
        omega = [m.omega for m in g.modes]
        coupling = [complex(m.coupling, m.coupling_imag) for m in g.modes]
        weight = [m.weight for m in g.modes]
        tunnel = None
        if cfg.geometry.kind == "double_well":
            tunnel = [complex(m.tunnel_coupling, m.tunnel_coupling_imag) for m in g.modes]
        return model.explicit_grid(omega, coupling, weight, tunnel, c=cfg.units.c)
    spec = model.GridSpec(g.k_min, g.k_max, g.n_radial, g.n_angular)
    return model.build_mode_grid(_pump(cfg), _geometry(cfg), _density(cfg), spec,
                                 cfg.units.hbar, cfg.units.c)


def _times(cfg: ScenarioConfig) -> np.ndarray:
    t = cfg.times
    return np.linspace(t.t_start, t.t_end, t.steps)


def _initial_amplitudes(cfg: ScenarioConfig) -> np.ndarray:
    if cfg.params.amplitudes is not None:
        return np.asarray(cfg.params.amplitudes, dtype=complex)
    weights = doublewell.poisson_weights(cfg.params.alpha, cfg.params.tail_tol)
    c = dephasing.coherent_amplitudes(cfg.params.alpha, weights.size - 1)
    return c / np.linalg.norm(c)


def _delta(cfg: ScenarioConfig) -> float:
    if cfg.params.delta is not None:
        return cfg.params.delta
    return model.splitting_delta(_geometry(cfg), cfg.units.hbar)


def _lam(cfg: ScenarioConfig) -> float:
    if cfg.params.lam is not None:
        return cfg.params.lam
    return model.lambda_mn(_pump(cfg), cfg.density.scale, cfg.params.m, cfg.params.n,
                           cfg.units.hbar)


# ---------------------------------------------------------------------------
# scenarios; each returns a list of columns sharing the time axis


def _fig1(cfg: ScenarioConfig, times) -> List[Column]:
    norm = dephasing.decoherence_norm_cavity(_lam(cfg), cfg.pump.pump_frequency, times,
                                             cfg.params.variant)
    m, n = cfg.params.m, cfg.params.n
    return [(f"abs_O_{m}{n}", "1", np.asarray(norm))]


def _trace_columns(cfg: ScenarioConfig, times, full: bool) -> List[Column]:
    grid = build_grid(cfg)
    tr = doublewell.tunneling_trace(cfg.params.alpha, grid, _delta(cfg), times,
                                    cfg.params.n_ref, cfg.params.tail_tol, cfg.params.variant)
    cols = [("p_exact", "atoms", tr.p_exact), ("p_compact", "atoms", tr.p_compact),
            ("J", "1", tr.J)]
    if full:
        cols.append(("S", "rad", tr.S))
    cols.append(("theta", "rad", tr.theta))
    return cols


def _single_well(cfg: ScenarioConfig, times) -> List[Column]:
    c = _initial_amplitudes(cfg)
    top = min(cfg.params.max_sector, c.size - 1)
    pairs = [(m, n) for m in range(top + 1) for n in range(m + 1, top + 1)]
    cols: List[Column] = []
    if cfg.params.method == "continuum":
        pump, density = _pump(cfg), _density(cfg)
        for m, n in pairs:
            norms, flags = np.empty_like(times), np.empty_like(times)
            for i, t in enumerate(times):
                q = dephasing.decoherence_norm_integral(
                    m, n, pump, density, t, cfg.params.tolerance, cfg.params.k_max,
                    cfg.units.hbar, cfg.units.c)
                norms[i], flags[i] = q.value, float(q.diverged)
            cols.append((f"abs_O_{m}{n}", "1", norms))
            cols.append((f"diverged_{m}{n}", "bool", flags))
            cols.append((f"abs_rho_{m}{n}", "1", abs(c[m] * c[n]) * norms))
        return cols

    grid = build_grid(cfg)
    kappa = cfg.params.kappa
    if kappa is None:
        geom = _geometry(cfg)
        kappa = model.kappa_from_trap(geom, cfg.params.g_aa) if isinstance(geom, model.SingleWell) else 0.0
    rhos = [dephasing.reduced_density_matrix(
        dephasing.evolve_entangled_state(c, grid, cfg.params.condensate_frequency, kappa, t))
        for t in times]
    for m, n in pairs:
        cols.append((f"abs_O_{m}{n}", "1",
                     np.array([abs(dephasing.decoherence_factor_discrete(m, n, grid, t))
                               for t in times])))
        cols.append((f"abs_rho_{m}{n}", "1", np.array([abs(r[m, n]) for r in rhos])))
    cols.append(("purity", "1", np.array([dephasing.purity(r) for r in rhos])))
    return cols


def _oracle_check(cfg: ScenarioConfig, times) -> Tuple[List[Column], float]:
    grid = build_grid(cfg)
    tr = cfg.truncation
    spec = oracle.TruncationSpec(tr.max_atoms, tr.max_photons_per_mode, len(grid), tr.cap)
    cols: List[Column] = []
    if cfg.geometry.kind == "double_well":
        c = _initial_amplitudes(cfg)[: tr.max_atoms + 1]
        c = c / np.linalg.norm(c)
        weights = np.abs(c) ** 2
        delta = _delta(cfg)
        closed = np.array([doublewell.population_difference(weights, grid, delta, t)
                           for t in times])

        def observe(trunc):
            return oracle.double_well_population_difference(grid, c, 0.0, delta, times, trunc)

        brute = observe(spec)
        cols += [("p_closed", "atoms", closed), ("p_oracle", "atoms", brute)]
        deviation = float(np.max(np.abs(closed - brute)))
        gate = lambda trunc: observe(trunc)[-1:]  # noqa: E731
    else:
        sectors = list(range(tr.max_atoms + 1))
        pairs = [(m, n) for m in sectors for n in sectors if m < n]
        deviation = 0.0
        closed_cols = {p: np.empty(times.size, complex) for p in pairs}
        brute_cols = {p: np.empty(times.size, complex) for p in pairs}
        for i, t in enumerate(times):
            states = oracle.single_well_field_states(grid, sectors, t, spec)
            for m, n in pairs:
                closed_cols[(m, n)][i] = dephasing.decoherence_factor_discrete(m, n, grid, t)
                brute_cols[(m, n)][i] = np.vdot(states[m], states[n])
        for m, n in pairs:
            a, b = closed_cols[(m, n)], brute_cols[(m, n)]
            deviation = max(deviation, float(np.max(np.abs(a - b))))
            cols += [(f"re_O_{m}{n}_closed", "1", a.real), (f"im_O_{m}{n}_closed", "1", a.imag),
                     (f"re_O_{m}{n}_oracle", "1", b.real), (f"im_O_{m}{n}_oracle", "1", b.imag)]
        t_last = float(times[-1])

        def gate(trunc):
            st = oracle.single_well_field_states(grid, sectors, t_last, trunc)
            return np.array([np.vdot(st[m], st[n]) for m, n in pairs])

    converged, change = oracle.truncation_converged(gate, spec)
    if not converged:
        raise AccuracyError(f"truncation not converged: doubling photons changed "
                            f"observables by {change:.3g}")
    return cols, deviation


def scenario_columns(cfg: ScenarioConfig) -> Tuple[List[Column], Optional[float]]:
    times = _times(cfg)
    if cfg.scenario in ("fig1a", "fig1b"):
        return _fig1(cfg, times), None
    if cfg.scenario == "fig2":
        return _trace_columns(cfg, times, full=False), None
    if cfg.scenario == "double_well":
        return _trace_columns(cfg, times, full=True), None
    if cfg.scenario == "single_well":
        return _single_well(cfg, times), None
    if cfg.scenario == "oracle_check":
        return _oracle_check(cfg, times)
    raise InvalidArgumentError(f"unknown scenario {cfg.scenario}")  # pragma: no cover


# ---------------------------------------------------------------------------
# output


def _fmt(x: float) -> str:
    # shortest round-trip repr; -0.0 folded to 0.0 for stable files
    v = float(x)
    if not math.isfinite(v):
        raise AccuracyError(f"refusing to write non-finite value {v!r}")
    return repr(v + 0.0)


def _sweep_points(cfg: ScenarioConfig):
    if not cfg.sweep:
        return [()]
    axes = [[(e.path, v) for v in e.values] for e in cfg.sweep]
    return list(itertools.product(*axes))


def _label(point) -> str:
    return ";".join(f"{p}={v!r}" for p, v in point)


def _evaluate_point(cfg: ScenarioConfig, point):
    local = cfg
    for path, value in point:
        local = apply_override(local, path, value)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        try:
            cols, deviation = scenario_columns(local)
            return cols, deviation, None
        except ResourceError:
            raise
        except DecobecError as exc:
            return None, None, f"{_label(point) or 'base'}: {exc}"


def run(cfg: ScenarioConfig, out_dir=None, workers: Optional[int] = None,
        fmt: Optional[str] = None) -> RunManifest:
    """Evaluate every sweep point of ``cfg`` and write one table plus a manifest."""
    start = time.perf_counter()
    fmt = fmt or cfg.output.format
    out_dir = Path(out_dir or cfg.output.directory
                   or os.environ.get(OUTPUT_DIR_ENV, _DEFAULT_OUTPUT_DIR))
    out_dir.mkdir(parents=True, exist_ok=True)
    workers = workers or cfg.workers
    digest = config_hash(cfg)

    points = _sweep_points(cfg)
    if workers > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda p: _evaluate_point(cfg, p), points))
    else:
        results = [_evaluate_point(cfg, p) for p in points]

    times = _times(cfg)
    header = [("t", "time")]
    table = [times]
    failures = []
    deviations = []
    template = next((r[0] for r in results if r[0] is not None), None)
    for point, (cols, deviation, failure) in zip(points, results):
        suffix = f"[{_label(point)}]" if point else ""
        if failure is not None:
            failures.append(failure)
            for name, unit, _ in (template or []):
                header.append((name + suffix, unit))
                table.append(np.zeros_like(times))
        else:
            for name, unit, values in cols:
                header.append((name + suffix, unit))
                table.append(np.asarray(values, dtype=float))
            if deviation is not None:
                deviations.append(deviation)
        if len(points) > 1 or failure is not None:
            header.append(("failed" + suffix, "bool"))
            table.append(np.full_like(times, 1.0 if failure else 0.0))

    path = out_dir / f"{cfg.scenario}_{digest}.{fmt}"
    names = [f"{name} [{unit}]" for name, unit in header]
    if fmt == "csv":
        lines = [",".join(names)]
        for row in zip(*table):
            lines.append(",".join(_fmt(v) for v in row))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    else:
        for col in table:
            for v in col:
                _fmt(v)
        payload = {"columns": names, "data": [[float(v) + 0.0 for v in col] for col in table]}
        path.write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")

    manifest = RunManifest(
        config_hash=digest, artifact_version=__version__,
        wall_time=time.perf_counter() - start, outputs=[str(path)],
        scenario=cfg.scenario, failures=failures,
        max_deviation=max(deviations) if deviations else None)
    manifest_path = out_dir / "manifest.json"
    manifest.outputs.append(str(manifest_path))
    manifest_path.write_text(manifest.to_json() + "\n", encoding="utf-8")
    return manifest
