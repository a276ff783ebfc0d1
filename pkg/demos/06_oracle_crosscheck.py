"""
Brute force in a truncated Fock space against the closed forms.

Two field modes, condensate sectors with 0, 1 and 2 atoms: the overlaps of
the field states produced by exact evolution should equal O_mn.
"""

import numpy as np

from decobec import dephasing, model, oracle

grid = model.explicit_grid([1.0, -0.6], [0.2, 0.15 - 0.05j])
trunc = oracle.TruncationSpec(max_atoms=2, max_photons_per_mode=20, num_modes=2)
times = np.linspace(0.5, 10.0, 8)
series = oracle.single_well_field_series(grid, [0, 1, 2], times, trunc)
for i, t in enumerate(times):
    brute = np.vdot(series[0][i], series[2][i])
    closed = dephasing.decoherence_factor_discrete(0, 2, grid, t)
    print(f"t = {t:5.2f}  oracle {brute:.10f}  closed {closed:.10f}  gap {abs(brute - closed):.1e}")
