"""
A coherent condensate entangles with the scattered light.

On a discretised vacuum we evolve sum_n c_n |n>|0>, trace out the field and
look at the reduced density matrix: populations stay put while coherences
decay, and the purity drops.
"""

import numpy as np

from decobec import dephasing, model

pump = model.PumpConfig(rabi_frequency=4.0, detuning=20.0, pump_frequency=1.0,
                        coupling_scale=model.calibrated_coupling_scale())
geometry = model.SingleWell(width=0.5)
grid = model.build_mode_grid(pump, geometry, model.CavityInverseCubic(50.0),
                             model.GridSpec(0.2, 5.0, n_radial=48, n_angular=3))
print(f"{len(grid)} modes")

c = dephasing.coherent_amplitudes(1.0, 12)
c /= np.linalg.norm(c)
for t in (0.0, 5.0, 20.0, 80.0):
    state = dephasing.evolve_entangled_state(c, grid, omega0=1.0, kappa=0.05, t=t)
    rho = dephasing.reduced_density_matrix(state)
    print(f"t = {t:5.1f}  rho_00 = {rho[0, 0].real:.4f}  |rho_01| = {abs(rho[0, 1]):.4f}  "
          f"|rho_02| = {abs(rho[0, 2]):.4f}  purity = {dephasing.purity(rho):.4f}")
