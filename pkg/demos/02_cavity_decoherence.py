"""
Dephasing in a cavity whose mode density falls off as 1/k^3.

The continuum integral over vacuum modes has a closed form in terms of Si.
We check the two against each other, then read off the long-time decay
rate, which does not depend on the pump frequency.
"""

import numpy as np

from decobec import dephasing, model

pump = model.PumpConfig(rabi_frequency=2.0, detuning=40.0, pump_frequency=1.0,
                        coupling_scale=model.calibrated_coupling_scale())
density = model.CavityInverseCubic(scale=1.0)
lam = model.lambda_mn(pump, density.scale, m=1, n=0)
print(f"lambda_10 = {lam:.4e}")

for t in (0.5, 2.0, 10.0, 50.0):
    q = dephasing.decoherence_norm_integral(1, 0, pump, density, t)
    closed = dephasing.decoherence_norm_cavity(lam, pump.pump_frequency, t)
    print(f"t = {t:5.1f}  quadrature {q.value:.12f}  closed form {closed:.12f}  "
          f"({q.evaluations} kernel calls)")

# -ln|O| grows like 2 pi lambda t at late times, whatever omega_0 is
lam = 5e-3
for w0 in (0.5, 1.0, 2.0, 4.0):
    t = np.linspace(500, 1000, 501) / w0
    slope = np.polyfit(t, -np.log(dephasing.decoherence_norm_cavity(lam, w0, t)), 1)[0]
    print(f"omega_0 = {w0}: slope / lambda = {slope / lam:.5f}   (2 pi = {2 * np.pi:.5f})")
