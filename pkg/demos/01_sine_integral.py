"""
The sine integral behind the cavity decay law.

Si(z) is evaluated by its Taylor series up to |z| = 4 and by a continued
fraction for E1(iz) beyond. Here we compare against scipy's sici and watch
the approach to pi/2.
"""

import math

import numpy as np
from scipy.special import sici

from decobec.specfun import sine_integral

z = np.array([0.5, 1.0, 2.0, 4.0, 5.0, 10.0, 100.0, 1e4])
ours = sine_integral(z)
ref = sici(z)[0]
print(f"{'z':>8} {'Si(z)':>22} {'|ours - scipy|':>16}")
for zi, a, b in zip(z, ours, ref):
    print(f"{zi:8g} {a:22.16f} {abs(a - b):16.2e}")

# Si(z) - pi/2 oscillates like -cos(z)/z
for zi in (1e2, 1e4, 1e6):
    print(f"z = {zi:g}: Si - pi/2 = {sine_integral(zi) - math.pi / 2:+.3e}, "
          f"-cos(z)/z = {-math.cos(zi) / zi:+.3e}")
