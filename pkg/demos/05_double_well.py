"""
Tunnelling between two wells, suppressed by light scattering.

With no field coupling the population difference swings harmonically
between -alpha^2 and +alpha^2. A single field mode coupled to the tunnelling
term damps the swing. The compact (J, S) description is shown alongside;
it keeps the envelope but misses the offset phase carried by the kick terms.
"""

import math

import numpy as np

from decobec import doublewell, model

delta, alpha = 0.2, 1.0
period = math.pi / delta
times = np.linspace(0, 3 * period, 13)
free = model.explicit_grid([1.0], [0.0], tunnel_coupling=[0.0])
coupled = model.explicit_grid([1.0], [0.0], tunnel_coupling=[0.1])

bare = doublewell.tunneling_trace(alpha, free, delta, times)
trace = doublewell.tunneling_trace(alpha, coupled, delta, times)
print(f"{'t':>6} {'p (no field)':>13} {'p exact':>10} {'p compact':>10} {'J':>7} {'theta':>7}")
for i, t in enumerate(times):
    print(f"{t:6.2f} {bare.p_exact[i]:13.5f} {trace.p_exact[i]:10.5f} "
          f"{trace.p_compact[i]:10.5f} {trace.J[i]:7.4f} {trace.theta[i]:7.3f}")
