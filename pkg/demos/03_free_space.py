"""
Without a cavity the same integral grows with the ultraviolet cutoff.

The exponent is integrated to 1e2, 1e3 and 1e4 times omega_0/c. It keeps
growing, so the result is flagged as divergent and |O| is reported as 0.
"""

from decobec import dephasing, model

pump = model.PumpConfig(rabi_frequency=1.0, detuning=40.0, pump_frequency=1.0)
for t in (0.5, 2.0):
    q = dephasing.decoherence_norm_integral(1, 0, pump, model.FreeSpace(), t)
    print(f"t = {t}: exponents {', '.join(f'{p:.4g}' for p in q.partials)}; "
          f"diverged = {q.diverged}, |O| = {q.value}")
