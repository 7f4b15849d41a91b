# Decay envelope exp(-4 Gamma) for an exponential memory kernel.
# Longer memory keeps the coherence alive longer.
import math

import numpy as np

from effenv import CorrelationKernel, decay, gamma

kappa = 1.0
taus = np.linspace(0, 5, 11)
kernels = {tr: CorrelationKernel.exponential(kappa, tr) for tr in (0.1, 1.0, 10.0)}

print("tau    markov   k.tr=0.1  k.tr=1    k.tr=10")
for t in taus:
    row = [math.exp(-kappa * t)] + [decay(k, t) for k in kernels.values()]
    print(f"{t:4.1f}  " + "  ".join(f"{v:.5f}" for v in row))

# the rate climbs to kappa/4 on the memory time scale
print()
for tr, k in kernels.items():
    print(f"k.tr={tr:<5} gamma(1)={gamma(k, 1.0):.4f}  gamma(5)={gamma(k, 5.0):.4f}  (limit {kappa / 4})")

# a short memory is close to Markovian but keeps an offset of about e^{kappa tau_r}
k = kernels[0.1]
dev = max(abs(decay(k, t) - math.exp(-t)) for t in np.linspace(0, 5, 2001))
print(f"\nmax |decay(k.tr=0.1) - e^-tau| = {dev:.4f}")
