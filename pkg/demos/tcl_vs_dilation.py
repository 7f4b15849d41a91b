# The second-order TCL master equation against the exact dilation.
import numpy as np

from effenv import ChannelSpec, CorrelationKernel, verify_conditions
from effenv.tcl import compare_with_dilation, tau_for_gamma_product

k = CorrelationKernel.exponential(1.0, 1.0)
s0 = (0.6, 0.0, 0.8)

for kind, r in (("dephasing", None), ("depolarizing", None), ("amplitude_damping", (0, 0, -0.5))):
    taus, dev, traj = compare_with_dilation(ChannelSpec(kind, r), k, s0, 5.0, points=6)
    print(f"{kind:18s} max deviation {dev.max():.1e}  trace drift {traj.trace_drift:.1e}")

# with a coarse fixed step count what remains is the RK4 error
spec = ChannelSpec("depolarizing")
devs = [compare_with_dilation(spec, k, s0, t, steps=8)[1][-1] for t in (1.0, 0.5, 0.25, 0.125)]
print("\n8 RK4 steps, tau halved:", ["%.2e" % d for d in devs])
print("observed orders:", np.round(np.log2(np.array(devs[:-1]) / devs[1:]), 2))

# short-time matching between the dilation couplings and the TCL rates
print()
for product in (0.04, 0.02, 0.01, 0.005):
    rep = verify_conditions(spec, k, tau_for_gamma_product(k, product))
    print(f"|gamma| tau = {product:<6} tau = {rep.tau:.4f}  relative mismatch {rep.relative_mismatch:.3%}")
