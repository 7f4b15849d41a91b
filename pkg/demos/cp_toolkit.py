# Superoperators, the Choi test and Kraus representations.
import numpy as np

from effenv import (ChannelSpec, CorrelationKernel, channel_superop, check_cp, extract_kraus,
                    remix_kraus, superop_from_kraus, superop_from_map)
from effenv.superop import random_unitary, superop_distance

# the transpose map is positive but not completely positive
transpose = superop_from_map(lambda x: x.T, 2)
report = check_cp(transpose)
print("transpose: Choi eigenvalues", report.choi_eigenvalues, "CP:", report.is_cp)

# every effective-environment channel passes, at every time and memory
worst = min(
    check_cp(channel_superop(ChannelSpec(kind), CorrelationKernel.exponential(1.0, tr), t)).min_eigenvalue
    for kind in ("dephasing", "depolarizing", "amplitude_damping")
    for tr in (0.1, 1.0, 10.0)
    for t in np.geomspace(1e-3, 10, 20)
)
print("worst Choi eigenvalue over 180 channels:", worst)

s = channel_superop(ChannelSpec("depolarizing"), CorrelationKernel.exponential(1.0, 1.0), 2.0)
kraus = extract_kraus(s)
print(f"\ndepolarizing at tau=2: {len(kraus.ops)} Kraus operators, "
      f"completeness residual {kraus.completeness_residual:.1e}")
for op in kraus.ops:
    print(np.round(op, 4))

# unitary remixing gives a different Kraus set for the same channel
rng = np.random.default_rng(7)
mixed = remix_kraus(kraus, random_unitary(6, rng), pad_zeros=2)
print("\nremixed set has", len(mixed.ops), "operators; superoperator distance",
      f"{superop_distance(superop_from_kraus(mixed), s):.1e}")
