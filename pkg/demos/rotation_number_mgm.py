"""Rotation number and period along level curves of the MGM map (a = 1).

The map is integrable with first integral V = x^2 y^2 + x^2 + y^2 - x y, so
near the origin it is the time-tau map of the Lie symmetry field X.  Writing
F = phi(tau, .) on each curve gives theta(h) = tau(h)/T(h), which tends to
arg(lambda)/2pi = 1/6 and is not constant.  Because of that the averaged
Bochner map conjugates F to the level-dependent rotation exp(theta DY), not
to DF(p).
"""

import numpy as np

from birkhoffmaps import FirstIntegral, isochronous_rescale, level_curve_sample, lie_symmetry_field
from birkhoffmaps.dynamics import bochner_residual
from birkhoffmaps.maps import build_map

m = build_map("mgm", a=1)
V = FirstIntegral.of_model(m)
X = lie_symmetry_field(V, model=m, p=(0.0, 0.0))

print("    r          h             T            theta        theta - 1/6")
for r in np.geomspace(0.5, 0.005, 8):
    s = level_curve_sample(X, m, (r, 0.0))
    print(f"{r:8.4f}  {s.h:.6e}  {s.T:.10f}  {s.theta:.10f}  {s.theta - 1 / 6:+.3e}")

Y = isochronous_rescale(X)
qs = [(r, 0.0) for r in (0.05, 0.1)]
st = bochner_residual(Y, m, (0.0, 0.0), qs)
print(f"\nBochner residual against DF(p):           {st.max_residual:.3e}")
print(f"Bochner residual against exp(theta DY(p)): {st.max_curve_residual:.3e}")
