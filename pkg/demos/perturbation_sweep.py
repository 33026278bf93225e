"""Integrable MGM map (a = 3) against its cubic perturbations.

Only eps = 0 keeps the first integral; for eps != 0 the first Birkhoff
constant stays purely imaginary and nonzero while the finiteness certificate
becomes available, so the pipeline reports NOT_C6_INTEGRABLE.
"""

from birkhoffmaps.maps import build_map
from birkhoffmaps.report import analyze

print("eps       verdict               B1 at first elliptic point")
for eps in ("0", "1/100", "-1/100", "1/10", "-1/10"):
    m = build_map("apm", f="3*y/(1+y^2) + eps*y^3", eps=eps)
    rep = analyze(m, periods=(3, 4, 5))
    b1 = next((fp["birkhoff"]["constants"][0][1] for fp in rep["fixed_points"]
               if "birkhoff" in fp), None)
    b1s = "-" if b1 is None else f"{b1[0]:+.2e} {b1[1]:+.6f}i"
    print(f"{eps:<9s} {rep['verdict']['status']:<21s} {b1s}")
