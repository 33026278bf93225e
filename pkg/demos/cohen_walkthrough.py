"""Cohen map end to end: fixed point, spectrum, B1 by two routes, finiteness."""

import numpy as np

from birkhoffmaps import (
    b1_closed_form,
    birkhoff_constants,
    build_map,
    certify_finiteness,
    classify_elliptic,
    diagonalize,
    find_fixed_points,
)

m = build_map("cohen")
(p,) = find_fixed_points(m)
print(f"fixed point      {p}")

rep = classify_elliptic(m, p, k_max=5)
print(f"lambda           {rep.lam:.12f}  (|lambda| - 1 = {rep.modulus_defect:.1e})")
print(f"theta            {rep.theta / (2 * np.pi):.12f} turns, resonances <= 5: {rep.resonance_orders}")

jet = m.jet(p, 5)
closed = b1_closed_form(diagonalize(jet))
res = birkhoff_constants(jet, p, n_max=2)
print(f"B1 closed form   {closed:.12f}")
for n, b in res.constants:
    print(f"B{n} eliminated   {b:.12f}")
print(f"i sqrt(15)/32    {1j * np.sqrt(15) / 32:.12f}")

print("\nN   status             method")
for N in range(3, 19):
    c = certify_finiteness(m, N)
    print(f"{N:<3d} {c.status.value:<18s} {c.method}"
          + (f"  witness {[str(v) for v in c.witness[:4]]}..." if c.witness else ""))
