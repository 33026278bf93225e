"""Exact determinants behind the Cohen finiteness certificate.

Every N-periodic orbit solves a system of products of linear forms; choosing
one factor per equation gives the circulant-like matrices A_N(eps).  All their
determinants have the parity of the Fibonacci number F_N, so none vanish
unless 3 divides N.
"""

import sys

from birkhoffmaps.finiteness import cohen_sign_scan, cohen_toeplitz_sequences

led = cohen_toeplitz_sequences(24)
print("n   t_n  det A_n(1,...,1)  F_n mod 2")
for n in range(3, 25):
    print(f"{n:<3d} {led.t[n]:>3d}  {led.a[n]:>16d}  {led.fib_parity[n - 2]:>9d}")

print("\nN   determinants  parity-constant  first singular sign vector")
for N in range(3, 13):
    scan = cohen_sign_scan(N)
    hit = scan.kernel_witness()
    tail = "-" if hit is None else f"{hit[0]} -> kernel {[str(v) for v in hit[1]]}"
    print(f"{N:<3d} {scan.dets.size:>12d}  {str(scan.parity_constant()):>15s}  {tail}")

if len(sys.argv) > 1:
    cohen_sign_scan(10).to_csv(sys.argv[1])
    print(f"\nwrote N = 10 sign determinants to {sys.argv[1]}")
