"""Sweep asserted entropies for the GF(2^n)-multiplication extractor and
print how the guaranteed error degrades from the plain model through the
classical and quantum Markov models.

Run:  python3 demos/plan_security_levels.py
"""
import math

from markovext import (
    classical_markov_transfer,
    deor_error,
    quantum_markov_transfer,
    solve_self_consistent_error,
)

n, m = 64, 4

print(f"two-source extractor: n={n}, m={m} output bits")
print(f"{'k1=k2':>6}  {'plain':>12}  {'classical':>12}  {'quantum':>12}")
for k in range(40, 65, 4):
    plain = deor_error(n, k, k, m)
    # solve eps = law(k - log(1/eps)) so the Markov thresholds land on k
    law = lambda a, b: deor_error(n, a, b, m)
    eps = solve_self_consistent_error(law, k, k)
    if eps >= 1.0:
        classical = quantum = 1.0
    else:
        shift = math.log2(eps)
        classical = classical_markov_transfer((k + shift, k + shift), eps, 2, m).error
        quantum = quantum_markov_transfer((k + shift, k + shift), eps, 2, m).error
    print(f"{k:>6}  {plain:>12.3e}  {classical:>12.3e}  {quantum:>12.3e}")

print()
print("the quantum-Markov guarantee pays a square root plus a 2^(m-2) factor,")
print("so it needs noticeably more entropy headroom than the classical one.")
