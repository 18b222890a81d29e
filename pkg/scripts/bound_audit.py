"""Empirical operator-norm, column-norm and coherence tails next to their bounds."""
from _tables import run

_, rows = run("bounds-vs-empirical", "bounds_vs_empirical.json", __doc__)
for r in rows:
    print(f"{r['quantity']:<34}{r['value']}")
