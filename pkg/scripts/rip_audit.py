"""Brute-force RIP constants against the Gershgorin bound on small instances."""
from _tables import run

_, rows = run("rip-audit", "rip_audit.json", __doc__)
print(f"\n{'K':>3}{'median brute':>14}{'median gershgorin':>19}")
for K in sorted({int(r["K"]) for r in rows}):
    b = sorted(float(r["delta_bruteforce"]) for r in rows if int(r["K"]) == K)
    g = sorted(float(r["delta_gershgorin"]) for r in rows if int(r["K"]) == K)
    print(f"{K:>3}{b[len(b) // 2]:>14.4f}{g[len(g) // 2]:>19.4f}")
