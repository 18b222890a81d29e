"""Mean mutual coherence against fractional bandwidth for each ensemble."""
from _tables import run

_, rows = run("coherence-sweep", "coherence_sweep.json", __doc__)
print(f"\n{'ensemble':<22}{'ratio':>7}{'mean mu':>10}{'std':>9}")
for r in rows:
    print(f"{r['ensemble']:<22}{float(r['ratio']):>7g}{float(r['mean_mu']):>10.4f}"
          f"{float(r['std_mu']):>9.4f}")
