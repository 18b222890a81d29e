"""Recovery success rate over (fractional bandwidth, sparsity) per ensemble.

The default config is the full grid; pass ``--config configs/phase_transition_quick.json``
for the coarse grid used by the acceptance suite.
"""
from _tables import pivot, run

_, rows = run("phase-transition", "phase_transition.json", __doc__)
pivot(rows, "ensemble", "ratio", "K", "success_rate")
