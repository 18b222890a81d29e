"""Mean relative MSE in dB over (SNR, sparsity) per ensemble."""
from _tables import pivot, run

_, rows = run("snr-grid", "snr_grid.json", __doc__)
pivot(rows, "ensemble", "snr_db", "K", "mean_mse_db", fmt="{:>7.1f}")
