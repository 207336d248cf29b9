"""Fit theta_opt = A sqrt(B - m^n) + k for the Ising chain on the ordered side."""
import json

import numpy as np

from optcorr.analysis import fit_points_from_rows, fit_theta_opt, sweep
from optcorr.spinchain import model_spec

spec = model_spec("ising", L=14, h=0.5)
rows = sweep(spec, np.linspace(0.1, 0.8, 15), strategies=("proj-rot",), model="ising")
pts = fit_points_from_rows(rows)
fit = fit_theta_opt(pts, n=8)
print(json.dumps({"A": fit.A, "B": fit.B, "k": fit.k, "rms": fit.residual, "n_points": len(pts)}, indent=2))
