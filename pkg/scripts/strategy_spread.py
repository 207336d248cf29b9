"""Spread of the optimized classical correlations across rotated strategies versus field."""
import numpy as np

from optcorr.analysis import solve_point, strategies_for, strategy_spread
from optcorr.spinchain import model_spec

NAMES = ("proj-rot", "sic-rot", "cic-rot", "cic-3par")

for model, grid, r_list in (("ising", np.linspace(0.2, 2.0, 10), (1, 6)), ("xyx", np.arange(2.0, 4.41, 0.2), (1, 4))):
    for h in grid:
        spec = model_spec(model, L=12, h=float(h))
        point = solve_point(spec)
        strats = strategies_for(spec, NAMES)
        vals = "  ".join(f"r={r}: {strategy_spread(point.pair_rdm(r), strats):.3e}" for r in r_list)
        print(f"{model:5s} h={h:5.2f}  {vals}")
