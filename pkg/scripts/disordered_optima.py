"""Optimal measurement orientations in the disordered phases of the three reference models."""
from optcorr.analysis import solve_point, strategies_for
from optcorr.optimize import optimize
from optcorr.spinchain import model_spec

CASES = (("ising", 2.0), ("xxz", 0.0), ("xyx", 4.0))
NAMES = ("proj-rot", "sic-rot", "cic-rot", "cic-3par")

for model, h in CASES:
    spec = model_spec(model, L=12, h=h)
    rho = solve_point(spec).pair_rdm(1)
    for name, strat in zip(NAMES, strategies_for(spec, NAMES)):
        res = optimize(rho, strat)
        flat = "theta" if res.flat_theta else "phi" if res.flat_phi else "-"
        angles = ", ".join(f"({o.theta:.4f}, {o.phi:.4f})" for o in res.optima)
        print(f"{model:5s} h={h:<4} {name:9s} C_max={res.C_max:.6f} flat={flat:5s} optima={angles}")
