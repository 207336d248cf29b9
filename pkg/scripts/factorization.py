"""Locate the factorizing field from the mutual information minimum and compare with the closed form."""
from optcorr.analysis import detect_factorization, factorization_field_for_couplings
from optcorr.spinchain import model_spec

for L in (8, 10, 12):
    spec = model_spec("xyx", L=L, h=3.0)
    res = detect_factorization(spec, 2.8, 3.6, tol=1e-3)
    h_f = factorization_field_for_couplings(spec.Jx, spec.Jy, spec.Jz)
    print(f"xyx L={L:2d}: h_min={res.h_min:.4f} I_min={res.I_min:.3e} formula={h_f:.4f} evals={res.n_evals}")
