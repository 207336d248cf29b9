"""Measurement-optimized classical correlations and discord in small spin chains."""
from .analysis import detect_factorization, fit_theta_opt, strategy_spread, sweep
from .infotheory import conditional_entropy, correlation_values, mutual_information, von_neumann_entropy
from .measure import Measurement, cic_povm, projective, rotate, sic_povm
from .optimize import OptResult, StrategySpec, optimize, strategy
from .rdm import pauli_correlators, rdm_from_correlators, two_site_rdm
from .spinchain import ModelSpec, ground_state, model_spec, symmetry_broken_ground_state

__all__ = [
    "ModelSpec", "model_spec", "ground_state", "symmetry_broken_ground_state",
    "two_site_rdm", "pauli_correlators", "rdm_from_correlators",
    "Measurement", "projective", "sic_povm", "cic_povm", "rotate",
    "von_neumann_entropy", "mutual_information", "conditional_entropy", "correlation_values",
    "StrategySpec", "OptResult", "strategy", "optimize",
    "sweep", "detect_factorization", "fit_theta_opt", "strategy_spread",
]
