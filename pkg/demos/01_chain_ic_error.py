"""Abstraction error of a three-variable chain collapsed onto two variables.

The base model is Sm -> Tar -> LC; the abstraction keeps Sm and LC and
drops Tar. Intervening on smoking and then abstracting gives a different
cancer distribution from abstracting first and then intervening, and the
gap is the interventional consistency error.
"""
import numpy as np

from causalabs import alpha_for_set, build_assessment_set, interventional_matrix, overall_error
from causalabs.scenarios import build_reference_models, chain_abstraction

models = build_reference_models()
base, high, abs_ = models["a"], models["b"], chain_abstraction()

mu = interventional_matrix(base, ["Sm"], ["LC"]).matrix
nu = interventional_matrix(high, ["Sm'"], ["Hea'"]).matrix
lifted = alpha_for_set(abs_, ["Hea'"]).matrix @ mu
print("intervene then abstract:\n", np.round(lifted, 4))
print("abstract then intervene:\n", np.round(nu, 4))

for kind in ("ic", "iil", "isil", "isc"):
    report = overall_error(kind, base, high, abs_, build_assessment_set("causal", high))
    print(f"{kind:>4}: {report.value:.6f}")
