"""Search for the best two-variable summary of the LUCAS network.

Smoking maps to Sm' and the pair (coughing, fatigue) maps to a single
health variable Hea'. The learner tries every outcome map together with a
small menu of candidate mechanisms for Hea' and keeps the cheapest.
"""
from causalabs import learn
from causalabs.scenarios import build_health_scenario

bundle = build_health_scenario()
j = bundle.assessment_sets["causal"]
for kind in ("ic", "iil"):
    res = learn(bundle.base, bundle.high, bundle.abstraction, kind, j, space=bundle.candidates)
    print(f"[{kind}] best error {res.error:.6f} over {len(res.ranking)} candidates")
    print("  P(Hea'|Sm') =", res.mechanisms["Hea'"].matrix.tolist())
    print("  alpha Hea'  =", res.abstraction.alphas["Hea'"].matrix.astype(int).tolist())
    for cand in res.ranking[:3]:
        print(f"  #{cand.index:<3} {cand.error:.6f}")
