"""Learn a three-variable lung-cancer abstraction under several assessment sets.

The same candidate space is scored against all cause/effect pairs, against
parent/child pairs only and against a single hand-picked pair. Smaller sets
need fewer matrix comparisons and may prefer different outcome maps.
"""
import time

from causalabs import learn
from causalabs.scenarios import build_lungcancer_scenario

bundle = build_lungcancer_scenario()
for name, j in bundle.assessment_sets.items():
    start = time.perf_counter()
    res = learn(bundle.base, bundle.high, bundle.abstraction, "isil", j, space=bundle.candidates)
    took = time.perf_counter() - start
    print(f"{name:>8}: error {res.error:.6f}, {len(j.pairs)} pairs, "
          f"{res.pairs_evaluated} pair evaluations, {took:.1f}s")
    for h in bundle.high.names:
        print(f"          {h} <- {res.abstraction.alphas[h].matrix.astype(int).tolist()}")
