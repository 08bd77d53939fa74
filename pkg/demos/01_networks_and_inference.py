"""Build, load and query a discrete causal Bayesian network.

Walks through the text format, exact posterior queries, joint probabilities
and the graphical independence test on the shipped autonomy-loss fragment.
"""

from staleobs import d_separated, dump_network, joint_probability, load_network, posterior, prob_of
from staleobs.models import load_autonomy_fragment, model_path_text

# Networks live in a line-oriented text format: a header, variables with
# their state lists, edges, then one CPT block per variable.
document = model_path_text("autonomy_fragment.bn")
print("--- first lines of the shipped fragment ---")
print("\n".join(document.splitlines()[:12]))

net = load_autonomy_fragment()
print(f"\nloaded {len(net.variables)} variables, {len(net.edges)} edges")

# Prior marginals come from posterior queries with empty evidence.
prior = posterior(net, {}, "autonomyLoss")
print(f"\nP(autonomyLoss) = {prior}")

# Conditioning moves beliefs: an observed stroke raises the risk.
after_stroke = posterior(net, {"strokeTIA": "yes"}, "autonomyLoss")
print(f"P(autonomyLoss | strokeTIA=yes) = {after_stroke}")

# Scalar convenience for one (variable, state) pair.
p = prob_of(net, {"livesAlone": "yes"}, ("autonomyLoss", "lost"))
print(f"P(lost | livesAlone=yes) = {p:.5f}   (living alone argues against it)")

# Joint probability of a full assignment is the chain-rule product.
assignment = {v.name: v.states[0] for v in net.variables}
print(f"\nP(everything at first state) = {joint_probability(net, assignment):.3e}")

# d-separation asks about the graph alone, no numbers involved.
blocked = d_separated(net, "sex", "autonomyLoss", {"dementia"})
print(f"\nsex independent of autonomyLoss given dementia? {blocked}")
active = d_separated(net, "visionPb", "autonomyLoss", {"driveCar"})
print(f"visionPb independent of autonomyLoss given driveCar? {active} (collider opened)")

# Round-trip: serialise and re-load.
again = load_network(dump_network(net))
print(f"\nround trip preserves {len(again.variables)} variables")
