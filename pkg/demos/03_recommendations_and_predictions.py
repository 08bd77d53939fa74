"""Turn a detection tree into prioritised update recommendations.

OR leaves get their posterior given the new observation and are ordered
ascending, so the least plausible stored value is checked first.  Every leaf
carries the most likely replacement value.  Separately, missing attributes
can be predicted from the whole record.
"""

from staleobs import detect, predict, recommend, render_recommendation_tree
from staleobs.models import autonomy_case, load_autonomy_fragment

net = load_autonomy_fragment()
stored, new = autonomy_case()

tree = detect(net, stored, new)
rec = recommend(net, tree, new)

print("annotated recommendation tree:")
print(render_recommendation_tree(rec))

or_group = next(g for g in rec.groups if g.or_set)
print("review order for the disease group (ascending posterior):")
for leaf in or_group.or_set:
    print(
        f"  ask about {leaf.variable:18s} stored={leaf.old_state:4s} "
        f"P(stored|new)={leaf.posterior:.3f}  propose {leaf.proposed_state} "
        f"(p={leaf.proposed_prob:.3f})"
    )
print("\nmuscleImpairment comes first: it is the least compatible with the news.")

# Prediction service: fill in attributes the record does not carry.
partial = stored.without("getUpAlone", "livesAlone")
for target in ("getUpAlone", "livesAlone", "autonomyLoss"):
    p = predict(net, partial, target)
    print(f"predict {p.variable} = {p.state} (confidence {p.confidence:.2f})")
