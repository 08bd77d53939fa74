"""Detect which stored observations a new one contradicts.

The stored record describes a healthy, active woman: no diseases, drives
weekly, shops weekly, gets up and lives alone.  Then the news arrives that
she has lost her autonomy.  The detector walks three steps: restrict the
stored set to the variables that still matter, split them into dependency
groups with certainly/possibly obsolete members, and compose the AND-OR tree.
"""

from staleobs import decompose, detect, is_contradictory, render_tree, restrict
from staleobs.models import autonomy_case, load_autonomy_fragment

net = load_autonomy_fragment()
stored, new = autonomy_case()

print("stored record:")
for obs in stored:
    print(f"  {obs.variable} = {obs.state}")
print(f"\nnew certain observation: {new.variable} = {new.state}")

contradiction = is_contradictory(net, stored, new, epsilon=1e-2)
print(f"\ncontradiction at epsilon 1e-2? {contradiction}")

# Step 1: drop stored observations that are conditionally independent of the
# new variable given the rest; they cannot take part in the contradiction.
restricted = restrict(net, stored, new)
dropped = sorted(stored.variables - restricted.variables)
print(f"step 1 drops {dropped}, keeps {len(restricted)} observations")

# Step 2: dependency groups with AND (certainly obsolete) and OR (at least
# one obsolete) members.
groups = decompose(net, restricted, new, epsilon=1e-2)
print("\nstep 2 groups:")
for g in groups:
    and_part = [o.variable for o in g.and_set]
    or_part = [o.variable for o in g.or_set]
    print(f"  AND {and_part or '{}'}  OR {or_part or '{}'}")

# Step 3: the whole pipeline in one call, composed as an AND-OR tree.
tree = detect(net, stored, new)
print("\nstep 3 AND-OR tree:")
print(render_tree(tree))

print("reading: every group must be resolved; within the OR child at least")
print("one of the four disease absences is stale, all AND leaves certainly are.")
