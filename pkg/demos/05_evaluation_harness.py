"""Evaluate the detector: scenario generation, threshold calibration,
contingency counting, formula comparison and rank correlation.

The same flows are scriptable through the CLI:
    staleobs generate --network net.bn --count 100 --seed 7 --labeled --output s.scn
    staleobs calibrate --network net.bn --scenarios s.scn --grid 1e-1,1e-2,1e-3
"""

from staleobs import (
    RankAssignment,
    calibrate_threshold,
    compare_formulas,
    detect,
    evaluate,
    generate_labeled_scenarios,
    parse_formula,
    rank_or_sets,
    recommend,
    spearman,
    tree_to_formula,
)
from staleobs.models import autonomy_case, load_extended_model

net = load_extended_model()

# Balanced synthetic scenarios with construction-planted ground truth.
labeled = generate_labeled_scenarios(net, 60, seed=7)
print(f"generated {len(labeled)} labeled scenarios "
      f"({sum(l.label for l in labeled)} contradictory)")

eps, table = calibrate_threshold(net, labeled, [1e-1, 1e-2, 1e-3])
print(f"calibrated threshold: {eps:g}")
print(f"  tp={table.tp} fn={table.fn} fp={table.fp} tn={table.tn} "
      f"(youden {table.youden:.3f})")

final = evaluate(net, labeled, eps)
print(f"accuracy at {eps:g}: {final.accuracy:.3f}")

# Formula translation and the two-level comparison.
from staleobs.detection import NewObservation, Observation, ObservationSet

scenario = ObservationSet(
    Observation(v, s, 1000.0 + i)
    for i, (v, s) in enumerate(
        [
            ("livesAlone", "yes"),
            ("driveCar", "weekly"),
            ("parkinson", "no"),
            ("strokeTIA", "no"),
            ("muscleImpairment", "no"),
        ]
    )
)
tree = detect(net, scenario, NewObservation("autonomyLoss", "lost", 2000.0))
formula = tree_to_formula(tree)
reference = parse_formula(
    "{or: muscleImpairment=no, parkinson=no, strokeTIA=no} "
    "{and: driveCar=weekly} {and: livesAlone=yes}"
)
report = compare_formulas(formula, reference)
print(f"\nformula comparison vs reference: {report.describe()}")

# Rank agreement between the recommender's OR ordering and a reviewer's.
rec = recommend(net, tree, NewObservation("autonomyLoss", "lost", 2000.0))
ours = rank_or_sets(rec)[0]
reviewer = RankAssignment(
    ranks={"muscleImpairment": 1, "strokeTIA": 2, "parkinson": 3}
)
print(f"our OR ranking:      {ours.ranks}")
print(f"reviewer's ranking:  {reviewer.ranks}")
print(f"rank correlation: {spearman(ours, reviewer):+.2f}")
