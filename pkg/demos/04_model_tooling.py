"""Model construction utilities: discretization and network linting."""

import numpy as np

from staleobs import equal_frequency_discretize, load_network, validate_network
from staleobs.modeltools import dump_scheme
from staleobs.models import load_core_model, load_extended_model

# Equal-frequency discretization: ages into bands with near-equal counts.
rng = np.random.default_rng(3)
ages = sorted(int(a) for a in rng.normal(78, 9, size=200).clip(55, 99))
scheme = equal_frequency_discretize(
    ages, bins=4, variable="age", labels=("a55_63", "a64_72", "a73_81", "a82_plus")
)
print("age cut points:", scheme.boundaries)
counts = [0] * 4
for a in ages:
    counts[scheme.interval_index(a)] += 1
print("per-band counts:", counts)
print("\nsidecar form:")
print(dump_scheme(scheme))

# Duplicated values never split across bins.
values = [1, 1, 1, 1, 2, 3]
dup = equal_frequency_discretize(values, bins=2)
print(f"values {values} -> cut {dup.boundaries}, counts 4/2 (run of 1s stays whole)")

# Network linting: findings, not failures.
print("\nshipped models:")
for name, net in (("core", load_core_model()), ("extended", load_extended_model())):
    report = validate_network(net)
    print(f"  {name}: {'clean' if report.ok else report.findings}")

broken = load_network(
    """
bn 1
var A no yes
var B no yes
edge A B
cpt A
0.5 0.5
cpt B | A
0.99999 0.00001
0.5 0.5
"""
)
report = validate_network(broken)
print("\ntiny entry got clamped on load; the linter reports it:")
for finding in report.findings:
    print(f"  [{finding.kind}] {finding.variable}: {finding.detail}")
