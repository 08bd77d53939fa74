import pytest

from staleobs.detection import is_contradictory
from staleobs.evaluation import parse_formula
from staleobs.inference import evidence_probability, prob_of
from staleobs.models import load_autonomy_fragment, load_extended_model
from staleobs.scenarios import (
    LabeledScenario,
    Scenario,
    ScenarioError,
    dump_scenarios,
    generate_labeled_scenarios,
    generate_scenarios,
    load_scenarios,
)


@pytest.fixture(scope="module")
def fragment():
    return load_autonomy_fragment()


def test_same_seed_same_scenarios(fragment):
    a = generate_scenarios(fragment, 12, seed=5)
    b = generate_scenarios(fragment, 12, seed=5)
    assert dump_scenarios(a) == dump_scenarios(b)
    c = generate_scenarios(fragment, 12, seed=6)
    assert dump_scenarios(a) != dump_scenarios(c)


def test_count_must_be_positive(fragment):
    with pytest.raises(ScenarioError):
        generate_scenarios(fragment, 0, seed=1)
    with pytest.raises(ScenarioError):
        generate_labeled_scenarios(fragment, 0, seed=1)


def test_generated_scenarios_satisfy_invariants(fragment):
    scenarios = generate_scenarios(fragment, 200, seed=42)
    assert len(scenarios) == 200
    for s in scenarios:
        assert s.new_observation.variable not in s.prior_observations
        assert 3 <= len(s.prior_observations) <= 12
        fragment.check_assignment(s.prior_observations.evidence())
        fragment.check_assignment({s.new_observation.variable: s.new_observation.state})
        # stored profiles stay above the clamp floor by construction
        assert evidence_probability(fragment, s.prior_observations.evidence()) >= 1e-4


def test_labeled_scenarios_are_balanced_and_separated(fragment):
    labeled = generate_labeled_scenarios(fragment, 60, seed=9)
    ones = [l for l in labeled if l.label == 1]
    zeros = [l for l in labeled if l.label == 0]
    assert len(ones) == 30 and len(zeros) == 30
    for item in ones:
        p = prob_of(
            fragment,
            item.scenario.prior_observations.evidence(),
            (item.scenario.new_observation.variable, item.scenario.new_observation.state),
        )
        assert p <= 1e-3
    for item in zeros:
        p = prob_of(
            fragment,
            item.scenario.prior_observations.evidence(),
            (item.scenario.new_observation.variable, item.scenario.new_observation.state),
        )
        assert p >= 5e-2


def test_labeled_scenarios_on_extended_model():
    net = load_extended_model()
    labeled = generate_labeled_scenarios(net, 20, seed=3)
    assert sum(l.label for l in labeled) == 10
    for item in labeled:
        predicted = is_contradictory(
            net, item.scenario.prior_observations, item.scenario.new_observation, 1e-2
        )
        assert predicted == bool(item.label)


def test_round_trip_file_format(fragment):
    labeled = generate_labeled_scenarios(fragment, 8, seed=2)
    labeled[1] = LabeledScenario(
        scenario=labeled[1].scenario,
        label=1,
        expert_formula=parse_formula("{or: dementia=no, parkinson=no} {and: livesAlone=yes}"),
    )
    text = dump_scenarios(labeled)
    again = load_scenarios(text)
    assert len(again) == len(labeled)
    for x, y in zip(labeled, again):
        assert x.scenario.id == y.scenario.id
        assert x.label == y.label
        assert x.scenario.prior_observations == y.scenario.prior_observations
        assert x.scenario.new_observation == y.scenario.new_observation
    assert again[1].expert_formula == labeled[1].expert_formula


def test_load_rejects_malformed():
    with pytest.raises(ScenarioError):
        load_scenarios("s0; new: a=b@1\n")
    with pytest.raises(ScenarioError):
        load_scenarios("s0; obs: a=b@1; new: zzz\n")
    with pytest.raises(ScenarioError):
        load_scenarios("s0; obs: a=b@1; new: a=c@2; wat: 9\n")


def test_scenario_invariant_enforced():
    from staleobs.detection import NewObservation, Observation, ObservationSet

    obs = ObservationSet([Observation("a", "x", 1.0)])
    with pytest.raises(ScenarioError):
        Scenario("s", obs, NewObservation("a", "y", 2.0))
    with pytest.raises(ScenarioError):
        LabeledScenario(
            Scenario("s", obs, NewObservation("b", "y", 2.0)),
            label=0,
            expert_formula=parse_formula("{and: a=x}"),
        )
