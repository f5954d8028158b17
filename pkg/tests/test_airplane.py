"""Business rules of the maintenance fixture, checked ad hoc on its structure."""

from tmc.frontend import parse_stage_ref
from tmc.metamodel import Flow, Trigger
from tmc.validator import validate

ref = parse_stage_ref


def flow(a, b):
    return Flow(ref(a), ref(b))


def event(model, eid):
    return model.event(eid)


def test_fixture_is_clean(airplane):
    assert validate(airplane) == []
    assert [e.id for e in airplane.events] == [f"E{i}" for i in range(1, 11)]


def test_team_of_two_is_the_selection_output(airplane):
    # A team of two mechanics: the selection event (E5) processes the qualified
    # list, and that processing alone triggers forming the team (E6).
    selection, forming = event(airplane, "E5"), event(airplane, "E6")
    assert "two-mechanic team" in selection.label
    assert ref("Extraction.QualifiedMechanics.process") in selection.region_stages()
    into_team = [t for t in airplane.statics.triggers if t.target == ref("Hangar.Team.create")]
    assert into_team == [Trigger(ref("Extraction.QualifiedMechanics.process"), ref("Hangar.Team.create"))]
    assert into_team[0] in forming.region
    assert ("E5", "E6") in airplane.behavior.pairs()


def test_mechanics_are_matched_against_required_training(airplane):
    into_extraction = {f.source for f in airplane.statics.flows if f.target == ref("Extraction.transfer")}
    assert into_extraction == {ref("Comparison.RequiredTrainings.transfer"), ref("MechanicTrainings.transfer")}
    assert ("E4", "E5") in airplane.behavior.pairs()


def test_tools_reach_the_team(airplane):
    tools = flow("Toolroom.Tools.transfer", "Hangar.Team.transfer")
    assert tools in airplane.statics.flows
    assert tools in event(airplane, "E10").region


def test_service_happens_in_the_hangar(airplane):
    hangar = next(t for t in airplane.statics.thimacs if t.name == "Hangar")
    assert [s.name for s in hangar.subthimacs] == ["Team"]
    assert flow("Airplane.transfer", "Hangar.transfer") in event(airplane, "E1").region
    assert flow("Hangar.transfer", "Hangar.Team.transfer") in event(airplane, "E7").region


def test_chronology_is_linear_with_one_repeat(airplane):
    assert airplane.behavior.pairs() == tuple((f"E{i}", f"E{i + 1}") for i in range(1, 10))
    assert airplane.behavior.repeat_counts() == {"E2": 2}
