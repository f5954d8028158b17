import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ER_FIXTURES, TM_FIXTURES, load_er, load_tm
from tmc.errors import DUPLICATE_NAME, SYNTAX, UNKNOWN_ENTITY, ParseError
from tmc.frontend import dumps, er_to_dict, model_to_dict, parse_er, parse_tm, serialize_er, serialize_tm
from tmc.metamodel import Cardinality, StageKind


def codes(text, parser=parse_tm):
    with pytest.raises(ParseError) as exc:
        parser(text)
    return [d.code for d in exc.value.diagnostics]


def test_marriage_shape(marriage):
    assert [t.name for t in marriage.statics.thimacs] == ["Person", "Husband", "Wife", "Marriage"]
    assert [e.id for e in marriage.events] == ["E1", "E2", "E3", "E4", "E5"]
    assert marriage.events[0].label == "There is a person"


def test_empty_model():
    m = parse_tm("model M { }")
    assert m.statics.thimacs == () and m.events == () and m.behavior is None


def test_misspelled_stage_kind():
    with pytest.raises(ParseError) as exc:
        parse_tm("model M { thimac T { stage creat; } }")
    d = exc.value.diagnostics[0]
    assert (d.code, d.line, d.column) == (SYNTAX, 1, 28)


@pytest.mark.parametrize(
    "text",
    [
        "model M { thimac A { } thimac A { } }",
        "model M { thimac A { thimac B { } thimac B { } } }",
        "model M { thimac A { stage create; stage create; } }",
        "model M { event E { region { } } event E { region { } } }",
        "model M { event E { region { } } behavior { repeat E; repeat E 3; } }",
    ],
)
def test_duplicates(text):
    assert codes(text) == [DUPLICATE_NAME]


def test_duplicates_reported_together():
    text = "model M {\n thimac A { }\n thimac A { }\n event E { region { } }\n event E { region { } }\n}"
    with pytest.raises(ParseError) as exc:
        parse_tm(text)
    assert [(d.code, d.line) for d in exc.value.diagnostics] == [(DUPLICATE_NAME, 3), (DUPLICATE_NAME, 5)]


@pytest.mark.parametrize(
    "text",
    [
        "",
        "model",
        "model M {",
        "model M { } extra",
        "model M { thimac model { } }",
        "model M { flow A -> B.create; }",
        "model M { flow create -> A.create; }",
        'model M { event E "unterminated { region { } } }',
        'model M { event E "bad \\q escape" { region { } } }',
        "model M { event E { region { } duration 1 days; } }",
        "model M { event E { region { } duration 0.5 min; } }",
        "model M { behavior { repeat E 0; } }",
        "model M { behavior { repeat E 1.5; } }",
        "model M { thimac A { stage create; } } $",
    ],
)
def test_syntax_errors(text):
    assert codes(text) == [SYNTAX]


def test_comments_and_crlf():
    m = parse_tm("// header\r\nmodel M { // trailing\r\n thimac A { stage create; }\r\n}\r\n")
    assert m.statics.thimacs[0].stages == (StageKind.CREATE,)


def test_repeat_defaults_to_two():
    m = parse_tm("model M { event E { region { } } behavior { repeat E; } }")
    assert m.behavior.repeat_counts() == {"E": 2}


def test_hour_duration_normalizes_to_ticks():
    m = parse_tm("model M { event E { region { } duration 1.5 h; } }")
    assert m.events[0].duration.ticks == 90


def test_locations_are_one_based():
    m = parse_tm("model M {\n  thimac A {\n    stage create;\n  }\n}")
    assert m.statics.thimacs[0].loc == (2, 3)


def test_attends_er():
    er = load_er("attends.er")
    assert [e.name for e in er.entities] == ["Student", "University"]
    (rel,) = er.relationships
    assert rel.name == "Attends"
    assert [(r.entity, r.cardinality) for r in rel.roles] == [
        ("Student", Cardinality.MANY),
        ("University", Cardinality.ONE),
    ]


def test_entities_only_er():
    er = parse_er("erd E { entity A { } entity B { attr id key; } }")
    assert er.relationships == ()
    assert er.entities[1].attributes[0].is_key


def test_marriage_er():
    er = load_er("marriage.er")
    assert [e.name for e in er.entities] == ["Person"]
    (rel,) = er.relationships
    assert [(r.entity, r.role_name, r.cardinality.value) for r in rel.roles] == [
        ("Person", "husband", "one"),
        ("Person", "wife", "one"),
    ]


@pytest.mark.parametrize(
    "text,code",
    [
        ("erd E { entity A { } relationship R (A one) }", SYNTAX),
        ("erd E { entity A { } relationship R (A one, B many) }", UNKNOWN_ENTITY),
        ("erd E { entity A { } entity A { } }", DUPLICATE_NAME),
        ("erd E { entity A { attr x; attr x; } }", DUPLICATE_NAME),
        ("erd E { entity A { } relationship R (A r one, A r one) }", DUPLICATE_NAME),
        ("erd E { entity A { } relationship A (A one, A one) }", DUPLICATE_NAME),
        ("erd E { entity A { } relationship R (A one, A one) relationship R (A one, A one) }", DUPLICATE_NAME),
        ("erd E { entity A { } relationship R (A lots, A one) }", SYNTAX),
    ],
)
def test_er_errors(text, code):
    assert codes(text, parse_er) == [code]


def test_er_forward_reference_allowed():
    er = parse_er("erd E { relationship R (A one, B one) entity A { } entity B { } }")
    assert len(er.relationships[0].roles) == 2


def test_serialize_empty_model():
    assert serialize_tm(parse_tm("model M { }")) == "model M {\n}\n"


@pytest.mark.parametrize("name", TM_FIXTURES)
def test_tm_fixtures_round_trip(name):
    m = load_tm(name)
    text = serialize_tm(m)
    assert parse_tm(text) == m
    assert serialize_tm(parse_tm(text)) == text


def test_airplane_round_trip_keeps_events(airplane):
    again = parse_tm(serialize_tm(airplane))
    assert [e.id for e in again.events] == [f"E{i}" for i in range(1, 11)]
    assert again == airplane


@pytest.mark.parametrize("name", ER_FIXTURES)
def test_er_fixtures_round_trip(name):
    er = load_er(name)
    assert parse_er(serialize_er(er)) == er


def test_json_ast(marriage):
    data = json.loads(dumps(model_to_dict(marriage)))
    assert data["model"] == "Marriage"
    assert data["thimacs"][3]["subthimacs"][0]["name"] == "Union"
    assert data["events"][4]["time"] == "date"
    assert data["behavior"]["precedence"][0] == ["E1", "E2"]
    er = json.loads(dumps(er_to_dict(load_er("marriage.er"))))
    assert er["relationships"][0]["roles"][0] == {"entity": "Person", "role": "husband", "cardinality": "one"}


@settings(max_examples=150, deadline=None)
@given(st.text(max_size=80) | st.lists(st.sampled_from(
    ["model", "M", "{", "}", "thimac", "A", "stage", "create", ";", "flow", "A.create", "->", "event", "region",
     "behavior", "repeat", "1", '"x"', "duration", "h", "."]), max_size=25).map(" ".join))
def test_parsing_is_total(text):
    for parser in (parse_tm, parse_er):
        try:
            parser(text)
        except ParseError as exc:
            assert exc.diagnostics
            lines = text.replace("\r\n", "\n").split("\n")
            for d in exc.diagnostics:
                assert 1 <= d.line <= len(lines)
                assert 1 <= d.column <= len(lines[d.line - 1]) + 1
