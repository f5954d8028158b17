"""Parser for the ER modelling language."""

from __future__ import annotations

from typing import List

from tmc.errors import DUPLICATE_NAME, UNKNOWN_ENTITY, Diagnostic, ParseError
from tmc.frontend.lexer import TokenStream
from tmc.metamodel import Cardinality, ErAttribute, ErEntity, ErModel, ErRelationship, ErRole

CARDINALITIES = tuple(c.value for c in Cardinality)
ER_KEYWORDS = ("erd", "entity", "relationship", "attr", "key", "temporal") + CARDINALITIES


class _ERParser:
    def __init__(self, text: str):
        self.ts = TokenStream(text, reserved=ER_KEYWORDS)
        self.problems: List[Diagnostic] = []

    def erd(self) -> ErModel:
        ts = self.ts
        start = ts.expect("erd")
        name = ts.expect_ident("model name").text
        ts.expect("{")
        entities: List[ErEntity] = []
        rels: List[ErRelationship] = []
        while not ts.at("}"):
            if ts.at("entity"):
                ent = self.entity()
                if any(e.name == ent.name for e in entities):
                    self.problems.append(Diagnostic.error(DUPLICATE_NAME, f"duplicate entity {ent.name!r}", ent.loc))
                entities.append(ent)
            elif ts.at("relationship"):
                rel = self.relationship()
                if any(r.name == rel.name for r in rels):
                    self.problems.append(
                        Diagnostic.error(DUPLICATE_NAME, f"duplicate relationship {rel.name!r}", rel.loc)
                    )
                rels.append(rel)
            else:
                raise ts.fail(f"expected 'entity' or 'relationship', found {ts.current.describe()}")
        ts.expect("}")
        if ts.current.kind != "eof":
            raise ts.fail(f"unexpected {ts.current.describe()} after erd")

        names = {e.name for e in entities}
        for rel in rels:
            if rel.name in names:
                self.problems.append(
                    Diagnostic.error(
                        DUPLICATE_NAME, f"relationship {rel.name!r} reuses an entity name", rel.loc
                    )
                )
            for role in rel.roles:
                if role.entity not in names:
                    self.problems.append(
                        Diagnostic.error(
                            UNKNOWN_ENTITY,
                            f"relationship {rel.name} references undeclared entity {role.entity!r}",
                            role.loc,
                        )
                    )
        return ErModel(name, tuple(entities), tuple(rels), loc=start.loc)

    def attributes(self, owner: str) -> List[ErAttribute]:
        ts = self.ts
        attrs: List[ErAttribute] = []
        while not ts.at("}"):
            start = ts.expect("attr")
            name = ts.expect_ident("attribute name").text
            is_key = ts.accept("key") is not None
            is_temporal = ts.accept("temporal") is not None
            ts.expect(";")
            if any(a.name == name for a in attrs):
                self.problems.append(
                    Diagnostic.error(DUPLICATE_NAME, f"duplicate attribute {name!r} in {owner}", start.loc)
                )
            attrs.append(ErAttribute(name, is_key, is_temporal, loc=start.loc))
        ts.expect("}")
        return attrs

    def entity(self) -> ErEntity:
        ts = self.ts
        start = ts.expect("entity")
        name = ts.expect_ident("entity name").text
        ts.expect("{")
        return ErEntity(name, tuple(self.attributes(name)), loc=start.loc)

    def role(self) -> ErRole:
        ts = self.ts
        ent = ts.expect_ident("entity name")
        role_name = None
        if ts.current.kind == "ident" and ts.current.text not in CARDINALITIES:
            role_name = ts.expect_ident("role name").text
        card = ts.expect_one_of(CARDINALITIES, "cardinality")
        return ErRole(ent.text, Cardinality(card.text), role_name, loc=ent.loc)

    def relationship(self) -> ErRelationship:
        ts = self.ts
        start = ts.expect("relationship")
        name = ts.expect_ident("relationship name").text
        ts.expect("(")
        roles = [self.role()]
        ts.expect(",")
        roles.append(self.role())
        while ts.accept(","):
            roles.append(self.role())
        ts.expect(")")
        seen = set()
        for role in roles:
            if role.role_name is None:
                continue
            if role.role_name in seen:
                self.problems.append(
                    Diagnostic.error(DUPLICATE_NAME, f"duplicate role name {role.role_name!r} in {name}", role.loc)
                )
            seen.add(role.role_name)
        attrs: List[ErAttribute] = []
        if ts.accept("{"):
            attrs = self.attributes(name)
        return ErRelationship(name, tuple(roles), tuple(attrs), loc=start.loc)


def parse_er(text: str) -> ErModel:
    """Parse ER source. Raises ParseError carrying at least one diagnostic."""
    parser = _ERParser(text)
    model = parser.erd()
    if parser.problems:
        raise ParseError(sorted(parser.problems, key=Diagnostic.sort_key))
    return model
