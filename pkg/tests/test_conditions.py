import pytest

from fraisse import parse_class
from fraisse.conditions import bounded_members, check_class


@pytest.mark.parametrize("expr", ["sets", "vec(2)", "genpred(vec(2),V)"])
def test_small_classes_pass(expr):
    rep = check_class(parse_class(expr), budget=4)
    assert rep.ok
    assert len(rep.results) == 5
    assert all(r.status in ("pass", "skipped", "budget") for r in rep.results)
    assert rep.lines()[0] == "conditions for %s" % rep.klass


def test_eqrel_raw_fails_cube_condition():
    rep = check_class(parse_class("eqrel-raw"), budget=4)
    assert not rep.ok
    bad = [r for r in rep.results if r.failed]
    assert [r.name for r in bad] == ["5 independent 3-amalgamation"]
    assert len(bad[0].counterexample) == 7
    block = rep.counterexample_block()
    assert block[0] == ";; counterexample for 5 independent 3-amalgamation"


def test_generic_substructure_fails_cube_condition():
    rep = check_class(parse_class("gensub(vec(2),V)"), budget=4)
    assert any(r.failed and r.name.startswith("5") for r in rep.results)


def test_bounded_members_respects_limit():
    cls = parse_class("graphs")
    got = bounded_members(cls, 6, limit=100)
    s = max(len(S) for S in got)
    assert s < 6
    assert len(cls.members(s)) == len(got)


def test_bounded_members_small_size_is_exact():
    cls = parse_class("sets")
    assert len(bounded_members(cls, 3)) == len(cls.members(3))
