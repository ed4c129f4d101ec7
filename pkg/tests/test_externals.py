"""External widget state: database persistence, notifier gating, and the
simulated provider's edge-triggered range notifications."""

import pytest
from hypothesis import given, strategies as st

from widget_calculus import externals
from widget_calculus.errors import RuntimeErr
from widget_calculus.parser import parse_type
from widget_calculus.types import show_type

plain = st.text(
    st.characters(blacklist_characters="\t\n", blacklist_categories=("Cs",)),
    min_size=1,
    max_size=20,
)


# ---------- db ----------


@given(st.dictionaries(plain, plain, min_size=0, max_size=10))
def test_db_round_trips_arbitrary_records(tmp_path_factory, pairs):
    path = tmp_path_factory.mktemp("db") / "f.db"
    db = externals.DbState(str(path))
    for k, v in pairs.items():
        db.command("update", [k, v])
    reopened = externals.DbState(str(path))
    assert {r["key"]: r["val"] for r in reopened.command("records", [])} == pairs


def test_db_update_overwrites_in_place(tmp_path):
    db = externals.DbState(str(tmp_path / "f.db"))
    db.command("update", ["a", "1"])
    db.command("update", ["b", "2"])
    db.command("update", ["a", "3"])
    assert db.command("records", []) == [
        {"key": "a", "val": "3"},
        {"key": "b", "val": "2"},
    ]


def test_db_delete_reports_whether_something_was_removed(tmp_path):
    db = externals.DbState(str(tmp_path / "f.db"))
    db.command("update", ["a", "1"])
    assert db.command("delete", ["a"]) is True
    assert db.command("delete", ["a"]) is False
    assert db.command("records", []) == []


def test_db_records_are_snapshots(tmp_path):
    db = externals.DbState(str(tmp_path / "f.db"))
    db.command("update", ["a", "1"])
    snap = db.command("records", [])
    snap[0]["val"] = "mutated"
    assert db.command("records", [])[0]["val"] == "1"


# ---------- notifier gating ----------


def test_register_requires_connect():
    n = externals.NotifierState(9999, externals.ProviderSim())
    assert n.command("register", ["me"]) is False
    assert n.command("connect", []) is True
    assert n.command("register", ["me"]) is True


def test_move_requires_connect_and_register():
    provider = externals.ProviderSim()
    n = externals.NotifierState(9999, provider)
    assert n.command("move", [1, 1]) is False
    n.command("connect", [])
    assert n.command("move", [1, 1]) is False
    n.command("register", ["me"])
    assert n.command("move", [3, 4]) is True
    assert provider.self_pos == (3, 4)


# ---------- provider range simulation ----------


def test_notify_fires_on_entering_range():
    p = externals.ProviderSim(range_=10)
    p.self_register("me")
    assert p.step({"action": "peer-register", "address": "pal", "x": 100, "y": 100}) == []
    assert p.step({"action": "peer-move", "address": "pal", "x": 3, "y": 4}) == ["pal"]


def test_notify_is_edge_triggered_not_level_triggered():
    p = externals.ProviderSim(range_=10)
    p.self_register("me")
    p.step({"action": "peer-register", "address": "pal", "x": 1, "y": 1})
    assert p.take_pending() == []  # already drained by step
    assert p.step({"action": "peer-move", "address": "pal", "x": 2, "y": 2}) == []
    assert p.step({"action": "peer-move", "address": "pal", "x": 99, "y": 99}) == []
    assert p.step({"action": "peer-move", "address": "pal", "x": 0, "y": 0}) == ["pal"]


def test_registration_is_immediate_when_already_close():
    p = externals.ProviderSim(range_=10)
    p.self_register("me")
    assert p.step({"action": "peer-register", "address": "pal", "x": 1, "y": 1}) == ["pal"]


def test_own_moves_queue_notifications():
    p = externals.ProviderSim(range_=5)
    p.self_register("me")
    p.step({"action": "peer-register", "address": "pal", "x": 100, "y": 100})
    p.self_move(98, 100)
    assert p.take_pending() == ["pal"]


def test_no_notifications_before_self_registration():
    p = externals.ProviderSim(range_=10)
    assert p.step({"action": "peer-register", "address": "pal", "x": 0, "y": 0}) == []
    p.self_register("me")
    # registration rescans, so the already-present peer fires exactly once
    assert p.take_pending() == ["pal"]
    assert p.in_range == {"pal"}


def test_range_boundary_is_inclusive():
    p = externals.ProviderSim(range_=5)
    p.self_register("me")
    assert p.step({"action": "peer-register", "address": "pal", "x": 3, "y": 4}) == ["pal"]


def test_unknown_directive_rejected():
    with pytest.raises(RuntimeErr, match="directive"):
        externals.ProviderSim().step({"action": "teleport"})


# ---------- addscreen ----------


def test_addscreen_fields_default_empty_and_are_settable():
    s = externals.AddScreenState([])
    assert s.command("name", []) == ""
    s.fields["name"] = "Sally"
    s.fields["address"] = "sally@example.org"
    assert s.command("name", []) == "Sally"
    assert s.command("address", []) == "sally@example.org"
    with pytest.raises(RuntimeErr):
        s.command("phone", [])


# ---------- command typing ----------


def test_command_type_substitutes_type_arguments():
    t = parse_type("DB[str,int]")
    upd = externals.command_type(t, "update")
    assert show_type(upd) == "(str,int)-><int>"
    recs = externals.command_type(t, "records")
    assert show_type(recs) == "<[{key:str;val:int}]>"


def test_command_type_unknown_name_is_none():
    assert externals.command_type(parse_type("DB[str,str]"), "nope") is None
    assert externals.command_type(parse_type("int"), "update") is None


def test_specs_registry_is_consistent():
    for spec in externals.SPECS.values():
        assert externals.SPECS_BY_TYPE[spec.type_name] is spec
        scalars = [
            p
            for p in spec.ctor_params
            if not externals_is_child_slot(p)
        ]
        assert len(scalars) == len(spec.prop_names)


def externals_is_child_slot(p):
    from widget_calculus import types as T

    return isinstance(p, T.TCommand) or (
        isinstance(p, T.TList) and isinstance(p.elem, T.TCommand)
    )
