"""Event dispatch: projection, handler lookup, splicing, and the run loop."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from widget_calculus import dispatch
from widget_calculus.errors import RuntimeErr
from widget_calculus.runtime import RuntimeState, WidgetInstance

from helpers import load, load_sample, random_script, run, toggle_source

BUBBLE_SRC = """
type B = Widget(Button) { push:(int)-><B> }
type Main = Widget(Window[B]) raises grow(int) { move:(int,int)-><Main> }
letrec
  main:<Main> = widget self:Main (window[B]('first', b)) {
    grow(i:int):<Main> = do { m:Main <- main2 return m };
    move(x:int, y:int):<Main> = do { return self }
  }
  main2:<Main> = widget self:Main (window[B]('second', b)) {
    grow(i:int):<Main> = do { return self };
    move(x:int, y:int):<Main> = do { return self }
  }
  b:<B> = widget (button('x')) {
    push(i:int):<B> = raise grow(i + 1)
  }
in main
"""


def boot(src_or_prog, range_=10):
    prog = load(src_or_prog) if isinstance(src_or_prog, str) else src_or_prog
    state = RuntimeState(range_=range_)
    return dispatch.boot(prog, state), state


# ---------- projection ----------


def test_projection_drops_user_widgets():
    root, _ = boot(load_sample("example1.wdg"))
    node = dispatch.project(root)
    assert node.kind == "screen"
    assert [c.kind for c in node.children] == ["button"]
    assert node.children[0].props == {"label": "PUSHME"}


def test_top_projects_to_nothing():
    root, _ = boot("val main:<Top> = top")
    assert dispatch.project(root) is None


def test_display_node_json_round_trip():
    root, _ = boot(load_sample("buddy.wdg"))
    node = dispatch.project(root)
    assert dispatch.DisplayNode.from_json(node.to_json()) == node


def test_find_all_walks_the_whole_tree():
    root, _ = boot(load_sample("buddy.wdg"))
    node = dispatch.project(root)
    buttons = node.find_all(lambda n: n.kind == "button")
    assert sorted(b.props["label"] for b in buttons) == ["add", "del"]


# ---------- handler lookup and bubbling ----------


def test_innermost_matching_handler_wins():
    root, _ = boot(BUBBLE_SRC)
    button = dispatch.project(root).find_all(lambda n: n.kind == "button")[0]
    path = dispatch.path_to(root, button.id)
    idx = dispatch.find_handler_index(path, "push", 1)
    assert isinstance(path[idx], WidgetInstance)
    assert idx == len(path) - 2  # the widget immediately wrapping the button


def test_restarting_the_search_skips_the_raiser():
    root, _ = boot(BUBBLE_SRC)
    button = dispatch.project(root).find_all(lambda n: n.kind == "button")[0]
    path = dispatch.path_to(root, button.id)
    inner = dispatch.find_handler_index(path, "push", 1)
    assert dispatch.find_handler_index(path, "grow", 1, start=inner - 1) == 0


def test_reraised_event_bubbles_to_the_enclosing_widget(tmp_path):
    prog = load(BUBBLE_SRC)
    frames = run(prog, [{"type": "ui-event", "select": "button", "name": "push"}], tmp_path)
    assert frames[0]["props"]["title"] == "first"
    assert frames[1]["props"]["title"] == "second"


def test_missing_handler_is_an_error():
    root, state = boot(load_sample("example1.wdg"))
    with pytest.raises(RuntimeErr, match="no handler"):
        dispatch.process_event(state, root, dispatch.Event(None, "mystery", []))


def test_arity_must_match():
    root, state = boot(load_sample("example1.wdg"))
    button = dispatch.project(root).find_all(lambda n: n.kind == "button")[0]
    with pytest.raises(RuntimeErr, match="no handler"):
        dispatch.process_event(state, root, dispatch.Event(button.id, "push", [1, 2]))


def test_unknown_target_is_an_error():
    root, state = boot(load_sample("example1.wdg"))
    with pytest.raises(RuntimeErr, match="not in tree"):
        dispatch.process_event(state, root, dispatch.Event(9999, "push", [0]))


# ---------- splicing ----------


def test_handler_at_the_root_replaces_the_root():
    root, state = boot(BUBBLE_SRC)
    button = dispatch.project(root).find_all(lambda n: n.kind == "button")[0]
    new_root = dispatch.process_event(
        state, root, dispatch.Event(button.id, "push", [0])
    )
    assert new_root is not root
    assert dispatch.project(new_root).props["title"] == "second"


def test_inner_handler_splices_in_place(tmp_path):
    src, _ = toggle_source(random.Random(7), n_buttons=2)
    prog = load(src)
    root, state = boot(prog)
    before = dispatch.project(root)
    button = before.find_all(lambda n: n.kind == "button")[0]
    after_root = dispatch.process_event(
        state, root, dispatch.Event(button.id, "push", [0])
    )
    assert after_root is root  # container is kept, only the child is swapped
    after = dispatch.project(after_root)
    assert after.id == before.id
    label = lambda n: n.find_all(lambda x: x.kind == "button")[0].props["label"]
    assert label(after) != label(before)


def test_context_event_addresses_the_root(tmp_path):
    src, _ = toggle_source(random.Random(3))
    frames = run(
        load(src), [{"type": "context-event", "name": "move", "args": [1, 2]}], tmp_path
    )
    assert len(frames) == 2 and frames[0] == frames[1]


# ---------- the loop ----------


def test_empty_script_shows_one_frame(tmp_path):
    frames = run(load_sample("example1.wdg"), [], tmp_path)
    assert len(frames) == 1


def test_boot_rejects_non_widget_entry():
    with pytest.raises(RuntimeErr):
        boot("val main:<int> = do { return 1 }")


def test_boot_rejects_missing_entry():
    with pytest.raises(RuntimeErr, match="entry"):
        boot("val other:<Top> = top")


def test_toggle_cycle_revisits_identical_frames(tmp_path):
    src, n = toggle_source(random.Random(11), n_buttons=3)
    script = [{"type": "ui-event", "select": "button", "name": "push"}] * (2 * n)
    frames = run(load(src), script, tmp_path)
    assert len(frames) == 2 * n + 1
    # one full cycle returns the exact display, ids included
    for i in range(n + 1):
        assert frames[i] == frames[i + n]
    assert len({frames[i]["children"][0]["props"]["label"] for i in range(n)}) == n


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 8))
def test_random_toggle_traces_match_modular_oracle(seed, n_events):
    rng = random.Random(seed)
    src, n = toggle_source(rng)
    script = random_script(rng, n_events)
    import tempfile

    with tempfile.TemporaryDirectory() as td:
        frames = run(load(src), script, td)
    labels = [f["children"][0]["props"]["label"] for f in frames]
    assert len(frames) == len(script) + 1
    # state after k pushes is k mod n; moves leave it alone
    k = 0
    assert labels[0].startswith("s0x")
    for ev, lab in zip(script, labels[1:]):
        if ev["type"] == "ui-event":
            k += 1
        assert lab.startswith(f"s{k % n}x")
