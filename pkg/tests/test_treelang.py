import random

import pytest

from stmachine.instances import BitSet, make_sets_tree
from stmachine.meter import ReadOnlyTapeError, load_tape, run
from stmachine.treelang import (
    ANY,
    BACHELOR,
    BOT,
    CLOSE,
    FCNS,
    LCNS,
    OPEN,
    BottomUpBDTA,
    Event,
    UnrankedTree,
    WellFormednessError,
    bin_encode,
    constant_pair,
    document_tape,
    dump_automaton,
    dump_selection_pair,
    expand_bachelors,
    load_automaton,
    load_selection_pair,
    path_tree,
    random_bdta,
    random_tree,
    render,
    run_bottom_up_reference,
    run_filter,
    run_selection,
    run_selection_reference,
    select_ascending,
    stream_filter_backward,
    stream_filter_forward,
    tokenize,
)
from stmachine.xpath import CompiledQuery

LABELS = ["a", "b", "c"]


def contains_one(encoding):
    """State t iff the binary subtree contains a node labelled 1."""
    delta = {}
    for lab in ("root", "left", "right", "0", "1"):
        for q1 in (BOT, "f", "t"):
            for q2 in (BOT, "f", "t"):
                delta[(lab, q1, q2)] = "t" if lab == "1" or "t" in (q1, q2) else "f"
    return BottomUpBDTA(("f", "t"), delta, frozenset({"t"}), encoding)


# -- tokens and trees ------------------------------------------------------------

def test_tokenize_basic():
    assert tokenize("<root><a/></root>") == [Event(OPEN, "root"), Event(BACHELOR, "a"), Event(CLOSE, "root")]


def test_tokenize_reports_position():
    with pytest.raises(WellFormednessError) as err:
        tokenize("<a></b>")
    assert err.value.position == 2


@pytest.mark.parametrize("doc", ["<a>", "</a>", "<a></a><b/>", "<a><b></a></b>", "<a>text</a>", ""])
def test_tokenize_rejects_malformed(doc):
    with pytest.raises(WellFormednessError):
        tokenize(doc)


def test_sets_tree_document_tokenizes():
    inst = make_sets_tree(1, BitSet.of(1, [1]), BitSet.of(1, []))
    events = tokenize(list(inst.document))
    assert len(events) == 11
    assert render(events) == "".join(inst.document)
    assert len(expand_bachelors(events)) == 14


def test_bin_encode_single_node():
    b = bin_encode(UnrankedTree.build("r"), FCNS)
    assert b.left is None and b.right is None


def test_bin_encode_two_children():
    tree = UnrankedTree.build(("r", ["a", "b"]))
    f = bin_encode(tree, FCNS)
    assert f.left.label == "a" and f.left.right.label == "b"
    g = bin_encode(tree, LCNS)
    assert g.left.label == "b" and g.left.right.label == "a"


def test_tree_indices_and_depth():
    tree = UnrankedTree.parse("<r><a><b/></a><c/></r>")
    assert [v.label for v in tree.nodes] == ["r", "a", "b", "c"]
    assert [v.index for v in tree.nodes] == [1, 2, 3, 4]
    assert tree.depth() == 2 and path_tree(5).depth() == 5


# -- reference runs ----------------------------------------------------------------

def test_single_state_automaton():
    for final in (frozenset({"q"}), frozenset()):
        aut = BottomUpBDTA(("q",), {(ANY, a, b): "q" for a in (BOT, "q") for b in (BOT, "q")}, final)
        _, ok = run_bottom_up_reference(aut, random_tree(random.Random(1), 7, LABELS))
        assert ok == bool(final)


def test_contains_one_reference():
    t1 = UnrankedTree.parse(list(make_sets_tree(1, BitSet.of(1, [1]), BitSet.of(1, [])).document))
    t0 = UnrankedTree.parse(list(make_sets_tree(1, BitSet.of(1, []), BitSet.of(1, [])).document))
    assert run_bottom_up_reference(contains_one(FCNS), t1)[1]
    assert not run_bottom_up_reference(contains_one(FCNS), t0)[1]


# -- streaming filters ---------------------------------------------------------------

def test_filters_match_reference():
    rng = random.Random(3)
    for _ in range(150):
        tree = random_tree(rng, rng.randint(1, 25), LABELS)
        for enc in (FCNS, LCNS):
            aut = random_bdta(rng, LABELS, rng.randint(1, 4), enc)
            ok, rep = run_filter(aut, tree.events())
            assert ok == run_bottom_up_reference(aut, tree)[1]
            assert rep.reversals == (1 if enc == FCNS else 0)
            assert rep.s_peak <= tree.depth() + 1


def test_stack_depth_law_on_paths():
    for depth in range(6):
        tree = path_tree(depth)
        for enc in (FCNS, LCNS):
            _, rep = run_filter(random_bdta(random.Random(depth), ["a"], 2, enc), tree.events())
            assert rep.s_peak == depth + 1


def test_stack_holds_depth_plus_one_inside_a_node():
    tree = random_tree(random.Random(6), 20, LABELS)
    events = expand_bachelors(tree.events())
    prog = stream_filter_forward(random_bdta(random.Random(6), LABELS, 3, LCNS))
    depth = []
    d = 0
    for ev in events:
        if ev.kind == OPEN:
            d += 1
        depth.append(d)
        if ev.kind == CLOSE:
            d -= 1
    seen = []
    run(prog, load_tape(events), on_step=lambda m, before: seen.append((before, m.arena.size("stack"))))
    for pos, size in seen:
        if 1 <= pos <= len(events) and events[pos - 1].kind == OPEN:
            # one cell per open node on the root-to-v path, i.e. edge depth + 1
            assert size == depth[pos - 1]


def test_filter_single_node():
    aut = random_bdta(random.Random(0), ["a"], 3, LCNS)
    ok, rep = run_filter(aut, "<a/>")
    assert ok == (aut.step("a", BOT, BOT) in aut.final) and rep.reversals == 0


@pytest.mark.parametrize("doc", ["<a><b></a></b>", "<a></a><a></a>", "<a>", "</a>"])
def test_filters_reject_malformed(doc):
    aut = random_bdta(random.Random(0), ["a", "b"], 2, FCNS)
    events = [Event(OPEN if not t.startswith("</") else CLOSE, t.strip("</>")) for t in doc.replace("><", ">|<").split("|")]
    for prog in (stream_filter_backward(aut), stream_filter_forward(random_bdta(random.Random(0), ["a", "b"], 2, LCNS))):
        _, rep = run(prog, load_tape(events))
        assert rep.halted == "reject"


def test_filter_encoding_checked():
    with pytest.raises(ValueError):
        stream_filter_forward(random_bdta(random.Random(0), ["a"], 2, FCNS))


# -- selection -----------------------------------------------------------------------

def test_select_everything_and_nothing():
    doc = "<r><a/><b><c/></b></r>"
    out, rep = run_selection(constant_pair(FCNS, True), doc, tags="rabc")
    assert out == [1, 2, 3, 4] and rep.r_used == 3
    out, rep = run_selection(constant_pair(LCNS, True), doc, tags="rabc")
    assert out == [4, 3, 2, 1] and rep.r_used == 2
    for enc, r in ((FCNS, 3), (LCNS, 2)):
        out, rep = run_selection(constant_pair(enc, False), doc, tags="rabc")
        assert out == [] and rep.r_used == r


def test_selection_needs_writable_tape():
    with pytest.raises(ReadOnlyTapeError):
        run(select_ascending(constant_pair(FCNS, True), tags="a"), document_tape("<a/>"))


def test_compiled_selection_matches_reference():
    rng = random.Random(12)
    query = CompiledQuery("descendant::a[child::b or not(child::*)]/child::*")
    for _ in range(40):
        tree = random_tree(rng, rng.randint(1, 15), LABELS)
        for enc in (FCNS, LCNS):
            pair = query.selection_pair(enc)
            want = run_selection_reference(pair, tree)
            out, rep = run_selection(pair, tree.events(), tags=LABELS)
            assert out == (want if enc == FCNS else want[::-1])
            assert rep.r_used == (3 if enc == FCNS else 2)


# -- text format -----------------------------------------------------------------------

def test_automaton_text_round_trip():
    aut = random_bdta(random.Random(2), LABELS, 3, LCNS)
    again = load_automaton(dump_automaton(aut))
    assert again.delta == aut.delta and again.final == aut.final and again.encoding == LCNS


def test_selection_pair_text_round_trip():
    pair = CompiledQuery("/descendant::a/child::b").selection_pair(FCNS)
    again = load_selection_pair(dump_selection_pair(pair))
    tree = random_tree(random.Random(5), 12, LABELS)
    assert run_selection_reference(again, tree) == run_selection_reference(pair, tree)
