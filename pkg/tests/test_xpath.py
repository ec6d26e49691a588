import itertools
import random

import pytest

from stmachine.instances import BitSet, make_sets_tree, sets_tree_oracle
from stmachine.treelang import FCNS, LCNS, UnrankedTree, random_tree, run_filter, run_selection
from stmachine.xpath import (
    And,
    CompiledQuery,
    LocationPath,
    Not,
    NotCompilableError,
    Or,
    Step,
    UnsupportedAxisError,
    XPathSyntaxError,
    compile_filter,
    compile_selector,
    eval_reference,
    parse_corexpath,
    unparse,
)

SETS_QUERY = "/descendant::*[child::right/child::right/child::1]/child::left/child::1"
LABELS = ["a", "b", "c"]


# -- parser ------------------------------------------------------------------------

def test_parse_example_query():
    ast = parse_corexpath("/descendant::*[child::A and child::B]/child::*")
    assert ast.absolute and len(ast.steps) == 2
    pred = ast.steps[0].pred
    assert isinstance(pred, And)
    assert pred.left == LocationPath(False, (Step("child", "A"),))


def test_parse_sets_query():
    ast = parse_corexpath(SETS_QUERY)
    assert [s.test for s in ast.steps] == ["*", "left", "1"]


@pytest.mark.parametrize(
    "text,pos",
    [("child::", 7), ("child:a", 5), ("/", 1), ("child::a]", 8), ("child::a[", 9), ("foo::a", 0), ("child::a[not(child::b]", 21)],
)
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(XPathSyntaxError) as err:
        parse_corexpath(text)
    assert err.value.position == pos


@pytest.mark.parametrize("axis", ["following-sibling", "self", "attribute", "preceding"])
def test_unsupported_axes_are_named(axis):
    with pytest.raises(UnsupportedAxisError) as err:
        parse_corexpath(f"child::a[{axis}::b]")
    assert err.value.axis == axis


def test_precedence():
    ast = parse_corexpath("child::a[child::b or child::c and not(child::d)]")
    pred = ast.steps[0].pred
    assert isinstance(pred, Or) and isinstance(pred.right, And) and isinstance(pred.right.right, Not)


def rand_path(rng, depth, absolute=None):
    steps = []
    for _ in range(rng.randint(1, 3 if depth == 0 else 2)):
        pred = rand_pred(rng, depth + 1) if depth < 2 and rng.random() < 0.35 else None
        steps.append(Step(rng.choice(["child", "descendant"]), rng.choice(LABELS + ["*"]), pred))
    return LocationPath(rng.random() < 0.5 if absolute is None else absolute, tuple(steps))


def rand_pred(rng, depth):
    r = rng.random()
    if r < 0.5 or depth > 2:
        return rand_path(rng, depth, False)
    if r < 0.7:
        return Not(rand_pred(rng, depth + 1))
    if r < 0.85:
        return And(rand_pred(rng, depth + 1), rand_pred(rng, depth + 1))
    return Or(rand_pred(rng, depth + 1), rand_pred(rng, depth + 1))


def test_unparse_round_trip():
    rng = random.Random(1)
    for _ in range(300):
        q = rand_path(rng, 0)
        assert parse_corexpath(unparse(q)) == q


# -- reference semantics ----------------------------------------------------------------

def naive_eval(query, tree):
    """Independent brute force: decide every (context, result) pair recursively."""
    nodes = {v.index: v for v in tree.nodes}
    DOC = 0
    parent = {v.index: (v.parent.index if v.parent else DOC) for v in tree.nodes}
    label = {v.index: v.label for v in tree.nodes}

    def ancestors(x):
        while x in parent:
            x = parent[x]
            yield x

    def on_axis(axis, x, y):
        if y == DOC:
            return False
        if axis == "child":
            return parent[y] == x
        if axis == "descendant":
            return x in ancestors(y)
        if axis == "parent":
            return x != DOC and parent[x] == y
        return x != DOC and y in ancestors(x)

    def pred_holds(e, x):
        if isinstance(e, And):
            return pred_holds(e.left, x) and pred_holds(e.right, x)
        if isinstance(e, Or):
            return pred_holds(e.left, x) or pred_holds(e.right, x)
        if isinstance(e, Not):
            return not pred_holds(e.arg, x)
        return any(path_pair(e, x, y) for y in nodes)

    def steps_pair(steps, x, y):
        s, rest = steps[0], steps[1:]
        for z in list(nodes):
            if on_axis(s.axis, x, z) and (s.test == "*" or label[z] == s.test) and (s.pred is None or pred_holds(s.pred, z)):
                if (not rest and z == y) or (rest and steps_pair(rest, z, y)):
                    return True
        return False

    def path_pair(p, x, y):
        return steps_pair(p.steps, DOC if p.absolute else x, y)

    return frozenset(y for y in nodes if any(path_pair(query, x, y) for x in nodes))


def test_example_query_semantics():
    tree = UnrankedTree.build(("root", [("c", ["A", "B"]), ("d", ["A"])]))
    got = eval_reference("/descendant::*[child::A and child::B]/child::*", tree)
    assert got == {3, 4}


def test_child_on_single_node_is_empty():
    assert eval_reference("child::*", UnrankedTree.build("r")) == frozenset()


def test_absolute_paths_start_above_the_root():
    tree = UnrankedTree.build(("r", ["a", "b", "c"]))
    assert eval_reference("/child::*", tree) == {1}
    assert eval_reference("/child::*/child::*", tree) == {2, 3, 4}
    assert eval_reference("/descendant::a", tree) == {2}


def test_reference_matches_naive_evaluator():
    rng = random.Random(4)
    for _ in range(150):
        q = rand_path(rng, 0)
        if rng.random() < 0.3:
            q = LocationPath(q.absolute, q.steps + (Step(rng.choice(["parent", "ancestor"]), "*"),))
        tree = random_tree(rng, rng.randint(1, 8), LABELS)
        assert eval_reference(q, tree) == naive_eval(q, tree), unparse(q)


def test_sets_query_reference_exhaustive():
    for n in range(1, 7):
        for xs in itertools.product((0, 1), repeat=n):
            for ys in itertools.product((0, 1), repeat=n) if n <= 4 else [xs, tuple(1 - b for b in xs)]:
                inst = make_sets_tree(n, BitSet.from_bits("".join(map(str, xs))), BitSet.from_bits("".join(map(str, ys))))
                assert eval_reference(SETS_QUERY, UnrankedTree.parse(list(inst.document))) == sets_tree_oracle(inst)


# -- compilation ------------------------------------------------------------------------

def test_parent_axis_not_compilable():
    for q in ("child::a/parent::*", "child::a[ancestor::b]", "child::a[/child::b]"):
        with pytest.raises(NotCompilableError):
            compile_filter(q)
        with pytest.raises(NotCompilableError):
            compile_selector(q)


def test_root_has_child_A():
    rng = random.Random(2)
    aut = compile_filter("/child::*[child::A]", LCNS)
    for _ in range(20):
        tree = random_tree(rng, rng.randint(1, 8), ["A", "b"])
        ok, _ = run_filter(aut, tree.events(), tags=["A", "b"])
        assert ok == any(c.label == "A" for c in tree.root.children)


def test_children_of_root_selected():
    tree = UnrankedTree.build(("r", ["a", "b", "c"]))
    out, _ = run_selection(compile_selector("/child::*/child::*"), tree.events(), tags="rabc")
    assert out == [2, 3, 4]


def test_missing_label_selects_nothing():
    tree = random_tree(random.Random(0), 10, LABELS)
    out, rep = run_selection(compile_selector("descendant::Z"), tree.events(), tags=LABELS)
    assert out == [] and rep.r_used == 3


def test_compiler_soundness_random():
    rng = random.Random(7)
    for _ in range(120):
        q = rand_path(rng, 0)
        tree = random_tree(rng, rng.randint(1, 20), LABELS)
        ref = sorted(eval_reference(q, tree))
        compiled = CompiledQuery(q)
        enc = rng.choice([FCNS, LCNS])
        ok, _ = run_filter(compiled.automaton(enc), tree.events(), tags=LABELS)
        sel, _ = run_selection(compiled.selection_pair(enc), tree.events(), tags=LABELS)
        assert ok == bool(ref)
        assert sel == (ref if enc == FCNS else ref[::-1])
