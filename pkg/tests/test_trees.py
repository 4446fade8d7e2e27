"""Tree construction, parsing, serialization, surgery, and reduction."""
import random
import warnings

import pytest

from helpers import OracleExplosion, brute_language, random_tree
from treefreeze.errors import ParseError
from treefreeze.trees import (
    Operator,
    ProcessTree,
    UnaryOperatorWarning,
    activity,
    choice,
    find_subtree,
    is_strict_subtree_node,
    is_subtree,
    lca,
    loop,
    parallel,
    parse_tree,
    path_of,
    reduce_tree,
    replace_leaf_labels,
    replace_node,
    resolve_path,
    sequence,
    sequence_of,
    serialize_tree,
    subtree_at,
    tau,
    to_dot,
)

ROUND_TRIP_TEXTS = [
    "a",
    "tau",
    "->(a,b)",
    "X(a,tau)",
    "+(a,b,c)",
    "*(a,tau)",
    "->(*(X(->(a,b),+(c,d)),tau),+(e,a))",
    "X(->(a,*(b,c)),+(tau,d),e)",
]


@pytest.mark.parametrize("text", ROUND_TRIP_TEXTS)
def test_parse_serialize_round_trip(text):
    assert serialize_tree(parse_tree(text)) == text


def test_parse_ignores_whitespace():
    spaced = "-> ( * ( X ( -> ( a , b ) , + ( c , d ) ) , tau ) , + ( e , a ) )"
    assert serialize_tree(parse_tree(spaced)) == (
        "->(*(X(->(a,b),+(c,d)),tau),+(e,a))"
    )


def test_parse_x_is_activity_without_parenthesis():
    t = parse_tree("->(X,a)")
    assert t.labels[1] == "X"
    assert serialize_tree(t) == "->(X,a)"


@pytest.mark.parametrize(
    "text",
    [
        "",
        "   ",
        "->(a",
        "->(a))",
        "->()",
        "*(a)",
        "*(a,b,c)",
        "tau(a)",
        "a(b)",
        "->(a,,b)",
        "->(a b)",
        "%",
    ],
)
def test_parse_rejects_malformed_input(text):
    with pytest.raises(ParseError), warnings.catch_warnings():
        warnings.simplefilter("ignore", UnaryOperatorWarning)
        parse_tree(text)


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as info:
        parse_tree("->(a,%)")
    assert info.value.position == 5
    assert "position 5" in str(info.value)


def test_single_child_operator_warns_but_parses():
    with pytest.warns(UnaryOperatorWarning):
        t = parse_tree("->(a)")
    assert serialize_tree(t) == "->(a)"


def test_loop_requires_exactly_two_children():
    from treefreeze.trees import operator_node

    with pytest.raises(ValueError):
        operator_node(Operator.LOOP, activity("a"), activity("b"), tau())
    with pytest.raises(ValueError):
        operator_node(Operator.LOOP, activity("a"))
    with pytest.raises(ParseError):
        parse_tree("*(a)")
    with pytest.raises(ParseError):
        parse_tree("*(a,b,c)")


def test_activity_name_validation():
    with pytest.raises(ValueError):
        activity("")
    with pytest.raises(ValueError):
        activity("a b")
    with pytest.raises(ValueError):
        activity("tau")


def test_sequence_of_edge_cases():
    assert serialize_tree(sequence_of(())) == "tau"
    assert serialize_tree(sequence_of(("a",))) == "a"
    assert serialize_tree(sequence_of(("a", "b", "a"))) == "->(a,b,a)"


def test_preorder_ids_sizes_and_parents():
    t = parse_tree("->(*(X(->(a,b),+(c,d)),tau),+(e,a))")
    assert len(t) == 13
    assert t.labels[0] is Operator.SEQUENCE
    assert t.sizes[0] == 13
    assert t.sizes[1] == 9  # the loop part
    assert t.parents[0] == -1
    for v in range(1, len(t)):
        assert v in t.children[t.parents[v]]
    # Subtrees occupy contiguous id ranges.
    for v in t:
        for c in t.children[v]:
            assert v < c < v + t.sizes[v]


def test_alphabet_excludes_tau():
    t = parse_tree("->(a,tau,X(b,a))")
    assert t.alphabet() == {"a", "b"}


def test_node_text_glyphs():
    t = parse_tree("->(X(a,tau),+(b,*(c,d)))")
    texts = [t.node_text(v) for v in t]
    assert texts[0] == "→"
    assert "×" in texts and "∧" in texts and "↻" in texts
    assert "τ" in texts


def test_subtree_at_and_replace_node_round_trip():
    rng = random.Random(7)
    for _ in range(50):
        t = random_tree(rng, max_nodes=12)
        v = rng.randrange(len(t))
        assert replace_node(t, v, subtree_at(t, v)) == t


def test_replace_node_splices_text():
    t = parse_tree("->(a,X(b,c),d)")
    replaced = replace_node(t, 2, parse_tree("*(e,tau)"))
    assert serialize_tree(replaced) == "->(a,*(e,tau),d)"
    # Original is untouched.
    assert serialize_tree(t) == "->(a,X(b,c),d)"


def test_replace_node_rejects_bad_ids():
    t = parse_tree("->(a,b)")
    with pytest.raises(ValueError):
        replace_node(t, 3, tau())
    with pytest.raises(ValueError):
        subtree_at(t, -1)


def test_lca_matches_ancestor_chain_oracle():
    rng = random.Random(11)

    def ancestors(t, v):
        chain = [v]
        while v != 0:
            v = t.parents[v]
            chain.append(v)
        return chain

    for _ in range(100):
        t = random_tree(rng, max_nodes=12)
        u = rng.randrange(len(t))
        v = rng.randrange(len(t))
        expected = next(
            a for a in ancestors(t, u) if a in set(ancestors(t, v))
        )
        assert lca(t, [u, v]) == expected
        assert lca(t, [u]) == u
    with pytest.raises(ValueError):
        lca(parse_tree("a"), [])


def test_path_of_resolve_path_inverse():
    rng = random.Random(13)
    for _ in range(30):
        t = random_tree(rng, max_nodes=12)
        for v in t:
            assert resolve_path(t, path_of(t, v)) == v
    with pytest.raises(ValueError):
        resolve_path(parse_tree("->(a,b)"), (5,))


def test_find_subtree_lists_every_occurrence():
    t = parse_tree("->(X(a,b),X(a,b),*(X(a,b),tau))")
    needle = parse_tree("X(a,b)")
    hits = find_subtree(t, needle)
    assert len(hits) == 3
    for v in hits:
        assert subtree_at(t, v) == needle
    assert is_subtree(needle, t)
    assert not is_subtree(parse_tree("X(b,a)"), t)  # child order matters


def test_is_strict_subtree_node_ranges():
    t = parse_tree("->(X(a,b),c)")
    assert is_strict_subtree_node(t, 1, 2)
    assert is_strict_subtree_node(t, 1, 1)
    assert not is_strict_subtree_node(t, 1, 4)


def test_replace_leaf_labels():
    t = parse_tree("->(go,stop,go)")
    relabeled = replace_leaf_labels(t, {"go": "run", "stop": None})
    assert serialize_tree(relabeled) == "->(run,tau,run)"


def test_to_dot_lists_nodes_edges_and_highlight():
    t = parse_tree("->(a,X(b,tau))")
    dot = to_dot(t, highlight=[2])
    assert dot.startswith("digraph")
    for v in t:
        assert f"n{v} [" in dot
    assert "n0 -> n1;" in dot and "n2 -> n3;" in dot
    assert dot.count("style=filled") == 1


def test_trees_are_immutable_values():
    t = parse_tree("->(a,b)")
    u = parse_tree("->(a,b)")
    assert t == u and hash(t) == hash(u)
    assert t != parse_tree("->(b,a)")
    with pytest.raises(AttributeError):
        t.extra_field = 1  # __slots__: no ad-hoc attributes


# -- reduction ----------------------------------------------------------------


@pytest.mark.parametrize(
    "before,after",
    [
        ("->(a)", "a"),
        ("->(->(a,b),c)", "->(a,b,c)"),
        ("+(+(a,b),c)", "+(a,b,c)"),
        ("X(X(a,b),c)", "X(a,b,c)"),
        ("X(a,a,b)", "X(a,b)"),
        ("X(tau,tau)", "tau"),
        ("->(tau,a,tau)", "a"),
        ("+(tau,a)", "a"),
        ("->(tau,tau)", "tau"),
        ("*(tau,tau)", "tau"),
        ("->(X(a,a),->(b,tau))", "->(X(a),b)".replace("X(a)", "a")),
        ("*(->(a,tau),X(b,b))", "*(a,b)"),
    ],
)
def test_reduce_known_rewrites(before, after):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UnaryOperatorWarning)
        t = parse_tree(before)
    assert serialize_tree(reduce_tree(t)) == after


def test_reduce_keeps_loop_structure():
    # A loop with a non-silent part must survive.
    t = parse_tree("*(a,tau)")
    assert serialize_tree(reduce_tree(t)) == "*(a,tau)"
    t = parse_tree("*(tau,a)")
    assert serialize_tree(reduce_tree(t)) == "*(tau,a)"


def test_reduce_is_idempotent():
    rng = random.Random(17)
    for _ in range(100):
        t = random_tree(rng, max_nodes=12)
        once = reduce_tree(t)
        assert reduce_tree(once) == once


def test_reduce_preserves_bounded_language():
    rng = random.Random(19)
    checked = 0
    while checked < 60:
        t = random_tree(rng, max_nodes=12)
        try:
            before = brute_language(t, loop_bound=2)
        except OracleExplosion:
            continue
        after = brute_language(reduce_tree(t), loop_bound=2)
        assert after == before, serialize_tree(t)
        checked += 1


def test_reduce_respects_protected_nodes():
    t = parse_tree("->(X(a,a),tau,b)")
    # Unprotected: the duplicate choice collapses and the tau is dropped.
    assert serialize_tree(reduce_tree(t)) == "->(a,b)"
    # Protecting the choice node keeps it verbatim.
    protected = reduce_tree(t, protected=[1])
    assert serialize_tree(protected) == "->(X(a,a),b)"
    assert is_subtree(parse_tree("X(a,a)"), protected)


def test_reduce_protected_root_is_untouched():
    t = parse_tree("X(a,a)")
    assert serialize_tree(reduce_tree(t, protected=[0])) == "X(a,a)"


def test_reduce_does_not_merge_protected_child_into_same_operator_parent():
    t = parse_tree("->(a,->(b,c))")
    merged = reduce_tree(t)
    assert serialize_tree(merged) == "->(a,b,c)"
    kept = reduce_tree(t, protected=[2])
    assert serialize_tree(kept) == "->(a,->(b,c))"
