"""Shared test utilities: brute-force oracles and random tree generation.

The oracles here deliberately avoid the package's execution machinery:
languages are computed by direct set recursion over the tree structure,
alignment costs by exhaustive minimisation over that language, and
cardinalities by counting label occurrences per trace.  They are slow and
bounded, but independent, which is what makes them useful as ground truth.
"""
from __future__ import annotations

import random
from functools import lru_cache

from treefreeze.semantics import Cardinality
from treefreeze.trees import (
    Operator,
    ProcessTree,
    activity,
    choice,
    loop,
    parallel,
    sequence,
    subtree_at,
    tau,
)

Trace = tuple[str, ...]


class OracleExplosion(Exception):
    """The brute-force computation would be too large; skip the instance."""


def shuffle_merge(a: Trace, b: Trace) -> set[Trace]:
    """All interleavings of two traces that keep each trace's own order."""

    @lru_cache(maxsize=None)
    def rec(i: int, j: int) -> frozenset:
        if i == len(a):
            return frozenset((b[j:],))
        if j == len(b):
            return frozenset((a[i:],))
        return frozenset(
            {(a[i],) + rest for rest in rec(i + 1, j)}
            | {(b[j],) + rest for rest in rec(i, j + 1)}
        )

    return set(rec(0, 0))


def brute_language(
    t: ProcessTree, loop_bound: int = 2, cap: int = 20_000
) -> set[Trace]:
    """The trace language by direct set recursion, loops bounded to at
    most ``loop_bound`` body executions."""

    def guard(size: int) -> None:
        if size > cap:
            raise OracleExplosion(f"language larger than {cap}")

    def concat(parts: list[set[Trace]]) -> set[Trace]:
        out: set[Trace] = {()}
        for part in parts:
            guard(len(out) * len(part))
            out = {x + y for x in out for y in part}
            guard(len(out))
        return out

    def rec(v: int) -> set[Trace]:
        label = t.labels[v]
        kids = t.children[v]
        if not kids:
            return {(label,)} if isinstance(label, str) else {()}
        if label is Operator.SEQUENCE:
            return concat([rec(c) for c in kids])
        if label is Operator.CHOICE:
            out: set[Trace] = set()
            for c in kids:
                out |= rec(c)
            guard(len(out))
            return out
        if label is Operator.PARALLEL:
            out = {()}
            for c in kids:
                part = rec(c)
                merged: set[Trace] = set()
                guard(len(out) * len(part))
                for x in out:
                    for y in part:
                        merged |= shuffle_merge(x, y)
                        guard(len(merged))
                out = merged
            return out
        # loop: body (redo body)^(m-1) for 1 <= m <= loop_bound
        body, redo = rec(kids[0]), rec(kids[1])
        out = set(body)
        round_lang = set(body)
        for _ in range(loop_bound - 1):
            round_lang = concat([round_lang, redo, body])
            out |= round_lang
            guard(len(out))
        return out

    return rec(0)


def lcs_length(x: Trace, y: Trace) -> int:
    """Length of the longest common subsequence of two traces."""
    previous = [0] * (len(y) + 1)
    for i in range(1, len(x) + 1):
        current = [0] * (len(y) + 1)
        for j in range(1, len(y) + 1):
            if x[i - 1] == y[j - 1]:
                current[j] = previous[j - 1] + 1
            else:
                current[j] = max(previous[j], current[j - 1])
        previous = current
    return previous[len(y)]


def brute_alignment_cost(
    t: ProcessTree, trace: Trace, cap: int = 20_000
) -> int:
    """Minimal alignment cost by exhaustive search over the model language.

    Against a fixed model trace ``w`` the cheapest alignment uses a longest
    common subsequence as synchronous moves, costing
    ``len(trace) + len(w) - 2 * lcs``.  Model traces longer than any
    optimum can pay off are excluded by bounding every loop at
    ``len(trace) + 1`` body executions: a run with more has a round
    without synchronous moves, and dropping that round never raises the
    cost.
    """
    language = brute_language(t, loop_bound=len(trace) + 1, cap=cap)
    return min(
        len(trace) + len(w) - 2 * lcs_length(trace, w) for w in language
    )


def brute_sta(
    t: ProcessTree, label: str, loop_bound: int = 3
) -> frozenset[Cardinality]:
    """Cardinality classes realized by ``label``, from the brute language.

    Three body executions per loop are enough to witness every class: the
    abstract loop fixpoint over the three-valued domain saturates after at
    most two extension rounds.
    """
    classes = set()
    for trace in brute_language(t, loop_bound=loop_bound):
        count = sum(1 for a in trace if a == label)
        classes.add(Cardinality(min(count, 2)))
    return frozenset(classes)


def random_tree(
    rng: random.Random,
    max_nodes: int = 10,
    alphabet: str = "abcde",
    tau_chance: float = 0.15,
    loops: bool = True,
) -> ProcessTree:
    """A random process tree with at most ``max_nodes`` nodes."""

    operators = [sequence, choice, parallel] + ([loop] if loops else [])

    def gen(budget: int) -> ProcessTree:
        if budget < 3 or rng.random() < 0.3:
            if rng.random() < tau_chance:
                return tau()
            return activity(rng.choice(alphabet))
        build = rng.choice(operators)
        if build is loop:
            split = rng.randint(1, budget - 2)
            return loop(gen(split), gen(budget - 1 - split))
        arity = rng.randint(2, min(3, budget - 1))
        budgets = []
        remaining = budget - 1
        for slot in range(arity, 0, -1):
            share = rng.randint(1, max(1, remaining - (slot - 1)))
            budgets.append(share)
            remaining -= share
        return build(*(gen(b) for b in budgets))

    return gen(rng.randint(2, max_nodes))


def random_trace(rng: random.Random, alphabet: str, max_length: int) -> Trace:
    return tuple(
        rng.choice(alphabet) for _ in range(rng.randint(0, max_length))
    )


def mutate_trace(rng: random.Random, trace: Trace, alphabet: str) -> Trace:
    """Insert, delete, or replace one position (possibly a fresh symbol)."""
    symbols = alphabet + "z"
    result = list(trace)
    kind = rng.choice(("insert", "delete", "replace"))
    if kind == "delete" and result:
        del result[rng.randrange(len(result))]
    elif kind == "replace" and result:
        result[rng.randrange(len(result))] = rng.choice(symbols)
    else:
        result.insert(rng.randint(0, len(result)), rng.choice(symbols))
    return tuple(result)


# -- oracle equivalence drivers (shared with the acceptance suite) -------------


def check_alignment_costs_against_oracle(instances: int, seed: int) -> int:
    """Optimal alignment cost vs exhaustive minimum; returns instances run."""
    from treefreeze.alignments import check_alignment, optimal_alignment

    rng = random.Random(seed)
    checked = 0
    while checked < instances:
        t = random_tree(rng, max_nodes=10)
        alphabet = "".join(sorted(t.alphabet())) or "a"
        if rng.random() < 0.5:
            try:
                pool = sorted(brute_language(t, loop_bound=2, cap=2000))
            except OracleExplosion:
                continue
            trace = mutate_trace(rng, rng.choice(pool), alphabet)
        else:
            trace = random_trace(rng, alphabet + "q", max_length=6)
        if len(trace) > 6:
            continue
        try:
            expected = brute_alignment_cost(t, trace)
        except OracleExplosion:
            continue
        alignment = optimal_alignment(t, trace)
        assert alignment.cost == expected, (
            f"tree {t!r}, trace {trace}: got {alignment.cost}, "
            f"oracle {expected}"
        )
        logs, visible = check_alignment(t, trace, alignment.moves)
        assert logs + visible == alignment.cost
        assert logs == alignment.log_moves
        assert visible == alignment.visible_model_moves
        checked += 1
    return checked


def check_sta_against_oracle(instances: int, seed: int) -> int:
    """Cardinality abstraction vs brute-force classes; returns instances."""
    from treefreeze.semantics import sta

    rng = random.Random(seed)
    checked = 0
    while checked < instances:
        t = random_tree(rng, max_nodes=10)
        alphabet = sorted(t.alphabet()) or ["a"]
        label = rng.choice(alphabet + ["missing"])
        try:
            expected = brute_sta(t, label)
        except OracleExplosion:
            continue
        assert sta(t, label) == expected, (t, label)
        checked += 1
    return checked


def check_reduce_against_oracle(instances: int, seed: int) -> int:
    """Reduction preserves the bounded language; returns instances run."""
    from treefreeze.trees import reduce_tree

    rng = random.Random(seed)
    checked = 0
    while checked < instances:
        t = random_tree(rng, max_nodes=12)
        try:
            before = brute_language(t, loop_bound=2)
            after = brute_language(reduce_tree(t), loop_bound=2)
        except OracleExplosion:
            continue
        assert after == before, t
        checked += 1
    return checked


def freezable_roots(rng: random.Random, t: ProcessTree) -> list[int]:
    """One or two pairwise non-nested non-root subtrees with activities."""
    candidates = [
        v
        for v in range(1, len(t))
        if subtree_at(t, v).alphabet()
    ]
    rng.shuffle(candidates)
    picked: list[int] = []
    for v in candidates:
        lo, hi = v, v + t.sizes[v]
        if all(hi2 <= lo or hi <= lo2 for lo2, hi2 in
               ((w, w + t.sizes[w]) for w in picked)):
            picked.append(v)
        if len(picked) == 2:
            break
    return sorted(picked)


def check_freezing_contract(instances: int, seed: int) -> int:
    """Both freezing strategies keep frozen subtrees and accepted traces.

    Random instances: a tree of at most 12 nodes, one or two non-nested
    frozen subtrees, up to two previously added traces drawn from the
    bounded language, and a new trace that is a mutation of a language
    trace.  Asserts the result of each strategy accepts all added traces
    and still contains every frozen subtree verbatim.
    """
    from treefreeze.freezing import freeze, freeze_advanced, freeze_baseline
    from treefreeze.semantics import accepts
    from treefreeze.trees import is_subtree

    rng = random.Random(seed)
    checked = 0
    while checked < instances:
        t = random_tree(rng, max_nodes=12)
        roots = freezable_roots(rng, t)
        if not roots:
            continue
        try:
            pool = sorted(brute_language(t, loop_bound=2, cap=2000))
        except OracleExplosion:
            continue
        previous = rng.sample(pool, k=min(len(pool), rng.randint(0, 2)))
        alphabet = "".join(sorted(t.alphabet()))
        trace = mutate_trace(rng, rng.choice(pool), alphabet)
        impl = rng.choice(("reference", "rebuild"))
        selection = freeze(t, roots)
        for strategy in (freeze_advanced, freeze_baseline):
            result = strategy(t, selection, trace, previous, impl=impl)
            context = (t, roots, previous, trace, impl, strategy.__name__)
            assert accepts(result, trace), context
            for p in previous:
                assert accepts(result, p), context
            for sub in selection.subtrees:
                assert is_subtree(sub.tree, result), context
        checked += 1
    return checked
