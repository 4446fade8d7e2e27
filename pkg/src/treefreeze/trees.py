"""Process trees: construction, parsing, serialization and structural surgery.

A process tree is an ordered rooted tree whose inner nodes carry one of the
four operators (sequence ``->``, exclusive choice ``X``, parallel ``+``,
loop ``*``) and whose leaves carry either an activity name or the silent
label tau.  Loops have exactly two children: the body and the redo part.

Trees are immutable values.  Nodes are addressed by dense integer ids in
preorder, so the root is always node ``0`` and the nodes of the subtree
rooted at ``v`` occupy the contiguous range ``[v, v + size(v))``.  All
structural operations return new trees and never mutate their inputs.
"""
from __future__ import annotations

import io
import re
import warnings
from enum import Enum
from typing import Iterable, Iterator, Optional, Union

from .errors import ParseError


class Operator(Enum):
    SEQUENCE = "->"
    CHOICE = "X"
    PARALLEL = "+"
    LOOP = "*"

    @property
    def glyph(self) -> str:
        return _GLYPHS[self]

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Operator({self.value!r})"


_GLYPHS = {
    Operator.SEQUENCE: "→",   # →
    Operator.CHOICE: "×",     # ×
    Operator.PARALLEL: "∧",   # ∧
    Operator.LOOP: "↻",       # ↻
}

#: A node label: an operator, an activity name, or ``None`` for tau.
Label = Union[Operator, str, None]

TAU_GLYPH = "τ"  # τ

_IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class ProcessTree:
    """An immutable process tree over dense preorder node ids."""

    __slots__ = (
        "labels", "children", "_parents", "_sizes", "_keys", "_hash", "__weakref__",
    )

    def __init__(self, labels: Iterable[Label], children: Iterable[Iterable[int]]):
        self.labels: tuple[Label, ...] = tuple(labels)
        self.children: tuple[tuple[int, ...], ...] = tuple(
            tuple(kids) for kids in children
        )
        if len(self.labels) != len(self.children):
            raise ValueError("labels and children must have equal length")
        if not self.labels:
            raise ValueError("a process tree has at least one node")
        self._parents: Optional[tuple[int, ...]] = None
        self._sizes: Optional[tuple[int, ...]] = None
        self._keys: Optional[tuple[str, ...]] = None
        self._hash: Optional[int] = None

    # -- basic shape ------------------------------------------------------

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[int]:
        return iter(range(len(self.labels)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProcessTree):
            return NotImplemented
        return self.labels == other.labels and self.children == other.children

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.labels, self.children))
        return self._hash

    def __repr__(self) -> str:
        return f"ProcessTree({serialize_tree(self)!r})"

    def is_leaf(self, v: int) -> bool:
        return not self.children[v]

    def is_operator(self, v: int) -> bool:
        return isinstance(self.labels[v], Operator)

    @property
    def parents(self) -> tuple[int, ...]:
        """Parent id per node; the root maps to ``-1``."""
        if self._parents is None:
            parents = [-1] * len(self.labels)
            for v, kids in enumerate(self.children):
                for c in kids:
                    parents[c] = v
            self._parents = tuple(parents)
        return self._parents

    @property
    def sizes(self) -> tuple[int, ...]:
        """Subtree size per node."""
        if self._sizes is None:
            sizes = [1] * len(self.labels)
            for v in range(len(self.labels) - 1, -1, -1):
                sizes[v] = 1 + sum(sizes[c] for c in self.children[v])
            self._sizes = tuple(sizes)
        return self._sizes

    @property
    def keys(self) -> tuple[str, ...]:
        """Canonical serialization of the subtree rooted at each node."""
        if self._keys is None:
            keys: list[str] = [""] * len(self.labels)
            for v in range(len(self.labels) - 1, -1, -1):
                label = self.labels[v]
                if isinstance(label, Operator):
                    keys[v] = label.value + "(" + ",".join(keys[c] for c in self.children[v]) + ")"
                elif label is None:
                    keys[v] = "tau"
                else:
                    keys[v] = label
            self._keys = tuple(keys)
        return self._keys

    def alphabet(self) -> frozenset[str]:
        """The set of activity names occurring on leaves (tau excluded)."""
        return frozenset(l for l in self.labels if isinstance(l, str))

    def node_text(self, v: int) -> str:
        """Human-readable node label: operator glyph, activity, or tau."""
        label = self.labels[v]
        if isinstance(label, Operator):
            return label.glyph
        if label is None:
            return TAU_GLYPH
        return label


# -- constructors ----------------------------------------------------------


def activity(name: str) -> ProcessTree:
    if not _IDENTIFIER.fullmatch(name):
        raise ValueError(f"invalid activity name: {name!r}")
    if name == "tau":
        raise ValueError("'tau' denotes the silent label; use tau() instead")
    return ProcessTree((name,), ((),))


def tau() -> ProcessTree:
    return ProcessTree((None,), ((),))


def operator_node(op: Operator, *subtrees: ProcessTree) -> ProcessTree:
    if not subtrees:
        raise ValueError(f"operator {op.value} needs at least one child")
    if op is Operator.LOOP and len(subtrees) != 2:
        raise ValueError("loop takes exactly two children (body, redo)")
    labels: list[Label] = [op]
    children: list[tuple[int, ...]] = [()]
    offset = 1
    top: list[int] = []
    for sub in subtrees:
        top.append(offset)
        labels.extend(sub.labels)
        children.extend(tuple(c + offset for c in kids) for kids in sub.children)
        offset += len(sub)
    children[0] = tuple(top)
    return ProcessTree(labels, children)


def sequence(*subtrees: ProcessTree) -> ProcessTree:
    return operator_node(Operator.SEQUENCE, *subtrees)


def choice(*subtrees: ProcessTree) -> ProcessTree:
    return operator_node(Operator.CHOICE, *subtrees)


def parallel(*subtrees: ProcessTree) -> ProcessTree:
    return operator_node(Operator.PARALLEL, *subtrees)


def loop(body: ProcessTree, redo: ProcessTree) -> ProcessTree:
    return operator_node(Operator.LOOP, body, redo)


def sequence_of(trace: Iterable[str]) -> ProcessTree:
    """The sequence tree of a trace; the empty trace yields a tau leaf."""
    items = [activity(a) for a in trace]
    if not items:
        return tau()
    if len(items) == 1:
        return items[0]
    return sequence(*items)


# -- textual format --------------------------------------------------------


class UnaryOperatorWarning(UserWarning):
    """Emitted when parsing accepts a (degenerate) single-child operator."""


_TOKEN = re.compile(r"\s*(->|[A-Za-z_][A-Za-z0-9_]*|[X+*(),])")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens: list[tuple[str, int]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise ParseError(f"unexpected character {rest[0]!r}", len(text) - len(rest))
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()
    return tokens


_OPERATOR_TOKENS = {op.value: op for op in Operator}


def parse_tree(text: str) -> ProcessTree:
    """Parse the textual tree format, e.g. ``->(*(X(a,b),tau),c)``.

    Whitespace is insignificant.  ``tau`` denotes the silent leaf.  The
    token ``X`` is an operator when followed by ``(`` and an ordinary
    activity otherwise.  Single-child sequence/choice/parallel nodes are
    accepted with a :class:`UnaryOperatorWarning`; loops must have exactly
    two children.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty input", 0)
    index = 0

    def peek() -> Optional[str]:
        return tokens[index][0] if index < len(tokens) else None

    def take() -> tuple[str, int]:
        nonlocal index
        if index >= len(tokens):
            raise ParseError("unexpected end of input", len(text))
        tok = tokens[index]
        index += 1
        return tok

    def parse_node() -> ProcessTree:
        tok, pos = take()
        if tok in _OPERATOR_TOKENS and (tok != "X" or peek() == "("):
            op = _OPERATOR_TOKENS[tok]
            opener, opos = take()
            if opener != "(":
                raise ParseError(f"expected '(' after operator {tok!r}", opos)
            kids = [parse_node()]
            while peek() == ",":
                take()
                kids.append(parse_node())
            closer, cpos = take()
            if closer != ")":
                raise ParseError(f"expected ',' or ')', got {closer!r}", cpos)
            if op is Operator.LOOP and len(kids) != 2:
                raise ParseError(
                    f"loop takes exactly two children, got {len(kids)}", pos
                )
            if op is not Operator.LOOP and len(kids) == 1:
                warnings.warn(
                    f"single-child {tok!r} at position {pos}",
                    UnaryOperatorWarning,
                    stacklevel=3,
                )
            return operator_node(op, *kids)
        if tok == "tau":
            if peek() == "(":
                raise ParseError("tau is a leaf and cannot have children", pos)
            return tau()
        if _IDENTIFIER.fullmatch(tok):
            if peek() == "(":
                raise ParseError(f"activity {tok!r} cannot have children", pos)
            return ProcessTree((tok,), ((),))
        raise ParseError(f"unexpected token {tok!r}", pos)

    result = parse_node()
    if index != len(tokens):
        raise ParseError(f"trailing input {tokens[index][0]!r}", tokens[index][1])
    return result


def serialize_tree(t: ProcessTree) -> str:
    """Canonical text for a tree; parse/serialize round-trip is exact."""
    return t.keys[0]


# -- structural queries and surgery ----------------------------------------


def subtree_at(t: ProcessTree, v: int) -> ProcessTree:
    """A fresh tree equal to the subtree rooted at node ``v``."""
    _check_node(t, v)
    size = t.sizes[v]
    labels = t.labels[v : v + size]
    children = tuple(
        tuple(c - v for c in t.children[u]) for u in range(v, v + size)
    )
    return ProcessTree(labels, children)


def replace_node(t: ProcessTree, v: int, replacement: ProcessTree) -> ProcessTree:
    """Replace the subtree rooted at ``v`` with ``replacement``.

    The replacement's nodes take over the id range starting at ``v``; ids of
    nodes after the replaced range shift by the size difference.
    """
    _check_node(t, v)
    size = t.sizes[v]
    delta = len(replacement) - size
    labels = t.labels[:v] + replacement.labels + t.labels[v + size :]

    def shift(c: int) -> int:
        return c + delta if c >= v + size else c

    children: list[tuple[int, ...]] = []
    for u in range(v):
        children.append(tuple(shift(c) for c in t.children[u]))
    for kids in replacement.children:
        children.append(tuple(c + v for c in kids))
    for u in range(v + size, len(t)):
        children.append(tuple(shift(c) for c in t.children[u]))
    return ProcessTree(labels, children)


def lca(t: ProcessTree, nodes: Iterable[int]) -> int:
    """Lowest common ancestor of a non-empty set of nodes."""
    ids = sorted(set(nodes))
    if not ids:
        raise ValueError("lca of an empty node set is undefined")
    for v in ids:
        _check_node(t, v)
    # In preorder, an ancestor of all of them is an ancestor of both the
    # smallest and the largest id; walk up from the smallest.
    lo, hi = ids[0], ids[-1]
    v = lo
    while not (v <= hi < v + t.sizes[v]):
        v = t.parents[v]
    return v


def is_strict_subtree_node(t: ProcessTree, ancestor: int, v: int) -> bool:
    """Whether ``v`` lies in the subtree rooted at ``ancestor``."""
    return ancestor <= v < ancestor + t.sizes[ancestor]


def find_subtree(t: ProcessTree, needle: ProcessTree) -> tuple[int, ...]:
    """Node ids of all subtrees of ``t`` structurally equal to ``needle``."""
    target = serialize_tree(needle)
    return tuple(v for v in t if t.keys[v] == target)


def is_subtree(needle: ProcessTree, t: ProcessTree) -> bool:
    """Whether ``needle`` occurs in ``t`` as a complete subtree.

    The containment is structural: labels, operators and child order must
    match exactly.
    """
    return bool(find_subtree(t, needle))


def path_of(t: ProcessTree, v: int) -> tuple[int, ...]:
    """Root-relative child-index path of node ``v``."""
    _check_node(t, v)
    path: list[int] = []
    while v != 0:
        p = t.parents[v]
        path.append(t.children[p].index(v))
        v = p
    return tuple(reversed(path))


def resolve_path(t: ProcessTree, path: Iterable[int]) -> int:
    """Node id addressed by a root-relative child-index path."""
    v = 0
    for step in path:
        kids = t.children[v]
        if not isinstance(step, int) or step < 0 or step >= len(kids):
            raise ValueError(
                f"path step {step!r} out of range at node {v} "
                f"({len(kids)} children)"
            )
        v = kids[step]
    return v


def replace_leaf_labels(t: ProcessTree, mapping: dict[str, Label]) -> ProcessTree:
    """Relabel leaves whose activity name occurs in ``mapping``."""
    labels = tuple(
        mapping[l] if isinstance(l, str) and l in mapping else l for l in t.labels
    )
    return ProcessTree(labels, t.children)


def _check_node(t: ProcessTree, v: int) -> None:
    if not isinstance(v, int) or v < 0 or v >= len(t):
        raise ValueError(f"node id {v!r} out of range (tree has {len(t)} nodes)")


# -- DOT export -------------------------------------------------------------


def to_dot(t: ProcessTree, highlight: Iterable[int] = ()) -> str:
    """Graphviz DOT text: one node per tree node, edges parent -> child.

    ``highlight`` nodes (e.g. frozen roots) are drawn filled.
    """
    marked = set(highlight)
    out = io.StringIO()
    out.write("digraph processtree {\n")
    out.write("  node [shape=circle, fontname=\"Helvetica\"];\n")
    for v in t:
        shape = "circle" if t.is_operator(v) else "box"
        attrs = [f"label=\"{t.node_text(v)}\"", f"shape={shape}"]
        if v in marked:
            attrs.append("style=filled")
            attrs.append("fillcolor=lightblue")
        out.write(f"  n{v} [{', '.join(attrs)}];\n")
    for v in t:
        for c in t.children[v]:
            out.write(f"  n{v} -> n{c};\n")
    out.write("}\n")
    return out.getvalue()


# -- language-preserving reduction ------------------------------------------


def reduce_tree(
    t: ProcessTree, protected: Iterable[int] = ()
) -> ProcessTree:
    """Apply language-preserving reduction rules until a fixpoint.

    Rules: collapse single-child sequence/choice/parallel nodes; flatten
    nested nodes with the same sequence/choice/parallel operator; drop
    duplicate children (and in particular duplicate taus) under choice;
    drop tau children of sequence and parallel nodes; rewrite a loop with
    silent body and redo to a single tau.

    ``protected`` lists node ids (in ``t``) whose subtrees must survive
    verbatim: no rule rewrites inside them, removes them, or merges their
    root into a surrounding node.
    """
    protected_set = {v for v in protected}
    for v in protected_set:
        _check_node(t, v)

    # Work on a mutable nested form: [label, [children], locked].
    def build(v: int) -> list:
        locked = v in protected_set
        return [t.labels[v], [build(c) for c in t.children[v]], locked]

    root = build(0)

    def key(n: list) -> str:
        label, kids, _ = n
        if isinstance(label, Operator):
            return label.value + "(" + ",".join(key(k) for k in kids) + ")"
        return "tau" if label is None else label

    def is_tau_leaf(n: list) -> bool:
        return n[0] is None and not n[1]

    def simplify(n: list) -> list:
        label, kids, locked = n
        if locked:
            return n
        kids = [simplify(k) for k in kids]
        n[1] = kids
        if not isinstance(label, Operator):
            return n
        if label in (Operator.SEQUENCE, Operator.PARALLEL):
            # Flatten same-operator children, then drop redundant taus.
            flat: list[list] = []
            for k in kids:
                if k[0] is label and not k[2]:
                    flat.extend(k[1])
                else:
                    flat.append(k)
            keep = [k for k in flat if k[2] or not is_tau_leaf(k)]
            if not keep:
                keep = flat[:1]
            n[1] = keep
        elif label is Operator.CHOICE:
            flat = []
            for k in kids:
                if k[0] is label and not k[2]:
                    flat.extend(k[1])
                else:
                    flat.append(k)
            seen: set[str] = set()
            keep = []
            for k in flat:
                if k[2]:
                    keep.append(k)
                    continue
                k_key = key(k)
                if k_key in seen:
                    continue
                seen.add(k_key)
                keep.append(k)
            n[1] = keep
        elif label is Operator.LOOP:
            body, redo = n[1]
            if (
                is_tau_leaf(body)
                and is_tau_leaf(redo)
                and not body[2]
                and not redo[2]
            ):
                return [None, [], False]
        if label is not Operator.LOOP and len(n[1]) == 1:
            return n[1][0]
        return n

    previous = None
    current = key(root)
    while current != previous:
        root = simplify(root)
        previous, current = current, key(root)

    def rebuild(n: list) -> ProcessTree:
        label, kids, _ = n
        if not kids:
            return ProcessTree((label,), ((),))
        return operator_node(label, *[rebuild(k) for k in kids])

    return rebuild(root)
