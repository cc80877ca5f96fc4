"""Command ASTs: rule filtering, enumeration, seeded sampling, rendering and parsing.

A command is ``verb NP (that is REL NP (and REL NP)*)* [adverb]``. Noun phrases
carry an optional size modifier, an optional color and a shape term, where
``shape=None`` is the ``object`` wildcard.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterator, Optional, Sequence

from .domain import (
    ITEM_SHAPES,
    POSITIONAL,
    RELATIONS,
    SHARED_ATTRIBUTE,
    WILDCARD,
    Adverb,
    Color,
    ContractError,
    Relation,
    Shape,
    SizeModifier,
    Verb,
)


class Determiner(str, Enum):
    A = "a"
    THE = "the"
    UNSET = "unset"


class Pattern(str, Enum):
    SIMPLE = "simple"
    ONE_REL = "1rel"
    TWO_REL = "2rel"
    THREE_REL = "c1"
    NESTED_REL = "c2"


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at token {position})")
        self.position = position


class ExhaustionError(RuntimeError):
    """More items were requested than the valid population holds."""


class InconsistencyError(RuntimeError):
    """A command and a world disagree (e.g. an NP with no matching object)."""


@dataclass(frozen=True)
class ObjectSpec:
    size_mod: Optional[SizeModifier] = None
    color: Optional[Color] = None
    shape: Optional[Shape] = None  # None is the ``object`` wildcard
    determiner: Determiner = Determiner.UNSET

    def descriptors(self) -> tuple:
        return (self.size_mod, self.color, self.shape)

    def words(self) -> list[str]:
        out = []
        if self.size_mod is not None:
            out.append(self.size_mod.value)
        if self.color is not None:
            out.append(self.color.value)
        out.append(WILDCARD if self.shape is None else self.shape.value)
        return out

    def __str__(self) -> str:
        return " ".join(self.words())


@dataclass(frozen=True)
class RelClause:
    relation: Relation
    node: "ObjectNode"


@dataclass(frozen=True)
class ObjectNode:
    spec: ObjectSpec
    clauses: tuple[RelClause, ...] = ()


@dataclass(frozen=True)
class NodeRef:
    """One NP in preorder, with the index of its parent and the linking relation."""

    index: int
    spec: ObjectSpec
    parent: int  # -1 for the root
    relation: Optional[Relation]
    node: ObjectNode


@dataclass(frozen=True)
class Command:
    verb: Verb
    root: ObjectNode
    adverb: Optional[Adverb] = None

    @property
    def pattern(self) -> Pattern:
        return infer_pattern(self.root)

    def nodes(self) -> list[NodeRef]:
        out: list[NodeRef] = []

        def walk(node: ObjectNode, parent: int, relation) -> None:
            idx = len(out)
            out.append(NodeRef(idx, node.spec, parent, relation, node))
            for clause in node.clauses:
                walk(clause.node, idx, clause.relation)

        walk(self.root, -1, None)
        return out

    def has_size_modifier(self) -> bool:
        return any(n.spec.size_mod is not None for n in self.nodes())

    def key(self) -> str:
        """Determiner-independent identity string."""
        return render(self, strict=False)

    def __str__(self) -> str:
        return render(self, strict=False)


def infer_pattern(root: ObjectNode) -> Pattern:
    k = len(root.clauses)
    nested = [c for c in root.clauses if c.node.clauses]
    if not nested:
        try:
            return (Pattern.SIMPLE, Pattern.ONE_REL, Pattern.TWO_REL, Pattern.THREE_REL)[k]
        except IndexError:
            raise ContractError(f"{k} conjoined clauses is outside the supported patterns")
    if k == 1:
        mid = root.clauses[0].node
        if len(mid.clauses) == 1 and not mid.clauses[0].node.clauses:
            return Pattern.NESTED_REL
    raise ContractError("clause nesting outside the supported patterns")


# ---------------------------------------------------------------------------
# rules


def rule_filter(command) -> Optional[str]:
    """Return ``None`` if the command is acceptable, else the id of the first broken rule.

    Accepts an AST or a surface string; modifier order (rule ``"4"``) can only be
    violated in surface form. Besides the numbered rules this also rejects
    ``"W"`` (wildcard shape in a clause-free command), ``"S"`` (one symmetric
    clause whose NP repeats the head NP, which is never uniquely groundable) and
    ``"C2"`` (non-positional relation in a nested chain).
    """
    if isinstance(command, str):
        try:
            command, misordered = _parse(command.split(), lenient=True)
        except ParseError:
            return "syntax"
        if misordered:
            return "4"
    try:
        pattern = command.pattern
    except ContractError:
        return "structure"
    nodes = command.nodes()
    for ref in nodes:
        for clause in ref.node.clauses:
            rel, child = clause.relation, clause.node.spec
            attr = SHARED_ATTRIBUTE.get(rel)
            if attr is not None:
                if getattr(ref.spec, attr) is not None or getattr(child, attr) is not None:
                    return {"shape": "1A", "color": "1B", "size_mod": "1C"}[attr]
            if rel is Relation.INSIDE_OF and child.shape is not Shape.BOX:
                return "2"
    for ref in nodes:
        if ref.spec.shape is Shape.BOX and ref.relation is not Relation.INSIDE_OF:
            return "2"
        rels = [c.relation for c in ref.node.clauses]
        if len(set(rels)) != len(rels):
            return "3"
    if pattern is Pattern.SIMPLE and command.root.spec.shape is None:
        return "W"
    if pattern is Pattern.ONE_REL:
        clause = command.root.clauses[0]
        if clause.relation.symmetric and clause.node.spec.descriptors() == command.root.spec.descriptors():
            return "S"
    if pattern is Pattern.NESTED_REL:
        if any(r.relation not in POSITIONAL for r in nodes[1:]):
            return "C2"
    return None


def is_valid(command) -> bool:
    return rule_filter(command) is None


# ---------------------------------------------------------------------------
# enumeration and sampling

_SIZE_CHOICES = (None, SizeModifier.SMALL, SizeModifier.BIG)
_COLOR_CHOICES = (None,) + tuple(Color)
_ROOT_SHAPES = (None,) + ITEM_SHAPES
_CLAUSE_SHAPES = _ROOT_SHAPES + (Shape.BOX,)
_ADVERB_CHOICES = (None,) + tuple(Adverb)


def _item_specs(shapes=ITEM_SHAPES) -> Iterator[ObjectSpec]:
    for size, color, shape in itertools.product(_SIZE_CHOICES, _COLOR_CHOICES, shapes):
        yield ObjectSpec(size, color, shape)


def enumerate_simple() -> list[Command]:
    """Every rule-valid clause-free command, in a fixed order."""
    out = []
    for verb, spec, adverb in itertools.product(Verb, _item_specs(), _ADVERB_CHOICES):
        c = Command(verb, ObjectNode(spec), adverb)
        if is_valid(c):
            out.append(c)
    return out


_N_CLAUSES = {Pattern.ONE_REL: 1, Pattern.TWO_REL: 2, Pattern.THREE_REL: 3}


def _count_specs(forbidden: set, box: bool = False) -> int:
    sizes = 1 if "size_mod" in forbidden else len(_SIZE_CHOICES)
    colors = 1 if "color" in forbidden else len(_COLOR_CHOICES)
    if box:
        shapes = 1
    else:
        shapes = 1 if "shape" in forbidden else len(_ROOT_SHAPES)
    return sizes * colors * shapes


def _forbidden(*relations: Relation) -> set:
    return {SHARED_ATTRIBUTE[r] for r in relations if r in SHARED_ATTRIBUTE}


def population_size(pattern: Pattern) -> int:
    """Number of distinct rule-valid commands (determiners excluded) for a pattern."""
    pattern = Pattern(pattern)
    per_core = len(Verb) * len(_ADVERB_CHOICES)
    if pattern is Pattern.SIMPLE:
        return len(enumerate_simple())
    if pattern is Pattern.NESTED_REL:
        n = 0
        for r1, r2 in itertools.product(POSITIONAL, repeat=2):
            n += (_count_specs(_forbidden(r1)) * _count_specs(_forbidden(r1, r2))
                  * _count_specs(_forbidden(r2)))
        return n * per_core
    k = _N_CLAUSES[pattern]
    n = 0
    for rels in itertools.permutations(RELATIONS, k):
        term = _count_specs(_forbidden(*rels))
        for r in rels:
            term *= _count_specs(_forbidden(r), box=r is Relation.INSIDE_OF)
        n += term
    if pattern is Pattern.ONE_REL:
        # rule S: the clause NP equals the head NP under a symmetric relation
        n -= sum(_count_specs(_forbidden(r)) for r in RELATIONS if r.symmetric)
    return n * per_core


def _random_spec(rng: random.Random, shapes: Sequence) -> ObjectSpec:
    return ObjectSpec(rng.choice(_SIZE_CHOICES), rng.choice(_COLOR_CHOICES), rng.choice(shapes))


def random_command(rng: random.Random, pattern: Pattern) -> Command:
    """Draw one command by rejection; uniform over the valid population of ``pattern``."""
    pattern = Pattern(pattern)
    while True:
        verb = rng.choice(tuple(Verb))
        adverb = rng.choice(_ADVERB_CHOICES)
        root_spec = _random_spec(rng, _ROOT_SHAPES)
        if pattern is Pattern.SIMPLE:
            root = ObjectNode(root_spec)
        elif pattern is Pattern.NESTED_REL:
            r1, r2 = rng.choice(POSITIONAL), rng.choice(POSITIONAL)
            leaf = ObjectNode(_random_spec(rng, _ROOT_SHAPES))
            mid = ObjectNode(_random_spec(rng, _ROOT_SHAPES), (RelClause(r2, leaf),))
            root = ObjectNode(root_spec, (RelClause(r1, mid),))
        else:
            rels = rng.sample(RELATIONS, _N_CLAUSES[pattern])
            clauses = tuple(RelClause(r, ObjectNode(_random_spec(rng, _CLAUSE_SHAPES))) for r in rels)
            root = ObjectNode(root_spec, clauses)
        c = Command(verb, root, adverb)
        if is_valid(c):
            return c


def sample_commands(n: int, pattern: Pattern, seed: int) -> list[Command]:
    """``n`` distinct valid commands of ``pattern``; identical output for identical seeds."""
    pattern = Pattern(pattern)
    available = population_size(pattern)
    if n > available:
        raise ExhaustionError(f"requested {n} {pattern.value} commands, only {available} exist")
    rng = random.Random(f"commands:{pattern.value}:{seed}")
    if pattern is Pattern.SIMPLE:
        pool = enumerate_simple()
        return rng.sample(pool, n)
    seen: set[str] = set()
    out: list[Command] = []
    while len(out) < n:
        c = random_command(rng, pattern)
        k = c.key()
        if k not in seen:
            seen.add(k)
            out.append(c)
    return out


# ---------------------------------------------------------------------------
# AST helpers


def map_specs(command: Command, fn) -> Command:
    """Rebuild ``command`` with ``fn(index, spec)`` applied to every NP (preorder)."""
    counter = itertools.count()

    def rebuild(node: ObjectNode) -> ObjectNode:
        spec = fn(next(counter), node.spec)
        return ObjectNode(spec, tuple(RelClause(c.relation, rebuild(c.node)) for c in node.clauses))

    return replace(command, root=rebuild(command.root))


def prune(command: Command, keep_edges: set[int]) -> Command:
    """Drop every clause whose child NP index is not in ``keep_edges`` (with its subtree)."""

    def rebuild(node: ObjectNode, index: int) -> tuple[ObjectNode, int]:
        nxt = index + 1
        kept = []
        for clause in node.clauses:
            child_index = nxt
            child, nxt = rebuild(clause.node, child_index)
            if child_index in keep_edges:
                kept.append(RelClause(clause.relation, child))
        return ObjectNode(node.spec, tuple(kept)), nxt

    return replace(command, root=rebuild(command.root, 0)[0])


def strip_determiners(command: Command) -> Command:
    return map_specs(command, lambda i, s: replace(s, determiner=Determiner.UNSET))


def ground_determiners(command: Command, world) -> Command:
    """Set ``the`` on NPs matched by exactly one world object and ``a`` elsewhere."""
    from .graphs import candidate_mask

    def fn(i: int, spec: ObjectSpec) -> ObjectSpec:
        count = bin(candidate_mask(spec, world)).count("1")
        if count == 0:
            raise InconsistencyError(f"no object in the world matches '{spec}'")
        return replace(spec, determiner=Determiner.THE if count == 1 else Determiner.A)

    return map_specs(command, fn)


# ---------------------------------------------------------------------------
# surface form


def render_tokens(command: Command, strict: bool = True) -> list[str]:
    out = command.verb.value.split()

    def np(node: ObjectNode) -> None:
        det = node.spec.determiner
        if det is Determiner.UNSET:
            if strict:
                raise ContractError("render needs grounded determiners")
            det = Determiner.A
        out.append(det.value)
        out.extend(node.spec.words())
        for i, clause in enumerate(node.clauses):
            out.extend(("that", "is") if i == 0 else ("and",))
            out.extend(clause.relation.value.split())
            np(clause.node)

    np(command.root)
    if command.adverb is not None:
        out.extend(command.adverb.value.split())
    return out


def render(command: Command, strict: bool = True) -> str:
    return " ".join(render_tokens(command, strict))


_VERB_PHRASES = [(v.value.split(), v) for v in Verb]
_ADVERB_PHRASES = [(a.value.split(), a) for a in Adverb]
_REL_PHRASES = [(r.value.split(), r) for r in Relation]
_SIZE_WORDS = {m.value: m for m in SizeModifier}
_COLOR_WORDS = {c.value: c for c in Color}
_SHAPE_WORDS = {s.value: s for s in Shape}
_SHAPE_WORDS[WILDCARD] = None
_DETERMINERS = {"a": Determiner.A, "the": Determiner.THE}


class _Parser:
    def __init__(self, tokens: Sequence[str], lenient: bool):
        self.toks = list(tokens)
        self.pos = 0
        self.lenient = lenient
        self.misordered = False

    def peek(self, phrase: Sequence[str]) -> bool:
        return self.toks[self.pos:self.pos + len(phrase)] == list(phrase)

    def phrase(self, table, what: str):
        for words, value in table:
            if self.peek(words):
                self.pos += len(words)
                return value
        raise ParseError(f"expected {what}", self.pos)

    def take(self) -> str:
        if self.pos >= len(self.toks):
            raise ParseError("unexpected end of command", self.pos)
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def spec(self) -> ObjectSpec:
        det = _DETERMINERS.get(self.take())
        if det is None:
            raise ParseError("expected determiner", self.pos - 1)
        size = color = None
        seen = []
        while self.pos < len(self.toks) and self.toks[self.pos] in {**_SIZE_WORDS, **_COLOR_WORDS}:
            word = self.take()
            if word in _SIZE_WORDS:
                if size is not None:
                    raise ParseError("repeated size descriptor", self.pos - 1)
                size = _SIZE_WORDS[word]
                if color is not None:
                    if not self.lenient:
                        raise ParseError("size must precede color", self.pos - 1)
                    self.misordered = True
            else:
                if color is not None:
                    raise ParseError("repeated color descriptor", self.pos - 1)
                color = _COLOR_WORDS[word]
            seen.append(word)
        word = self.take()
        if word not in _SHAPE_WORDS:
            raise ParseError(f"expected shape, got {word!r}", self.pos - 1)
        return ObjectSpec(size, color, _SHAPE_WORDS[word], det)

    def node(self) -> ObjectNode:
        spec = self.spec()
        clauses = []
        if self.peek(("that", "is")):
            self.pos += 2
            clauses.append(self.clause())
            while self.peek(("and",)):
                self.pos += 1
                clauses.append(self.clause())
        return ObjectNode(spec, tuple(clauses))

    def clause(self) -> RelClause:
        rel = self.phrase(_REL_PHRASES, "relation")
        return RelClause(rel, self.node())

    def command(self) -> Command:
        verb = self.phrase(_VERB_PHRASES, "verb")
        root = self.node()
        adverb = None
        if self.pos < len(self.toks):
            adverb = self.phrase(_ADVERB_PHRASES, "adverb or end of command")
        if self.pos != len(self.toks):
            raise ParseError("trailing tokens", self.pos)
        return Command(verb, root, adverb)


def _parse(tokens: Sequence[str], lenient: bool = False) -> tuple[Command, bool]:
    p = _Parser(tokens, lenient)
    c = p.command()
    try:
        c.pattern
    except ContractError as exc:
        raise ParseError(str(exc), p.pos) from None
    return c, p.misordered


def parse(text) -> Command:
    """Inverse of :func:`render`. Accepts a string or a token list."""
    tokens = text.split() if isinstance(text, str) else list(text)
    return _parse(tokens)[0]
