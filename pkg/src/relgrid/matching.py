"""Referent resolution by label-aware sub-graph matching.

Three routes compute the same referent set:

* :func:`match_complete` searches injective tree embeddings of the command graph
  directly on the relation bitmask matrix (compiled kernel when available).
* :func:`match_line_graph` is the line-graph formulation: sub-graph monomorphisms
  between the line graphs (networkx VF2), filtered by per-edge relation-set
  intersection and then by consistency of the induced node mapping.
* :func:`match_optimized` is the local star-shaped search: a coarse relation
  label filter per candidate root, candidate neighbours per command node, and an
  exact system-of-distinct-representatives check by bipartite matching.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx
from networkx.algorithms import isomorphism

from . import kernels
from .commands import Command
from .domain import ContractError
from .graphs import CommandGraph, RelationGraph, candidate_masks, command_to_graph, world_to_graph
from .world import World


class UnsupportedShapeError(ContractError):
    pass


@dataclass(frozen=True)
class MatchResult:
    referents: frozenset
    # referent id -> one injective assignment (world id per command node, preorder)
    witnesses: dict = field(default_factory=dict, compare=False)

    @property
    def unique(self) -> bool:
        return len(self.referents) == 1


def is_unique(result: MatchResult) -> bool:
    return len(result.referents) == 1


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def match_complete(gw: RelationGraph, gc: CommandGraph, world: World, witnesses: bool = True) -> MatchResult:
    cand = candidate_masks(gc, world)
    bits = gc.edge_bits
    roots = kernels.embed_roots(gw.n, gw.matrix, cand, gc.parent, bits)
    ids = gw.ids
    wit = {}
    if witnesses:
        for r in _bits(roots):
            assign = kernels.find_witness(gw.n, gw.matrix, cand, gc.parent, bits, r)
            wit[ids[r]] = tuple(ids[i] for i in assign)
    return MatchResult(frozenset(ids[r] for r in _bits(roots)), wit)


def referent_ids(command: Command, world: World) -> frozenset:
    """Referent set of ``command`` in ``world`` (no witnesses; generation hot path)."""
    gc = command_to_graph(command)
    gw = world_to_graph(world)
    return match_complete(gw, gc, world, witnesses=False).referents


def resolve(command: Command, world: World, method: str = "complete") -> MatchResult:
    gc = command_to_graph(command)
    gw = world_to_graph(world)
    if method == "complete":
        return match_complete(gw, gc, world)
    if method == "optimized":
        return match_optimized(gw, gc, world)
    if method == "line_graph":
        return match_line_graph(gw, gc, world)
    if method == "auto":
        return match_optimized(gw, gc, world) if gc.is_star else match_complete(gw, gc, world)
    raise ValueError(f"unknown matching method {method!r}")


# ---------------------------------------------------------------------------
# locally optimized star matching


def _augment(left, adj, match_right, seen) -> bool:
    for right in adj[left]:
        if right in seen:
            continue
        seen.add(right)
        if match_right.get(right) is None or _augment(match_right[right], adj, match_right, seen):
            match_right[right] = left
            return True
    return False


def distinct_representatives(candidates: dict) -> dict | None:
    """A system of distinct representatives for ``{key: [options]}``, or ``None``."""
    match_right: dict = {}
    for left in candidates:
        if not _augment(left, candidates, match_right, set()):
            return None
    return {left: right for right, left in match_right.items()}


def match_optimized(gw: RelationGraph, gc: CommandGraph, world: World) -> MatchResult:
    if not gc.is_star:
        raise UnsupportedShapeError("local matching only handles clauses conjoined on the head NP")
    n, rel = gw.n, gw.matrix
    cand = candidate_masks(gc, world)
    bits = gc.edge_bits
    children = list(range(1, len(gc.nodes)))
    out_labels = [0] * n
    in_labels = [0] * n
    for i in range(n):
        for j in range(n):
            m = rel[i * n + j]
            out_labels[i] |= m
            in_labels[j] |= m
    required = 0
    for c in children:
        required |= bits[c]

    referents, wit = set(), {}
    for w in _bits(cand[0]):
        if out_labels[w] & required != required:
            continue
        options = {c: [] for c in children}
        for nbr in range(n):
            edge = rel[w * n + nbr]
            if nbr == w or not edge:
                continue
            for c in children:
                if in_labels[nbr] & bits[c] != bits[c]:
                    continue
                if edge & bits[c] and (cand[c] >> nbr) & 1:
                    options[c].append(nbr)
        if any(not opts for opts in options.values()):
            continue
        sdr = distinct_representatives(options)
        if sdr is not None:
            ident = gw.ids[w]
            referents.add(ident)
            wit[ident] = (ident,) + tuple(gw.ids[sdr[c]] for c in children)
    return MatchResult(frozenset(referents), wit)


# ---------------------------------------------------------------------------
# line-graph formulation


def _digraph(n: int, rel: bytes) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    for i in range(n):
        for j in range(n):
            if rel[i * n + j]:
                g.add_edge(i, j, rels=rel[i * n + j])
    return g


def _line_graph(g: nx.DiGraph) -> nx.DiGraph:
    lg = nx.line_graph(g)
    for u, v in lg.nodes:
        lg.nodes[(u, v)]["rels"] = g.edges[u, v]["rels"]
    return lg


def match_line_graph(gw: RelationGraph, gc: CommandGraph, world: World) -> MatchResult:
    cand = candidate_masks(gc, world)
    if not gc.edges:
        return MatchResult(frozenset(gw.ids[i] for i in _bits(cand[0])))
    lw = _line_graph(_digraph(gw.n, gw.matrix))
    cgraph = nx.DiGraph()
    for src, dst, rel in gc.edges:
        cgraph.add_edge(src, dst, rels=rel.bit)
    lc = _line_graph(cgraph)
    matcher = isomorphism.DiGraphMatcher(lw, lc, node_match=lambda a, b: bool(a["rels"] & b["rels"]))
    referents, wit = set(), {}
    for mapping in matcher.subgraph_monomorphisms_iter():
        nodes: dict = {}
        ok = True
        for (wu, wv), (cu, cv) in mapping.items():
            for c, w in ((cu, wu), (cv, wv)):
                if nodes.setdefault(c, w) != w:
                    ok = False
        if not ok or len(set(nodes.values())) != len(nodes):
            continue
        if any(not (cand[c] >> w) & 1 for c, w in nodes.items()):
            continue
        ident = gw.ids[nodes[gc.root]]
        referents.add(ident)
        wit.setdefault(ident, tuple(gw.ids[nodes[c]] for c in range(len(gc.nodes))))
    return MatchResult(frozenset(referents), wit)
