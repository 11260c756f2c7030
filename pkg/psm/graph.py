"""Saturating a scenario into a PSM graph.

The builder seeds the graph with the structural start terms and the known
signals, then fires every applicable rule round after round until no rule
yields anything new. Each firing adds one edge per matched node into each
produced node; edges of one firing share an ``application`` number.
"""
from __future__ import annotations

import hashlib
import logging
import random
from enum import Enum

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field

from .calculus import (CAPTURE, CAPTURE_INV, FACT, Effectus, Term, normalize)
from .config import get_settings
from .errors import (InvalidSeed, InvalidSignal, IterationBudgetExceeded,
                     TermLengthExceeded, UnknownNode)
from .rules import Pattern, Rule, RuleClass, SeqVar, applicable, match_pattern
from .vocabulary import Vocabulary

logger = logging.getLogger(__name__)

# ?- X ! X in normal form
SIGNAL_SHAPE = Pattern((CAPTURE_INV, FACT, SeqVar("X")))


class NodeKind(str, Enum):
    STRUCTURAL = "structural"
    CAPTURE = "capture"
    FACT = "fact"
    SIGNAL = "signal"
    ACTION = "action"


class BuildOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    prune: bool = False
    max_iterations: int = Field(default_factory=lambda: get_settings().max_iterations, gt=0)
    max_term_len: int = Field(default_factory=lambda: get_settings().max_term_len, gt=0)
    shuffle_seed: int | None = None


class Scenario(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str = "scenario"
    vocabulary: Vocabulary
    rules: tuple[Rule, ...] = ()
    seeds: tuple[Term, ...] = ()
    signals: tuple[Term, ...] = ()


class Node(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    id: str
    term: Term
    kind: NodeKind


class Edge(BaseModel):
    model_config = ConfigDict(frozen=True)

    source: str
    target: str
    rule: str
    application: int

    @property
    def sort_key(self) -> tuple:
        return (self.application, self.source, self.target, self.rule)


class GraphMeta(BaseModel):
    scenario: str = ""
    iterations: int = 0
    options: BuildOptions = Field(default_factory=BuildOptions)
    seeds: tuple[str, ...] = ()
    rules: dict[str, RuleClass] = Field(default_factory=dict)


def node_id(term: Term, kind: NodeKind) -> str:
    digest = hashlib.sha256(f"{kind.value}|{term.literal}".encode("utf-8"))
    return digest.hexdigest()[:16]


def signal_body(term: Term) -> Term | None:
    """The sequence s of a signal ``?- ! s``, or None when term is no signal."""
    bindings = match_pattern(SIGNAL_SHAPE, term)
    return Term(bindings[0].causa_seq["X"]) if bindings else None


def classify(term: Term, producer: RuleClass | None) -> NodeKind:
    """Kind of a node; ``producer`` is the producing rule class, None for seeds."""
    if signal_body(term) is not None:
        return NodeKind.SIGNAL
    if term.head == CAPTURE:
        return NodeKind.CAPTURE
    if term.head == FACT:
        return NodeKind.FACT
    if producer is RuleClass.BEHAVIOURAL:
        return NodeKind.ACTION
    return NodeKind.STRUCTURAL


class PsmGraph:
    def __init__(self, meta: GraphMeta | None = None):
        self.meta = meta or GraphMeta()
        self.nodes: dict[str, Node] = {}
        self.edges: list[Edge] = []
        self._by_term: dict[Term, str] = {}
        self._applied: set = set()

    def add_node(self, term: Term, kind: NodeKind) -> tuple[str, bool]:
        existing = self._by_term.get(term)
        if existing is not None:
            return existing, False
        nid = node_id(term, kind)
        self.nodes[nid] = Node(id=nid, term=term, kind=kind)
        self._by_term[term] = nid
        return nid, True

    def add_edge(self, edge: Edge) -> None:
        self.edges.append(edge)

    def node(self, nid: str) -> Node:
        try:
            return self.nodes[nid]
        except KeyError:
            raise UnknownNode(f"no node with id {nid}") from None

    def find(self, term: Term) -> Node | None:
        nid = self._by_term.get(term)
        return self.nodes[nid] if nid else None

    def terms(self) -> list[Term]:
        return [n.term for n in self.nodes.values()]

    def nodes_of_kind(self, kind: NodeKind) -> list[Node]:
        return [n for n in self.sorted_nodes() if n.kind is kind]

    def sorted_nodes(self) -> list[Node]:
        return sorted(self.nodes.values(), key=lambda n: (n.term.sort_key, n.id))

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges, key=lambda e: e.sort_key)

    def to_networkx(self) -> nx.MultiDiGraph:
        """Multigraph view; edge keys are indices into ``sorted_edges()``."""
        graph = nx.MultiDiGraph()
        for n in self.sorted_nodes():
            graph.add_node(n.id, kind=n.kind, term=n.term)
        for index, e in enumerate(self.sorted_edges()):
            graph.add_edge(e.source, e.target, key=index, rule=e.rule,
                           application=e.application)
        return graph

    def __eq__(self, other) -> bool:
        if not isinstance(other, PsmGraph):
            return NotImplemented
        return (self.nodes == other.nodes
                and self.sorted_edges() == other.sorted_edges()
                and self.meta == other.meta)

    def __repr__(self) -> str:
        return f"PsmGraph({self.meta.scenario!r}, nodes={len(self.nodes)}, edges={len(self.edges)})"


def _check_seed(term: Term, vocab: Vocabulary) -> None:
    if not term.atoms or not all(isinstance(a, Effectus) for a in term.atoms):
        raise InvalidSeed(f"seed {term.literal} is not an effectus sequence")
    for atom in term.atoms:
        if not vocab.effectus_valid(atom):
            raise InvalidSeed(
                f"seed {term.literal}: {atom.literal} is outside the domain of {atom.causa}")


def _capped(term: Term, cap: int, what: str) -> Term:
    if len(term) > cap:
        raise TermLengthExceeded(f"{what} of {len(term)} atoms, cap is {cap}")
    return term


def seed(sc: Scenario, opts: BuildOptions | None = None) -> PsmGraph:
    opts = opts or BuildOptions()
    g = PsmGraph(GraphMeta(
        scenario=sc.name, options=opts,
        rules={r.id: r.klass for r in sc.rules}))
    seed_ids = []
    for term in sc.seeds:
        _check_seed(term, sc.vocabulary)
        canonical = _capped(normalize(term, sc.vocabulary), opts.max_term_len, "seed")
        nid, created = g.add_node(canonical, NodeKind.STRUCTURAL)
        if created:
            seed_ids.append(nid)
    for term in sc.signals:
        canonical = _capped(normalize(term, sc.vocabulary), opts.max_term_len, "signal")
        if signal_body(canonical) is None:
            raise InvalidSignal(f"signal {term.literal} does not have the shape ?- s ! s")
        g.add_node(canonical, NodeKind.SIGNAL)
    g.meta.seeds = tuple(seed_ids)
    return g


def _application_order(found: list, opts: BuildOptions, salt: int) -> list:
    """Sorted by matched terms; ``shuffle_seed`` permutes the order instead."""
    found.sort(key=lambda pair: pair[1].sort_key)
    if opts.shuffle_seed is not None:
        random.Random(f"{opts.shuffle_seed}:{salt}").shuffle(found)
    return found


def step(g: PsmGraph, sc: Scenario, fresh: set | None = None) -> tuple[PsmGraph, int]:
    """One saturation round.

    ``fresh`` restricts firing to applications that touch at least one of
    the given terms; None fires everything.
    """
    opts = g.meta.options
    terms = g.terms()
    found = []
    for rule in sc.rules:
        found.extend((rule, app) for app in applicable(rule, terms, sc.vocabulary, fresh))

    created = 0
    for rule, app in _application_order(found, opts, len(g._applied)):
        key = (app.rule_id, app.matched_nodes, app.binding)
        if key in g._applied:
            continue
        g._applied.add(key)
        sources = list(dict.fromkeys(g._by_term[t] for t in app.matched_nodes))
        application = len(g._applied) - 1
        for term in app.produced:
            if len(term) > opts.max_term_len:
                raise TermLengthExceeded(
                    f"rule {rule.id} produced {len(term)} atoms, cap is {opts.max_term_len}")
            target, is_new = g.add_node(term, classify(term, rule.klass))
            created += is_new
            for source in sources:
                g.add_edge(Edge(source=source, target=target, rule=rule.id,
                                application=application))
    return g, created


def build(sc: Scenario, opts: BuildOptions | None = None) -> PsmGraph:
    opts = opts or BuildOptions()
    g = seed(sc, opts)
    fresh = None
    rounds = 0
    while True:
        if rounds >= opts.max_iterations:
            raise IterationBudgetExceeded(
                f"no fixpoint after {opts.max_iterations} rounds")
        rounds += 1
        known = set(g.nodes)
        g, created = step(g, sc, fresh)
        logger.debug("round %d: %d new nodes", rounds, created)
        if not created:
            break
        fresh = {g.nodes[nid].term for nid in g.nodes.keys() - known}
    g.meta.iterations = rounds
    logger.info("Built %s: %d rounds, %d nodes, %d edges",
                sc.name, rounds, len(g.nodes), len(g.edges))
    return prune(g) if opts.prune else g


def prune(g: PsmGraph) -> PsmGraph:
    """Keep the action nodes and every node from which one is reachable."""
    graph = g.to_networkx()
    keep = set()
    for n in g.nodes_of_kind(NodeKind.ACTION):
        keep.add(n.id)
        keep |= nx.ancestors(graph, n.id)
    pruned = PsmGraph(g.meta.model_copy(update={
        "seeds": tuple(s for s in g.meta.seeds if s in keep),
    }))
    for n in g.sorted_nodes():
        if n.id in keep:
            pruned.add_node(n.term, n.kind)
    for e in g.sorted_edges():
        if e.source in keep and e.target in keep:
            pruned.add_edge(e)
    return pruned
