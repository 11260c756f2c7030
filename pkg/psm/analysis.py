"""Path queries over a built graph."""
from __future__ import annotations

import logging
from typing import Iterable

import networkx as nx
from pydantic import BaseModel, ConfigDict

from .calculus import CAPTURE, Effectus, Term
from .config import get_settings
from .errors import KindMismatch, PathBudgetExceeded, UnknownRule
from .graph import Node, NodeKind, PsmGraph
from .rules import RuleClass

logger = logging.getLogger(__name__)


class Path(BaseModel):
    model_config = ConfigDict(frozen=True)

    nodes: tuple[str, ...]
    edges: tuple[int, ...] = ()

    @property
    def sort_key(self) -> tuple:
        return (len(self.nodes), self.nodes, self.edges)

    def interior(self) -> tuple[str, ...]:
        return self.nodes[1:-1]


class CapabilityReport(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    action: str
    required_captures: tuple[Term, ...] = ()
    required_facts: tuple[Term, ...] = ()
    required_signals: tuple[Term, ...] = ()

    def is_empty(self) -> bool:
        return not (self.required_captures or self.required_facts or self.required_signals)


def enumerate_paths(g: PsmGraph, sources: Iterable[str], target: str,
                    budget: int | None = None) -> list[Path]:
    """All simple paths from any of ``sources`` to ``target``, shortest first."""
    budget = budget or get_settings().path_budget
    g.node(target)
    graph = g.to_networkx()
    paths = []
    for source in sorted(set(sources)):
        g.node(source)
        if source == target:
            paths.append(Path(nodes=(target,)))
            continue
        for edge_path in nx.all_simple_edge_paths(graph, source, target):
            paths.append(Path(
                nodes=(source,) + tuple(v for _, v, _ in edge_path),
                edges=tuple(k for _, _, k in edge_path),
            ))
            if len(paths) > budget:
                raise PathBudgetExceeded(
                    f"more than {budget} paths into {target}")
    return sorted(paths, key=lambda p: p.sort_key)


def seed_paths(g: PsmGraph, target: str, budget: int | None = None) -> list[Path]:
    return enumerate_paths(g, g.meta.seeds, target, budget)


def _action(g: PsmGraph, action: str) -> Node:
    node = g.node(action)
    if node.kind is not NodeKind.ACTION:
        raise KindMismatch(f"{node.term.literal} is a {node.kind.value} node, not an action")
    return node


def is_capture_free(g: PsmGraph, path: Path) -> bool:
    return all(g.nodes[n].kind is NodeKind.STRUCTURAL for n in path.interior())


def capture_free_paths(g: PsmGraph, action: str) -> list[Path]:
    _action(g, action)
    return [p for p in seed_paths(g, action) if is_capture_free(g, p)]


def _terms(nodes: Iterable[Node]) -> tuple[Term, ...]:
    return tuple(sorted({n.term for n in nodes}, key=lambda t: t.sort_key))


def required_capabilities(g: PsmGraph, action: str) -> CapabilityReport:
    g.node(action)
    paths = seed_paths(g, action)
    on_path = [g.nodes[n] for p in paths for n in p.nodes]
    edges = g.sorted_edges()
    applications = {edges[i].application for p in paths for i in p.edges}
    # signals never lie on a seed path; they join a firing on it
    signals = [g.nodes[e.source] for e in edges
               if e.application in applications
               and g.nodes[e.source].kind is NodeKind.SIGNAL]
    return CapabilityReport(
        action=action,
        required_captures=_terms(n for n in on_path if n.kind is NodeKind.CAPTURE),
        required_facts=_terms(n for n in on_path if n.kind is NodeKind.FACT),
        required_signals=_terms(signals),
    )


def target_behaviour(g: PsmGraph, behavioural_rule_ids: set[str]) -> list[Path]:
    """Seed-to-action paths whose last firing is one of the given behavioural rules."""
    for rule_id in sorted(behavioural_rule_ids):
        if g.meta.rules.get(rule_id) is not RuleClass.BEHAVIOURAL:
            raise UnknownRule(f"{rule_id} is not a behavioural rule of {g.meta.scenario}")
    if not behavioural_rule_ids:
        return []
    edges = g.sorted_edges()
    paths = []
    for node in g.nodes_of_kind(NodeKind.ACTION):
        paths.extend(p for p in seed_paths(g, node.id)
                     if p.edges and edges[p.edges[-1]].rule in behavioural_rule_ids)
    return sorted(paths, key=lambda p: p.sort_key)


def reachable_actions(g: PsmGraph) -> list[Node]:
    graph = g.to_networkx()
    reached = set(g.meta.seeds)
    for s in g.meta.seeds:
        reached |= nx.descendants(graph, s)
    return [n for n in g.nodes_of_kind(NodeKind.ACTION) if n.id in reached]


def uncaptured(g: PsmGraph) -> list[Node]:
    """Structural circumstances no capture node ever observes (occlusion)."""
    found = []
    for n in g.nodes_of_kind(NodeKind.STRUCTURAL):
        if not n.term.atoms or not all(isinstance(a, Effectus) for a in n.term.atoms):
            continue
        if g.find(Term((CAPTURE,) + n.term.atoms)) is None:
            found.append(n)
    return found
