"""DOT and JSON renderings of a built graph.

Both walk nodes and edges in canonical order, so equal graphs give equal
bytes.
"""
from __future__ import annotations

import json
import logging
from typing import Iterator

from .calculus import parse_term
from .graph import Edge, GraphMeta, Node, NodeKind, PsmGraph

logger = logging.getLogger(__name__)

KIND_COLORS = {
    NodeKind.STRUCTURAL: "grey",
    NodeKind.CAPTURE: "lightblue",
    NodeKind.FACT: "green",
    NodeKind.SIGNAL: "orange",
    NodeKind.ACTION: "red",
}


def _gvquote(s: str) -> str:
    return '"{}"'.format(s.replace("\\", "\\\\").replace('"', r'\"'))


def dot_lines(g: PsmGraph) -> Iterator[str]:
    yield "digraph psm {\n"
    yield "  node [style=filled];\n"
    for n in g.sorted_nodes():
        yield "  {} [label={} fillcolor={}];\n".format(
            _gvquote(n.id), _gvquote(n.term.literal), KIND_COLORS[n.kind])
    for e in g.sorted_edges():
        yield "  {} -> {} [label={}];\n".format(
            _gvquote(e.source), _gvquote(e.target),
            _gvquote(f"{e.rule}#{e.application}"))
    yield "}\n"


def export_dot(g: PsmGraph) -> str:
    return "".join(dot_lines(g))


def graph_to_dict(g: PsmGraph) -> dict:
    return {
        "meta": g.meta.model_dump(mode="json"),
        "nodes": [{"id": n.id, "term": n.term.literal, "kind": n.kind.value}
                  for n in g.sorted_nodes()],
        "edges": [{"from": e.source, "to": e.target, "rule": e.rule,
                   "application": e.application}
                  for e in g.sorted_edges()],
    }


def export_json(g: PsmGraph) -> str:
    return json.dumps(graph_to_dict(g), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def import_json(text: str) -> PsmGraph:
    """Restore a graph written by :func:`export_json`."""
    data = json.loads(text)
    g = PsmGraph(GraphMeta.model_validate(data["meta"]))
    cap = g.meta.options.max_term_len
    for raw in data["nodes"]:
        node = Node(id=raw["id"], term=parse_term(raw["term"], cap), kind=NodeKind(raw["kind"]))
        g.nodes[node.id] = node
        g._by_term[node.term] = node.id
    for raw in data["edges"]:
        g.add_edge(Edge(source=raw["from"], target=raw["to"], rule=raw["rule"],
                        application=raw["application"]))
    logger.debug("imported %d nodes, %d edges", len(g.nodes), len(g.edges))
    return g
