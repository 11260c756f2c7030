"""Command line entry point: ``psm build|check|eval|paths|capabilities|analyze``."""

import logging
from contextlib import contextmanager
from pathlib import Path as FilePath
from typing import Iterable, Optional

import typer

from .analysis import (Path, capture_free_paths, enumerate_paths, is_capture_free,
                       reachable_actions, required_capabilities, uncaptured)
from .calculus import Action, Term, e_equal, normalize, normalize_structure, parse_term
from .config import configure_logging
from .dsl import load_scenario
from .errors import PsmError, ScenarioError, UnknownNode
from .export import export_dot, export_json, import_json
from .graph import BuildOptions, NodeKind, PsmGraph, Scenario, build
from .vocabulary import Vocabulary, intersection_vocabulary

logger = logging.getLogger(__name__)

app = typer.Typer(add_completion=False, no_args_is_help=True,
                  help="Build and query phenomenon-signal-model graphs.")


@app.callback()
def main(log_level: Optional[str] = typer.Option(None, "--log-level", help="DEBUG, INFO, ...")):
    configure_logging(log_level)


@contextmanager
def _reported():
    try:
        yield
    except PsmError as exc:
        typer.echo(f"error: {exc.detail}", err=True)
        raise typer.Exit(exc.exit_code)


def _load_scenario(path: FilePath) -> Scenario:
    try:
        return load_scenario(path)
    except ScenarioError as exc:
        for d in exc.diagnostics:
            typer.echo(d.render(str(path)), err=True)
        typer.echo(exc.detail, err=True)
        raise typer.Exit(exc.exit_code)


def _load_graph(path: FilePath) -> PsmGraph:
    try:
        return import_json(path.read_text(encoding="utf-8"))
    except (ValueError, KeyError, PsmError) as exc:
        typer.echo(f"error: {path} is not a graph file ({exc})", err=True)
        raise typer.Exit(1)


def _resolve(g: PsmGraph, text: str) -> str:
    """Node id for a term literal; bare names also try the action reading.

    Literals are put through the structural rewrites first, so
    ``?- s ! s`` finds the stored signal ``?- ! s``.
    """
    candidates = []
    try:
        candidates.append(normalize_structure(parse_term(text, g.meta.options.max_term_len)))
    except PsmError:
        pass
    if not text.startswith('"') and " " not in text.strip():
        candidates.append(Term((Action(text.strip()),)))
    for term in candidates:
        node = g.find(term)
        if node is not None:
            return node.id
    raise UnknownNode(f"no node {text} in the graph")


def _show(g: PsmGraph, paths: Iterable[Path]) -> None:
    for p in paths:
        typer.echo(" -> ".join(g.nodes[n].term.literal for n in p.nodes))


@app.command("build")
def build_cmd(
    file: FilePath = typer.Argument(..., exists=True, dir_okay=False),
    output: Optional[FilePath] = typer.Option(None, "-o", "--output", help="JSON graph file"),
    dot: Optional[FilePath] = typer.Option(None, "--dot", help="Graphviz file"),
    prune: bool = typer.Option(False, "--prune", help="Keep only ancestors of actions"),
    max_iterations: Optional[int] = typer.Option(None, "--max-iterations", min=1),
):
    """Saturate a scenario and write the graph."""
    scenario = _load_scenario(file)
    with _reported():
        options = {"prune": prune}
        if max_iterations is not None:
            options["max_iterations"] = max_iterations
        g = build(scenario, BuildOptions(**options))
    if output is None and dot is None:
        typer.echo(export_json(g), nl=False)
        return
    if output is not None:
        output.write_text(export_json(g), encoding="utf-8")
        logger.info("Wrote %s", output)
    if dot is not None:
        dot.write_text(export_dot(g), encoding="utf-8")
        logger.info("Wrote %s", dot)
    typer.echo(f"{scenario.name}: {len(g.nodes)} nodes, {len(g.edges)} edges, "
               f"{g.meta.iterations} rounds")


@app.command()
def check(file: FilePath = typer.Argument(..., exists=True, dir_okay=False)):
    """Parse and validate a scenario without building it."""
    scenario = _load_scenario(file)
    typer.echo(f"{file}: ok, {len(scenario.rules)} rules, {len(scenario.seeds)} seeds, "
               f"{len(scenario.signals)} signals")


@app.command("eval")
def eval_cmd(
    term: str = typer.Argument(..., help="Term literal"),
    vocab: Optional[FilePath] = typer.Option(None, "--vocab", exists=True, dir_okay=False,
                                             help="Scenario file whose vocabulary to use"),
    against: Optional[str] = typer.Option(None, "--against", help="Compare for E-equality"),
):
    """Print the normal form of a term."""
    vocabulary: Vocabulary = (_load_scenario(vocab).vocabulary if vocab
                              else intersection_vocabulary())
    with _reported():
        t = parse_term(term)
        if against is None:
            typer.echo(normalize(t, vocabulary).literal)
        else:
            typer.echo("true" if e_equal(t, parse_term(against), vocabulary) else "false")


@app.command()
def paths(
    graph: FilePath = typer.Argument(..., exists=True, dir_okay=False),
    to: str = typer.Option(..., "--to", help="Target term or action"),
    source: Optional[str] = typer.Option(None, "--from", help="Start term (default: seeds)"),
    capture_free: bool = typer.Option(False, "--capture-free"),
):
    """List simple paths into a node."""
    g = _load_graph(graph)
    with _reported():
        target = _resolve(g, to)
        if source is None and capture_free:
            found = capture_free_paths(g, target)
        else:
            sources = [_resolve(g, source)] if source else g.meta.seeds
            found = enumerate_paths(g, sources, target)
            if capture_free:
                found = [p for p in found if is_capture_free(g, p)]
    _show(g, found)


@app.command()
def capabilities(
    graph: FilePath = typer.Argument(..., exists=True, dir_okay=False),
    action: str = typer.Option(..., "--action", help="Action node, e.g. 0B"),
):
    """Captures, facts and signals needed to reach an action."""
    g = _load_graph(graph)
    with _reported():
        report = required_capabilities(g, _resolve(g, action))
    typer.echo(f"action {g.nodes[report.action].term.literal}")
    for label, terms in (("capture", report.required_captures),
                         ("fact", report.required_facts),
                         ("signal", report.required_signals)):
        for t in terms:
            typer.echo(f"{label} {t.literal}")


@app.command()
def analyze(graph: FilePath = typer.Argument(..., exists=True, dir_okay=False)):
    """Reachable actions and circumstances no capture observes."""
    g = _load_graph(graph)
    for n in reachable_actions(g):
        typer.echo(f"reachable {n.term.literal}")
    for n in uncaptured(g):
        typer.echo(f"uncaptured {n.term.literal}")
    unreached = len(g.nodes_of_kind(NodeKind.ACTION)) - len(reachable_actions(g))
    if unreached:
        typer.echo(f"{unreached} action(s) not reachable from the seeds")


def cli_main(args: Iterable[str] | None = None) -> int:
    try:
        app(args=None if args is None else list(args), prog_name="psm")
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else (0 if exc.code is None else 1)
    return 0
