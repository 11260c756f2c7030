"""Phenomenon-signal-model graphs: turn traffic-scene descriptions into
observation requirements for an automated vehicle."""
from .analysis import (CapabilityReport, Path, capture_free_paths, enumerate_paths,
                       reachable_actions, required_capabilities, target_behaviour,
                       uncaptured)
from .calculus import (CAPTURE, CAPTURE_INV, FACT, FACT_INV, NEUTRUM, Action, Effectus,
                       Kind, Order2, Term, apply_successus, commutes, compose, concat,
                       e_equal, normalize, normalize_structure, parse_term, realise,
                       split)
from .dsl import SourceFile, format_scenario, load_scenario, parse, parse_file, parse_text
from .errors import PsmError
from .export import export_dot, export_json, import_json
from .graph import (BuildOptions, Edge, Node, NodeKind, PsmGraph, Scenario, build,
                    prune, seed, step)
from .rules import (Binding, Pattern, Rule, RuleApplication, RuleClass, applicable,
                    instantiate, intersection_rules, make_rule, match_pattern,
                    parse_pattern, signal_rule)
from .vocabulary import (Diagnostic, IndicatorDecl, Severity, Vocabulary, effectus_valid,
                         intersection_vocabulary, validate_vocabulary)

__version__ = "0.1.0"
