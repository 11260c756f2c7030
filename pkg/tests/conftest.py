import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from psm.calculus import normalize, parse_term
from psm.graph import Scenario, build
from psm.rules import intersection_rules
from psm.vocabulary import intersection_vocabulary

ROOT_DIR = Path(__file__).parent.parent
INTERSECTION = ROOT_DIR / "scenarios" / "intersection.psm"

settings.register_profile("dev", max_examples=300, deadline=None)
settings.register_profile("ci", max_examples=1_000, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "dev"))


@pytest.fixture(scope="session")
def vocab():
    return intersection_vocabulary()


@pytest.fixture(scope="session")
def scenario(vocab):
    return Scenario(
        name="intersection",
        vocabulary=vocab,
        rules=tuple(intersection_rules(vocab)),
        seeds=tuple(normalize(parse_term(s), vocab)
                    for s in ("ü:Q r1:P", "+:B b2:P", "r:Q g2:P")),
        signals=tuple(normalize(parse_term(f"?- {s} ! {s}"), vocab)
                      for s in ("ü:Q r1:P", "r:Q r1:P")),
    )


@pytest.fixture(scope="session")
def graph(scenario):
    return build(scenario)


@pytest.fixture(scope="session")
def term(vocab):
    """Parse and normalize a literal against the intersection vocabulary."""
    return lambda text: normalize(parse_term(text), vocab)
