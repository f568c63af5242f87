import sys

import numpy as np
import pytest

from causalscope.core.dataset import Dataset
from causalscope.effects.total import total_effects
from causalscope.synth import demo_graph, make_plant, synthetic_ontology


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance checklist so every run ends with one line per gate."""
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance gates")
    for name, ok, detail in results:
        line = f"{'PASS' if ok else 'FAIL'}: {name}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def small_plant():
    # 600 rows is plenty for unit-level structure checks and keeps the
    # suite fast; acceptance tests build full-size plants themselves.
    return make_plant("chain", n_rows=600, seed=11)


@pytest.fixture(scope="session")
def small_plant_ontology(small_plant):
    return synthetic_ontology(small_plant)


@pytest.fixture(scope="session")
def demo():
    """Four-node graph A->B, B->C, D->B with discovery provenance."""
    return demo_graph()


@pytest.fixture(scope="session")
def demo_effects(demo):
    return total_effects(demo)


@pytest.fixture()
def tiny_dataset():
    rng = np.random.default_rng(7)
    a = rng.uniform(-1, 1, 400)
    b = 0.8 * a + 0.1 * rng.uniform(-1, 1, 400)
    c = rng.uniform(-1, 1, 400)
    return Dataset(variables=("a", "b", "c"), values=np.column_stack([a, b, c]))
