"""Total-effect matrices: closed forms, hop decomposition, guard rails."""

import warnings

import numpy as np
import pytest

from causalscope.core.dataset import Dataset
from causalscope.effects.total import default_levels, predict_intervention, total_effects
from causalscope.errors import DataError, NumericalError


def chain_matrix():
    # x1 -> x2 -> x3 with weights 0.5 and 0.4 (column causes row)
    B = np.zeros((3, 3))
    B[1, 0] = 0.5
    B[2, 1] = 0.4
    return B


def test_chain_total_effects_are_weight_products():
    em = total_effects(chain_matrix(), nodes=("x1", "x2", "x3"))
    assert em.tau("x1", "x2") == pytest.approx(0.5)
    assert em.tau("x2", "x3") == pytest.approx(0.4)
    assert em.tau("x1", "x3") == pytest.approx(0.2)
    assert em.tau("x3", "x1") == 0.0
    assert em.tau("x1", "x1") == pytest.approx(1.0)
    assert em.direct("x1", "x3") == 0.0
    assert em.spectral_radius == pytest.approx(0.0)


def test_hops_sum_to_total():
    em = total_effects(chain_matrix(), nodes=("x1", "x2", "x3"))
    hops = em.hops()
    assert len(hops) == 3  # identity plus p-1 powers
    np.testing.assert_allclose(sum(hops), em.T, atol=1e-12)
    np.testing.assert_array_equal(hops[0], np.eye(3))


def test_downstream_lists_reachable_targets():
    em = total_effects(chain_matrix(), nodes=("x1", "x2", "x3"))
    down = em.downstream("x1")
    assert set(down) == {"x2", "x3"}
    assert em.downstream("x3") == {}


def test_predict_intervention_scales_tau():
    em = total_effects(chain_matrix(), nodes=("x1", "x2", "x3"))
    shifts = predict_intervention(em, "x1", 1.0, 3.0)
    assert shifts["x2"] == pytest.approx(2 * 0.5)
    assert shifts["x3"] == pytest.approx(2 * 0.2)
    assert "x1" not in shifts


def test_unknown_node_rejected():
    em = total_effects(chain_matrix(), nodes=("x1", "x2", "x3"))
    with pytest.raises(DataError):
        em.tau("nope", "x1")


def test_spectral_radius_warning_when_expansive():
    B = np.array([[0.0, 1.1], [1.1, 0.0]])
    with pytest.warns(RuntimeWarning):
        em = total_effects(B, nodes=("a", "b"))
    assert em.spectral_radius == pytest.approx(1.1)


def test_singular_system_is_numerical_error():
    B = np.array([[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(NumericalError):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            total_effects(B, nodes=("a", "b"))


def column_dataset(values):
    col = np.asarray(values, dtype=float)
    return Dataset(variables=("v", "pad"), values=np.column_stack([col, np.zeros_like(col)]))


def test_quartile_levels_match_linear_interpolation():
    assert default_levels(column_dataset([1.0, 2.0, 3.0, 4.0]), "v") == (1.75, 3.25)
    assert default_levels(column_dataset([0.0, 0.0, 0.0, 10.0]), "v") == (0.0, 2.5)


def test_degenerate_quartiles_rejected():
    with pytest.raises(DataError):
        default_levels(column_dataset(np.ones(50)), "v")


def test_graph_input_matches_matrix_input(demo, demo_effects):
    em2 = total_effects(demo.B, nodes=demo.nodes)
    np.testing.assert_array_equal(demo_effects.T, em2.T)
    d = demo_effects.to_dict()
    assert d["nodes"] == list(demo.nodes)
    assert len(d["T"]) == len(demo.nodes)
