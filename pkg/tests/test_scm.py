import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from causalabs.scm import (
    CycleError,
    OutcomeIndex,
    Scm,
    ScmError,
    StochasticMatrix,
    Variable,
    check_scm,
    descendants,
    joint_distribution,
    load_scm,
    marginal,
    save_scm,
    scm_from_dict,
    scm_to_dict,
    topological_order,
    validate_scm,
)

from builders import random_scm
from oracles import brute_joint


def chain_dict():
    return {
        "variables": [
            {"name": "A", "outcomes": ["0", "1"]},
            {"name": "B", "outcomes": ["lo", "mid", "hi"]},
        ],
        "edges": [["A", "B"]],
        "mechanisms": {
            "A": {"parents": [], "matrix": [[0.25], [0.75]]},
            "B": {"parents": ["A"], "matrix": [[0.2, 0.5], [0.3, 0.5], [0.5, 0.0]]},
        },
    }


def test_outcome_index_first_variable_slowest():
    idx = OutcomeIndex(["A", "B"], [2, 3])
    assert idx.size == 6
    assert idx.encode([1, 0]) == 3
    assert idx.decode(5) == (1, 2)
    flat = idx.encode_many([np.array([0, 1]), np.array([2, 1])])
    assert flat.tolist() == [2, 4]


def test_stochastic_matrix_promotes_vectors_and_is_read_only():
    m = StochasticMatrix(np.array([0.4, 0.6]), ("A",), ())
    assert m.shape == (2, 1)
    with pytest.raises(ValueError):
        m.matrix[0, 0] = 1.0


def test_joint_of_chain_matches_hand_product():
    scm = scm_from_dict(chain_dict())
    joint = joint_distribution(scm)
    expected = np.array([0.25 * 0.2, 0.25 * 0.3, 0.25 * 0.5, 0.75 * 0.5, 0.75 * 0.5, 0.0])
    np.testing.assert_allclose(joint, expected, atol=1e-15)


def test_validate_reports_non_stochastic_column():
    d = chain_dict()
    d["mechanisms"]["B"]["matrix"][0][1] = 0.6
    problems = validate_scm(scm_from_dict(d))
    assert len(problems) == 1
    assert problems[0].startswith("B: column 1 not stochastic")


def test_validate_reports_cycle_and_missing_mechanism():
    d = chain_dict()
    d["edges"].append(["B", "A"])
    d["mechanisms"]["A"] = {"parents": ["B"], "matrix": [[1, 1, 1], [0, 0, 0]]}
    problems = validate_scm(scm_from_dict(d))
    assert any("cycle" in p for p in problems)
    del d["mechanisms"]["A"]
    d["edges"].pop()
    assert any(p.startswith("A:") for p in validate_scm(scm_from_dict(d)))
    with pytest.raises(ScmError):
        check_scm(scm_from_dict(d))


def test_validate_reports_parent_mismatch():
    d = chain_dict()
    d["edges"] = []
    assert validate_scm(scm_from_dict(d))


def test_topological_order_breaks_ties_by_declaration():
    variables = tuple(Variable(n, ("0", "1")) for n in "DCBA")
    edges = (("A", "B"),)
    flat = np.array([[0.5], [0.5]])
    mechs = {n: StochasticMatrix(flat, (n,), ()) for n in "DCA"}
    mechs["B"] = StochasticMatrix(np.eye(2), ("B",), ("A",))
    scm = Scm(variables, edges, mechs)
    assert topological_order(scm) == ["D", "C", "A", "B"]


def test_topological_order_raises_on_cycle():
    variables = tuple(Variable(n, ("0", "1")) for n in "AB")
    mechs = {
        "A": StochasticMatrix(np.eye(2), ("A",), ("B",)),
        "B": StochasticMatrix(np.eye(2), ("B",), ("A",)),
    }
    with pytest.raises(CycleError):
        topological_order(Scm(variables, (("A", "B"), ("B", "A")), mechs))


def test_descendants_is_transitive(reference):
    models, _ = reference
    assert descendants(models["a"], "Sm") == {"Tar", "LC"}
    assert descendants(models["a"], "LC") == set()


def test_json_round_trip(tmp_path, reference):
    models, _ = reference
    for m in models.values():
        p = tmp_path / f"{m.name}.json"
        save_scm(m, p)
        back = load_scm(p)
        assert back.names == m.names
        assert back.edges == m.edges
        for n in m.names:
            assert back.mechanisms[n] == m.mechanisms[n]


def test_malformed_description_is_rejected():
    with pytest.raises(ScmError, match="malformed"):
        scm_from_dict({"variables": [{"name": "A"}], "mechanisms": {}})
    with pytest.raises(ScmError):
        scm_from_dict(json.loads('{"edges": []}'))


def test_marginal_reorders_axes():
    sizes = {"A": 2, "B": 3}
    joint = np.arange(6, dtype=float) / 15
    onto_b = marginal(joint, ("A", "B"), ("B",), sizes)
    np.testing.assert_allclose(onto_b, joint.reshape(2, 3).sum(axis=0))
    swapped = marginal(joint, ("A", "B"), ("B", "A"), sizes)
    np.testing.assert_allclose(swapped, joint.reshape(2, 3).T.ravel())
    with pytest.raises(KeyError):
        marginal(joint, ("A", "B"), ("C",), sizes)


@given(st.integers(0, 2**32 - 1), st.lists(st.integers(1, 3), min_size=1, max_size=4))
def test_joint_matches_enumeration_oracle(seed, sizes):
    scm = random_scm(np.random.default_rng(seed), sizes)
    joint = joint_distribution(scm)
    oracle = brute_joint(scm)
    flat = np.array([oracle[t] for t in sorted(oracle)])
    np.testing.assert_allclose(joint, flat, atol=1e-12)
    assert abs(joint.sum() - 1) < 1e-12
