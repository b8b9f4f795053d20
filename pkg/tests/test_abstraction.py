import numpy as np
import pytest
from hypothesis import given, strategies as st

from causalabs.abstraction import (
    Abstraction,
    AbstractionError,
    abstraction_from_dict,
    abstraction_to_dict,
    alpha_for_set,
    binary_alpha,
    compose_abstractions,
    identity_abstraction,
    is_order_preserving,
    load_abstraction,
    order_violations,
    pseudo_inverse,
    save_abstraction,
    validate_abstraction,
)

from builders import random_abstraction_onto, random_scm, random_surjection
from oracles import brute_lift, svd_pinv


def test_chain_abstraction_is_valid(reference):
    models, abs_ = reference
    assert validate_abstraction(abs_, models["a"], models["b"]) == []
    assert is_order_preserving(abs_, models["a"], models["b"])


def test_validation_messages(reference):
    models, abs_ = reference
    bad = abs_.with_alphas({"Hea'": binary_alpha([[1, 1], [0, 0]], "Hea'", ("LC",))})
    problems = validate_abstraction(bad, models["a"], models["b"])
    assert problems == ["Hea': row 1 not surjective (no 1 in row)"]
    bad = abs_.with_alphas({"Hea'": binary_alpha([[1, 0], [1, 1]], "Hea'", ("LC",))})
    assert any("not functional" in p for p in validate_abstraction(bad, models["a"], models["b"]))
    partial = Abstraction(abs_.relevant, abs_.var_map, {})
    assert any("not specified" in p for p in validate_abstraction(partial, models["a"], models["b"]))
    assert validate_abstraction(partial, models["a"], models["b"], require_complete=False) == []
    not_onto = Abstraction(("Sm",), {"Sm": "Sm'"}, {})
    assert any("not surjective" in p for p in validate_abstraction(not_onto, models["a"], models["b"], False))


def test_alpha_for_set_is_kronecker_in_given_order():
    a = binary_alpha([[1, 0, 1], [0, 1, 0]], "P", ("x",))
    b = binary_alpha([[1, 1], ], "Q", ("y",))
    abs_ = Abstraction(("x", "y"), {"x": "P", "y": "Q"}, {"P": a, "Q": b})
    lifted = alpha_for_set(abs_, ("P", "Q"))
    np.testing.assert_array_equal(lifted.matrix, np.kron(a.matrix, b.matrix))
    assert lifted.col_vars == ("x", "y")
    with pytest.raises(ValueError):
        alpha_for_set(abs_, ())


@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 3))
def test_lift_matches_entrywise_oracle(seed, n1, n2):
    rng = np.random.default_rng(seed)
    m1, m2 = n1 + int(rng.integers(0, 3)), n2 + int(rng.integers(0, 3))
    a1, a2 = random_surjection(rng, m1, n1), random_surjection(rng, m2, n2)
    abs_ = Abstraction(("x", "y"), {"x": "P", "y": "Q"}, {
        "P": binary_alpha(a1, "P", ("x",)), "Q": binary_alpha(a2, "Q", ("y",))})
    np.testing.assert_array_equal(alpha_for_set(abs_, ("P", "Q")).matrix, brute_lift([a1, a2]))


@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.integers(0, 4))
def test_pseudo_inverse_properties(seed, n, extra):
    """Penrose identities, right-inverse property and uniform columns."""
    rng = np.random.default_rng(seed)
    a = random_surjection(rng, n + extra, n)
    p = pseudo_inverse(a)
    np.testing.assert_allclose(p, svd_pinv(a), atol=1e-12)
    assert np.array_equal(a @ p, np.eye(n))
    np.testing.assert_allclose(p @ a @ p, p, atol=1e-15)
    np.testing.assert_allclose((p @ a).T, p @ a, atol=1e-15)
    for j in range(n):
        nz = p[:, j][p[:, j] > 0]
        assert np.all(nz == nz[0]) and abs(nz.sum() - 1) < 1e-15


def test_pseudo_inverse_rejects_empty_row():
    with pytest.raises(AbstractionError):
        pseudo_inverse(np.array([[1.0, 1.0], [0.0, 0.0]]))


def test_order_violation_detected(reference):
    models, _ = reference
    reversed_map = Abstraction(
        ("Sm", "LC"), {"Sm": "Hea'", "LC": "Sm'"},
        {"Hea'": binary_alpha(np.eye(2), "Hea'", ("Sm",)), "Sm'": binary_alpha(np.eye(2), "Sm'", ("LC",))},
    )
    assert order_violations(reversed_map, models["a"], models["b"]) == [("Sm", "LC")]
    assert not is_order_preserving(reversed_map, models["a"], models["b"])


def test_compose_with_identity_is_neutral(reference):
    models, abs_ = reference
    ident = identity_abstraction(models["b"])
    composed = compose_abstractions(ident, abs_)
    assert composed.var_map == abs_.var_map
    for h in abs_.alphas:
        assert composed.alphas[h] == abs_.alphas[h]


@given(st.integers(0, 2**32 - 1))
def test_composition_multiplies_lifted_alphas(seed):
    rng = np.random.default_rng(seed)
    base = random_scm(rng, rng.integers(2, 4, size=4).tolist(), "B")
    mid, alpha = random_abstraction_onto(rng, base, 3, "M")
    high, beta = random_abstraction_onto(rng, mid, 2, "H", relevant_all=True)
    comp = compose_abstractions(beta, alpha)
    assert validate_abstraction(comp, base, high) == []
    for h, b in beta.alphas.items():
        inner = alpha_for_set(alpha, b.col_vars)
        np.testing.assert_array_equal(comp.alphas[h].matrix, b.matrix @ inner.matrix)


def test_composition_can_break_order_that_both_parts_keep():
    rng = np.random.default_rng(0)
    base = random_scm(rng, [2, 2], "B", edge_p=1.0)          # B0 -> B1
    mid = random_scm(rng, [2, 2], "M", edge_p=0.0)           # no edge
    high = random_scm(rng, [2, 2], "H", edge_p=1.0, order=[1, 0])  # H1 -> H0
    eye = np.eye(2)
    alpha = Abstraction(("B0", "B1"), {"B0": "M0", "B1": "M1"},
                        {"M0": binary_alpha(eye, "M0", ("B0",)), "M1": binary_alpha(eye, "M1", ("B1",))})
    beta = Abstraction(("M0", "M1"), {"M0": "H0", "M1": "H1"},
                       {"H0": binary_alpha(eye, "H0", ("M0",)), "H1": binary_alpha(eye, "H1", ("M1",))})
    assert is_order_preserving(alpha, base, mid) and is_order_preserving(beta, mid, high)
    assert order_violations(compose_abstractions(beta, alpha), base, high) == [("B0", "B1")]


def test_compose_rejects_foreign_variables(reference):
    _, abs_ = reference
    stranger = Abstraction(("Q",), {"Q": "Z"}, {})
    with pytest.raises(AbstractionError):
        compose_abstractions(stranger, abs_)


def test_json_round_trip(tmp_path, reference):
    _, abs_ = reference
    path = tmp_path / "a.json"
    save_abstraction(abs_, path)
    back = load_abstraction(path)
    assert abstraction_to_dict(back) == abstraction_to_dict(abs_)
    with pytest.raises(AbstractionError):
        abstraction_from_dict({"map": {}})
