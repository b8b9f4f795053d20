import hashlib
import json
import shutil

import numpy as np
import pytest

from causalabs.abstraction import validate_abstraction
from causalabs.scm import ScmError, joint_distribution, topological_order, validate_scm
from causalabs.scenarios import (
    DATA_ENV,
    LUCAS_VARIABLES,
    build_reference_models,
    build_health_scenario,
    build_lungcancer_scenario,
    data_dir,
    data_path,
    ingest_lucas,
    product_fixture,
    vertical_fixture,
)

LUCAS_SHA256 = "f1ead5cf59515d178c95681a8b991fccfde1af68416e98be080375713f63c88c"


def test_lucas_file_hash():
    digest = hashlib.sha256(data_path("lucas.json").read_bytes()).hexdigest()
    assert digest == LUCAS_SHA256


def test_lucas_structure():
    scm = ingest_lucas()
    assert scm.names == LUCAS_VARIABLES
    assert len(scm.edges) == 12 and ("Sm", "LC") in scm.edges
    joint = joint_distribution(scm)
    assert joint.size == 4096
    assert joint.sum() == pytest.approx(1.0, abs=1e-12)
    assert topological_order(scm)[:5] == ["Anx", "PP", "BED", "Gen", "All"]


def test_lucas_ingestion_diagnostics(tmp_path):
    with pytest.raises(ScmError, match="cannot read"):
        ingest_lucas(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(ScmError, match="not valid JSON"):
        ingest_lucas(bad)
    data = json.loads(data_path("lucas.json").read_text())
    data["mechanisms"]["Fat"]["matrix"][0][0] = 0.9
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps(data))
    with pytest.raises(ScmError, match="Fat: column 0"):
        ingest_lucas(broken)


def test_reference_models_hold_expected_values():
    m = build_reference_models()
    assert m["a"].mechanisms["Sm"].matrix.ravel().tolist() == [0.8, 0.2]
    assert m["c"].mechanisms["LC''"].matrix[0].tolist() == [0.7, 0.6, 0.5, 0.4, 0.4, 0.3]
    assert m["d"].mechanisms["*"].matrix.tolist() == [[1.0]]
    for scm in m.values():
        assert validate_scm(scm) == []


def test_bundles_are_valid_and_deterministic():
    for build in (build_health_scenario, build_lungcancer_scenario):
        a, b = build(), build()
        assert validate_scm(a.base) == [] and validate_scm(a.high) == []
        assert validate_abstraction(a.abstraction, a.base, a.high, require_complete=False) == []
        assert a.assessment_sets == b.assessment_sets
        assert a.expected == b.expected
        for h, opts in a.candidates.alphas.items():
            assert all(x == y for x, y in zip(opts, b.candidates.alphas[h]))


def test_health_bundle_contents(health):
    mechs = [m.matrix.tolist() for m in health.candidates.mechanisms["Hea'"]]
    assert [[0.3, 0.2], [0.7, 0.8]] in mechs and len(mechs) == 3
    assert health.abstraction.var_map == {"Sm": "Sm'", "Cou": "Hea'", "Fat": "Hea'"}
    assert health.expected_value("learn/ic").value == 0.029


def test_lungcancer_bundle_contents(lungcancer):
    a = lungcancer.abstraction.var_map
    assert a["Anx"] == a["PP"] == "Env''"
    assert lungcancer.assessment_sets["custom"].pairs == ((("Env''",), ("LC''",)),)
    assert all(e.tag for e in lungcancer.expected)


def test_data_dir_override(tmp_path, monkeypatch):
    shutil.copy(data_path("chain.json"), tmp_path / "chain.json")
    monkeypatch.setenv(DATA_ENV, str(tmp_path))
    assert data_dir() == tmp_path
    with pytest.raises(ScmError, match="cannot read"):
        ingest_lucas()


@pytest.mark.parametrize("build", [vertical_fixture, product_fixture])
def test_counterexample_models_are_valid(build):
    fx = build()
    assert validate_scm(fx.base) == [] and validate_scm(fx.high) == []
    assert validate_abstraction(fx.abstraction, fx.base, fx.high) == []
    np.testing.assert_allclose(joint_distribution(fx.high).sum(), 1.0)
