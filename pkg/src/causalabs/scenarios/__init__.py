"""Bundled reference models, abstractions and experiment configurations."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from ..abstraction import Abstraction, load_abstraction
from ..learner import CandidateSpace, default_candidate_space
from ..measures import AssessmentSet, build_assessment_set
from ..scm import Scm, ScmError, load_scm, validate_scm
from .counterexamples import product_fixture, vertical_fixture

DATA_ENV = "ABSTRACTION_DATA_DIR"
LUCAS_VARIABLES = ("Anx", "PP", "BED", "Gen", "All", "Sm", "YF", "LC", "AD", "Cou", "Fat", "CA")


def data_dir() -> Path:
    """Directory holding the bundled JSON files, overridable through ``ABSTRACTION_DATA_DIR``."""
    override = os.environ.get(DATA_ENV)
    return Path(override) if override else Path(__file__).parent / "data"


def data_path(name: str) -> Path:
    return data_dir() / name


def ingest_lucas(path=None) -> Scm:
    """Load and check the 12-variable binary lung-cancer network.

    Raises
    ------
    ScmError
        If the file is missing, malformed, or the model fails validation.
    """
    path = Path(path) if path is not None else data_path("lucas.json")
    try:
        scm = load_scm(path)
    except OSError as exc:
        raise ScmError(f"cannot read LUCAS file {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ScmError(f"LUCAS file {path} is not valid JSON: {exc}") from exc
    problems = validate_scm(scm)
    if len(scm.variables) != 12:
        problems.append(f"expected 12 variables, found {len(scm.variables)}")
    if len(scm.edges) != 12:
        problems.append(f"expected 12 edges, found {len(scm.edges)}")
    problems += [f"{v.name}: not binary" for v in scm.variables if v.size != 2]
    if problems:
        raise ScmError(f"LUCAS file {path} rejected: " + "; ".join(problems))
    return scm


def build_reference_models() -> dict[str, Scm]:
    """The chain, two-variable, three-variable and singleton reference models.

    Keys are ``"a"``, ``"b"``, ``"c"`` and ``"d"``.
    """
    files = {"a": "chain", "b": "smoking_health", "c": "lungcancer_high", "d": "singleton"}
    return {k: load_scm(data_path(f"{stem}.json")) for k, stem in files.items()}


def chain_abstraction() -> Abstraction:
    """Identity-valued abstraction from the chain model onto the two-variable model."""
    return load_abstraction(data_path("chain_abstraction.json"))


@dataclass(frozen=True)
class ExpectedValue:
    """A published reference number with the tolerance used to check it."""

    tag: str
    value: float
    tolerance: float
    note: str = ""


@dataclass(frozen=True, eq=False)
class ScenarioBundle:
    name: str
    base: Scm
    high: Scm
    abstraction: Abstraction
    candidates: CandidateSpace
    assessment_sets: Mapping[str, AssessmentSet]
    expected: tuple[ExpectedValue, ...] = field(default=())

    def expected_value(self, tag: str) -> ExpectedValue:
        for e in self.expected:
            if e.tag == tag:
                return e
        raise KeyError(tag)


def _health_expected() -> tuple[ExpectedValue, ...]:
    rows = [
        ("learn/ic", 0.029, 0.002, "least IC error over the candidate space"),
        ("learn/iil", 0.160, 0.002, "least IIL error over the candidate space"),
    ]
    for opt, vals in (("ic", (0.607, 0.600, 0.797, 0.797)), ("iil", (0.413, 0.498, 0.681, 0.799))):
        for (sm, side), v in zip([(0, "base"), (0, "high"), (1, "base"), (1, "high")], vals):
            rows.append((f"exam/{opt}/{side}/Sm={sm}", v, 0.02, "P(health index = 1) under do(smoking)"))
    for sm, v in ((0, 0.679), (1, 0.766)):
        rows.append((f"accident/base/Sm={sm}", v, 0.02, "P(CA=1 | do(Sm))"))
    for opt, vals in (("ic", (0.256, 0.341)), ("iil", (0.427, 0.680))):
        for sm, v in enumerate(vals):
            rows.append((f"accident/{opt}/Sm={sm}", v, 0.02, "P(CA=1 | do(Sm)) with Cou, Fat drawn from the high model"))
    return tuple(ExpectedValue(*r) for r in rows)


def _lungcancer_expected() -> tuple[ExpectedValue, ...]:
    rows = [
        ("learn/causal", 0.254, 0.002, "least ISIL error, causal set"),
        ("learn/parental", 0.221, 0.002, "least ISIL error, parental set"),
        ("learn/custom", 0.129, 0.002, "least ISIL error, custom set"),
    ]
    table = {
        "high": (0.445, 0.555, 0.655),
        "causal": (0.194, 0.271, 0.438),
        "parental": (0.563, 0.730, 0.807),
        "custom": (0.557, 0.730, 0.806),
    }
    for key, vals in table.items():
        for e, v in enumerate(vals):
            rows.append((f"predict/{key}/Env''={e}", v, 0.02, "P(LC = 1) under do(Env'')"))
    return tuple(ExpectedValue(*r) for r in rows)


def _load_pairs(path: Path) -> list:
    with open(path) as fh:
        return json.load(fh)["pairs"]


def build_health_scenario(lucas_path=None) -> ScenarioBundle:
    """LUCAS onto a two-variable health model with three candidate mechanisms."""
    base = ingest_lucas(lucas_path)
    high = load_scm(data_path("smoking_health.json"))
    partial = load_abstraction(data_path("health_abstraction.json"))
    with open(data_path("health_candidates.json")) as fh:
        mechanisms = json.load(fh)["mechanisms"]
    space = default_candidate_space(base, high, partial, mechanisms)
    sets = {"causal": build_assessment_set("causal", high)}
    return ScenarioBundle("health", base, high, partial, space, sets, _health_expected())


def build_lungcancer_scenario(lucas_path=None) -> ScenarioBundle:
    """LUCAS onto the three-variable environment and genetics model."""
    base = ingest_lucas(lucas_path)
    high = load_scm(data_path("lungcancer_high.json"))
    partial = load_abstraction(data_path("lungcancer_abstraction.json"))
    space = default_candidate_space(base, high, partial)
    sets = {
        "causal": build_assessment_set("causal", high),
        "parental": build_assessment_set("parental", high),
        "custom": build_assessment_set(
            "custom", high, _load_pairs(data_path("lungcancer_custom_pairs.json"))
        ),
    }
    return ScenarioBundle("lungcancer", base, high, partial, space, sets, _lungcancer_expected())


__all__ = [
    "DATA_ENV",
    "ExpectedValue",
    "LUCAS_VARIABLES",
    "ScenarioBundle",
    "build_reference_models",
    "build_health_scenario",
    "build_lungcancer_scenario",
    "data_dir",
    "data_path",
    "chain_abstraction",
    "ingest_lucas",
    "product_fixture",
    "vertical_fixture",
]
