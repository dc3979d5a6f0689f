import json

import pytest

from complex_selberg.closed_form import (
    BetaParams,
    DfaParams,
    DirichletParams,
    DualParams,
    LemmaParams,
    TrapezoidParams,
    TriangularParams,
)
from complex_selberg.errors import ParameterShapeError
from complex_selberg.exponents import FieldExponent
from complex_selberg.identities import IdentitySpec, canonical_name, evaluate_rhs, load_spec, params_from_dict

F = FieldExponent.from_floor

ALL = [
    BetaParams(F(0.2, 1), "0.3-0.1i"),
    DfaParams(3, "0.2", F(0.35, -2), "0.1"),
    DirichletParams(("0.2", "0.15", "0.2", "0.1")),
    LemmaParams("0.2", "0.25", ("0.15", "0.2"), (0.4 + 0.3j, -0.5 + 0.8j)),
    DualParams("0.2", (0, 1, 0.3 + 0.9j)),
    TriangularParams(2, ("0.3", "0.25"), ("0.25", "0.3"), (("0.2",),)),
    TrapezoidParams(1, 2, ("0.3", "0.25"), ("0.25", "0.3"), "0.15", (("0.2",),)),
]


@pytest.mark.parametrize("params", ALL, ids=lambda p: type(p).__name__)
def test_json_round_trip(params):
    spec = IdentitySpec.from_params(params)
    back = IdentitySpec.from_json(spec.to_json())
    assert back == spec
    assert evaluate_rhs(back) == evaluate_rhs(params)


def test_aliases():
    assert canonical_name("main") == "theorem1"
    assert canonical_name("trapezoid") == "theorem2"
    with pytest.raises(ValueError):
        canonical_name("selberg")


def test_params_from_dict_rejects_missing_and_extra_fields():
    with pytest.raises(ParameterShapeError):
        params_from_dict("dfa", {"n": 2, "sigma": "0.3", "tau": "0.3"})
    with pytest.raises(ParameterShapeError):
        params_from_dict("dfa", {"n": 2, "sigma": "0.3", "tau": "0.3", "theta": "0.1", "nu": "0.1"})


def test_spec_type_must_match_identity():
    with pytest.raises(ParameterShapeError):
        IdentitySpec("dfa", BetaParams("0.3", "0.3"))


def test_load_spec_forms(tmp_path):
    full = tmp_path / "full.json"
    full.write_text(IdentitySpec.from_params(ALL[1]).to_json())
    assert load_spec(str(full)).params == ALL[1]
    bare = tmp_path / "bare.json"
    bare.write_text(json.dumps({"a": "0.3", "b": "0.4"}))
    assert load_spec(str(bare), "beta").params == BetaParams("0.3", "0.4")
    with pytest.raises(ValueError):
        load_spec(str(bare))
    with pytest.raises(ValueError):
        load_spec(str(full), "beta")
