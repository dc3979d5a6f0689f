"""Identity specifications: which integral, with which parameters.

An :class:`IdentitySpec` pairs an identity name with its parameter record and
serializes to plain JSON, with exponents in the ``"a_re+a_im i|k"`` text form
and complex points as ``[re, im]`` pairs::

    {"identity": "dfa", "params": {"n": 2, "sigma": "0.3|0", "tau": "0.3|0", "theta": "0.15|0"}}
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .closed_form import (
    BetaParams,
    DfaParams,
    DirichletParams,
    DualParams,
    LemmaParams,
    TrapezoidParams,
    TriangularParams,
    beta_rhs,
    dfa_rhs,
    dirichlet_rhs,
    dual_rhs,
    lemma_main_rhs,
    main_rhs,
    trapezoid_rhs,
)
from .errors import ParameterShapeError
from .exponents import format_exponent

__all__ = [
    "IDENTITIES",
    "ALIASES",
    "IdentitySpec",
    "evaluate_rhs",
    "params_from_dict",
    "params_to_dict",
    "load_spec",
]

IDENTITIES = {
    "beta": BetaParams,
    "dirichlet": DirichletParams,
    "lemma_main": LemmaParams,
    "dual": DualParams,
    "theorem1": TriangularParams,
    "theorem2": TrapezoidParams,
    "dfa": DfaParams,
}

ALIASES = {"main": "theorem1", "trapezoid": "theorem2", "lemma": "lemma_main"}

_RHS = {
    BetaParams: beta_rhs,
    DirichletParams: dirichlet_rhs,
    LemmaParams: lemma_main_rhs,
    DualParams: dual_rhs,
    TriangularParams: main_rhs,
    TrapezoidParams: trapezoid_rhs,
    DfaParams: dfa_rhs,
}

# Field name -> kind, in serialization order.
_FIELDS = {
    BetaParams: (("a", "exp"), ("b", "exp")),
    DirichletParams: (("a", "exps"),),
    LemmaParams: (("sigma", "exp"), ("tau", "exp"), ("theta", "exps"), ("z", "points")),
    DualParams: (("theta", "exp"), ("u", "points")),
    TriangularParams: (("n", "int"), ("sigma", "exps"), ("tau", "exps"), ("theta", "rows")),
    TrapezoidParams: (
        ("m", "int"),
        ("n", "int"),
        ("sigma", "exps"),
        ("tau", "exps"),
        ("nu", "exp"),
        ("theta", "rows"),
    ),
    DfaParams: (("n", "int"), ("sigma", "exp"), ("tau", "exp"), ("theta", "exp")),
}


def canonical_name(name: str) -> str:
    name = ALIASES.get(name, name)
    if name not in IDENTITIES:
        raise ValueError(f"unknown identity {name!r}; expected one of {sorted(IDENTITIES)}")
    return name


def _emit(kind, value):
    if kind == "int":
        return int(value)
    if kind == "exp":
        return format_exponent(value)
    if kind == "exps":
        return [format_exponent(e) for e in value]
    if kind == "rows":
        return [[format_exponent(e) for e in row] for row in value]
    if kind == "points":
        return [[float(v.real), float(v.imag)] for v in value]
    raise AssertionError(kind)


def params_to_dict(params) -> dict:
    return {name: _emit(kind, getattr(params, name)) for name, kind in _FIELDS[type(params)]}


def params_from_dict(identity: str, data: dict):
    cls = IDENTITIES[canonical_name(identity)]
    names = [name for name, _ in _FIELDS[cls]]
    unknown = set(data) - set(names)
    missing = [n for n in names if n not in data]
    if unknown or missing:
        raise ParameterShapeError(f"{identity} params: missing {missing}, unexpected {sorted(unknown)}")
    kwargs = {}
    for name, kind in _FIELDS[cls]:
        value = data[name]
        if kind == "rows":
            value = tuple(tuple(row) for row in value)
        elif kind in ("exps", "points"):
            value = tuple(value)
        kwargs[name] = value
    return cls(**kwargs)


@dataclass(frozen=True)
class IdentitySpec:
    identity: str
    params: object

    def __post_init__(self):
        name = canonical_name(self.identity)
        object.__setattr__(self, "identity", name)
        if not isinstance(self.params, IDENTITIES[name]):
            raise ParameterShapeError(f"{name} expects {IDENTITIES[name].__name__}, got {type(self.params).__name__}")

    @classmethod
    def from_params(cls, params) -> IdentitySpec:
        for name, kind in IDENTITIES.items():
            if isinstance(params, kind):
                return cls(name, params)
        raise TypeError(f"no identity for {type(params).__name__}")

    @classmethod
    def from_dict(cls, data: dict) -> IdentitySpec:
        return cls(data["identity"], params_from_dict(data["identity"], data["params"]))

    def to_dict(self) -> dict:
        return {"identity": self.identity, "params": params_to_dict(self.params)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> IdentitySpec:
        return cls.from_dict(json.loads(text))


def load_spec(path: str, identity: str | None = None) -> IdentitySpec:
    """Read a params file holding either a full spec or a bare params object."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if "identity" in data and "params" in data:
        if identity is not None and canonical_name(identity) != canonical_name(data["identity"]):
            raise ValueError(f"file describes {data['identity']!r}, not {identity!r}")
        return IdentitySpec.from_dict(data)
    if identity is None:
        raise ValueError("bare params file needs --identity")
    return IdentitySpec(identity, params_from_dict(identity, data))


def evaluate_rhs(spec) -> complex:
    """Closed-form right-hand side for a spec or a bare params record."""
    params = getattr(spec, "params", spec)
    return _RHS[type(params)](params)
