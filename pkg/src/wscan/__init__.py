"""Second-order quantifier elimination on clause sets with witness extraction."""

from pathlib import Path

from .calculus import ClauseSet, ConstrElim, ExtPurDel, Fac, IllegalStep, PurDel, RedElim, Res, apply_step
from .logic import Atom, Clause, Const, Literal, PointedClause, PredicateExpression, Var, Witness
from .parser import ParseError, ProblemFile, parse_problem, parse_witness
from .saturation import (
    Derivation,
    Failure,
    SaturationConfig,
    derivation_from_choices,
    enumerate_derivations,
    saturate,
)
from .verifier import CheckReport, check_derivation, check_step, check_wsoqe, feq_check
from .witness import (
    ackermann_witness,
    extract_witness,
    generate_size_family,
    instantiate_params,
    res_predicate,
    simplify,
    unit_closure,
)

CORPUS = Path(__file__).parent / "corpus"

__all__ = [
    "CORPUS",
    "Atom",
    "CheckReport",
    "Clause",
    "ClauseSet",
    "Const",
    "ConstrElim",
    "Derivation",
    "ExtPurDel",
    "Fac",
    "Failure",
    "IllegalStep",
    "Literal",
    "ParseError",
    "PointedClause",
    "PredicateExpression",
    "ProblemFile",
    "PurDel",
    "RedElim",
    "Res",
    "SaturationConfig",
    "Var",
    "Witness",
    "ackermann_witness",
    "apply_step",
    "check_derivation",
    "check_step",
    "check_wsoqe",
    "derivation_from_choices",
    "enumerate_derivations",
    "extract_witness",
    "feq_check",
    "generate_size_family",
    "instantiate_params",
    "parse_problem",
    "parse_witness",
    "res_predicate",
    "saturate",
    "simplify",
    "unit_closure",
]
