"""Python access to the ncball library.

Matrices are complex numpy arrays. Points and coefficient arrays are lists of
matrices in row-major grid order. Series and polynomial matrices use the same
JSON formats as the command-line tool and may be passed as dicts.
"""

import json

from . import _core
from ._core import (
    NcballError,
    analyze_clinging,
    certify_isometry,
    classify_ball,
    eval_poly,
    fock_identities,
    moebius_apply,
    parse_poly,
)

__all__ = [
    "NcballError",
    "analyze_clinging",
    "canonical_form",
    "certify_isometry",
    "classify_ball",
    "cofactor_solve",
    "eval_poly",
    "fock_identities",
    "moebius_apply",
    "parse_poly",
    "run_suite",
]


def _text(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def canonical_form(series, tol=1e-8, seed=0):
    return _core.canonical_form(_text(series), tol, seed)


def cofactor_solve(p, q, variables, max_degree=4, exact=True, seed=0):
    result = _core.cofactor_solve(_text(p), _text(q), variables, max_degree, exact, seed)
    if "g" in result:
        result["g"] = json.loads(result["g"])
    return result


def run_suite(seed=42, filters=()):
    return json.loads(_core.run_suite(seed, list(filters)))
