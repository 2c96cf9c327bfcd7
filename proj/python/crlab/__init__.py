"""Python access to the crlab certificate, solver and Hessian-field core.

Exact quantities are fractions.Fraction; floats stay floats. Records come
back as dicts with the same keys as the JSONL reports.
"""

import json
from fractions import Fraction

from . import _core
from ._core import DataError, RangeError, exact_profile, suite_names

__version__ = _core.__version__

__all__ = [
    "DataError",
    "RangeError",
    "analyze",
    "certify_B_nonpositive",
    "certify_a1_threshold",
    "closed_form_minor",
    "euler_residual",
    "exact_profile",
    "read_field",
    "run_suite",
    "sigma",
    "sigma_minor",
    "solve",
    "suite_names",
]


def _q(x):
    if isinstance(x, float):
        return repr(x)
    return str(Fraction(x))


def _qs(values):
    return [_q(x) for x in values]


def _exact(obj):
    if isinstance(obj, dict):
        if obj.keys() == {"q"}:
            return Fraction(obj["q"])
        return {k: _exact(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_exact(v) for v in obj]
    return obj


def _record(text):
    return _exact(json.loads(text))


def sigma(values, k):
    """sigma_k of the values. Exact unless every entry is a float."""
    values = list(values)
    if values and all(isinstance(x, float) for x in values):
        return _core.sigma_float(values, k)
    return Fraction(_core.sigma(_qs(values), k))


def sigma_minor(values, k, excluded):
    return Fraction(_core.sigma_minor(_qs(values), k, list(excluded)))


def euler_residual(values, k):
    return Fraction(_core.euler_residual(_qs(values), k))


def certify_B_nonpositive(A):
    return _record(_core.certify_B_nonpositive(_q(A)))


def certify_a1_threshold(n, A):
    return _record(_core.certify_a1_threshold(n, _q(A)))


def closed_form_minor(alpha, k):
    return Fraction(_core.closed_form_minor(_q(alpha), k))


def run_suite(name, seed=1, quick=False, A=None, n=None):
    A = None if A is None else _q(A)
    return [_record(r) for r in _core.run_suite(name, seed, quick, A, n)]


def solve(nl="exp:2", dim=1, lo=-1.0, hi=1.0, h=1 / 64, tol=1e-10, max_iter=50):
    """Newton solve with ln cosh Dirichlet data on the last coordinate.

    The returned dict holds the nodal values, the solver report and an
    opaque encoded field for analyze().
    """
    return _core.solve_lncosh(nl, dim, lo, hi, h, tol, max_iter)


def analyze(field, nl="exp:2", tol=None):
    out = _core.analyze_field(field, nl, tol)
    out["records"] = [_record(r) for r in out["records"]]
    return out


def read_field(path):
    """Encoded field from a field.bin written by the CLI."""
    return _core.read_field(str(path))
