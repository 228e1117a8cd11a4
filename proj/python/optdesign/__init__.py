"""Locally optimal and maximin designs for gamma regression models.

Models, designs, criteria and transforms are plain dicts with the same layout
as the command-line tool's JSON files.
"""

import json

from . import _core
from ._core import DesignError, classify_region, w_star_beta1_zero

__all__ = [
    "DesignError",
    "check",
    "classify_region",
    "criterion_value",
    "equal_slopes_closed_form",
    "maximin",
    "optimize",
    "reproduce",
    "transfer",
    "w_star_beta1_zero",
]


def _crit(criterion):
    return criterion if isinstance(criterion, str) else json.dumps(criterion)


def optimize(model, beta, criterion="D"):
    """Locally optimal design at beta with its equivalence certificate."""
    return json.loads(_core.optimize(json.dumps(model), list(beta), _crit(criterion)))


def check(model, beta, design, criterion="D"):
    return json.loads(_core.check(json.dumps(model), list(beta), _crit(criterion), json.dumps(design)))


def criterion_value(model, beta, design, criterion="D"):
    return _core.criterion_value(json.dumps(model), list(beta), _crit(criterion), json.dumps(design))


def transfer(model, beta, design, transform, criterion="D"):
    """Carry an optimal design to the image region and re-certify it there."""
    return json.loads(
        _core.transfer(json.dumps(model), list(beta), _crit(criterion), json.dumps(design), json.dumps(transform))
    )


def maximin(per_decade=8, include_limit=True, fixed_w=None):
    """Maximin D-efficient member of the equal-slopes invariant family on [0,1]^2."""
    return json.loads(_core.maximin(per_decade, include_limit, fixed_w))


def equal_slopes_closed_form(gamma):
    return json.loads(_core.equal_slopes_closed_form(gamma))


def reproduce(target, seed=None):
    raw = _core.reproduce(target) if seed is None else _core.reproduce(target, seed)
    return json.loads(raw)
