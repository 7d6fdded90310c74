"""Max-min fuzzy evaluation of propositional expressions."""

from __future__ import annotations

from typing import Callable, NamedTuple, Optional

from .errors import QgirError, UnsupportedExpressionError
from .propositions import And, Atom, Leaf, Nested, Not, Or, PropExpr

Membership = float
LeafScore = Callable[[Atom], Membership]


class Score(NamedTuple):
    """A similarity value plus whether the unit carried any evidence for it.

    ``evidence=False`` marks "nothing to compare" (an empty keyword or place
    set), which is different from a genuine score of 0.
    """

    value: Membership
    evidence: bool = True


NO_EVIDENCE = Score(0.0, False)


def check_membership(value: float) -> float:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"membership out of [0, 1]: {value!r}")
    return value


def fuzzy_eval(
    expr: PropExpr,
    leaf_score: LeafScore,
    negated_leaf_score: Optional[LeafScore] = None,
) -> Membership:
    """Evaluate ``expr`` with complement for NOT, min for AND and max for OR.

    If ``negated_leaf_score`` is given, ``Not(Leaf(a))`` is scored by it
    directly instead of complementing ``leaf_score(a)``.  Set-valued leaves
    need this: the negation of a max is not the max of the negations.

    Errors raised by the leaf scorers keep their type and gain an ``atom``
    attribute naming the leaf that failed.
    """
    if isinstance(expr, Leaf):
        return _score(leaf_score, expr.atom)
    if isinstance(expr, Not):
        if negated_leaf_score is not None and isinstance(expr.operand, Leaf):
            return _score(negated_leaf_score, expr.operand.atom)
        return 1.0 - fuzzy_eval(expr.operand, leaf_score, negated_leaf_score)
    if isinstance(expr, And):
        return min(
            fuzzy_eval(expr.left, leaf_score, negated_leaf_score),
            fuzzy_eval(expr.right, leaf_score, negated_leaf_score),
        )
    if isinstance(expr, Or):
        return max(
            fuzzy_eval(expr.left, leaf_score, negated_leaf_score),
            fuzzy_eval(expr.right, leaf_score, negated_leaf_score),
        )
    if isinstance(expr, Nested):
        raise UnsupportedExpressionError(
            f"spatial operator {expr.predicate} applied to a compound operand has no similarity measure"
        )
    raise TypeError(f"not a proposition: {expr!r}")


def _score(fn: LeafScore, atom: Atom) -> Membership:
    try:
        value = fn(atom)
    except QgirError as exc:
        if getattr(exc, "atom", None) is None:
            exc.atom = atom
        raise
    try:
        return check_membership(value)
    except ValueError as exc:
        raise ValueError(f"leaf score for {atom!r}: {exc}") from None
