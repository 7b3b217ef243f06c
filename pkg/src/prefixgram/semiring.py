"""Commutative semirings used as weight domains.

Three instances are provided: :data:`REAL` (floats), :data:`LOGREAL`
(floats holding natural logarithms of nonnegative reals) and
:data:`BOOLEAN`.  A semiring is an immutable value; operation counting is
obtained by asking for a counted copy with :meth:`Semiring.counted`, so the
uncounted instances carry no instrumentation overhead at all.
"""
from __future__ import annotations

import math
import operator
from dataclasses import dataclass, field, replace
from typing import Any, Callable

from .errors import StarDiverges, StarUnsupported, WeightParseError

Weight = Any

DEFAULT_ATOL = 1e-9
DEFAULT_RTOL = 1e-9


class OpCounter:
    """Mutable tally of semiring additions and multiplications."""

    __slots__ = ("adds", "muls")

    def __init__(self):
        self.adds = 0
        self.muls = 0

    @property
    def count(self) -> int:
        return self.adds + self.muls

    def __repr__(self):
        return f"OpCounter(adds={self.adds}, muls={self.muls})"


@dataclass(frozen=True)
class Semiring:
    name: str
    zero: Weight
    one: Weight
    add: Callable[[Weight, Weight], Weight]
    mul: Callable[[Weight, Weight], Weight]
    star_fn: Callable[[Weight], Weight] | None
    parse_weight: Callable[[str], Weight]
    format_weight: Callable[[Weight], str]
    to_real: Callable[[Weight], float]
    from_real: Callable[[float], Weight]
    exact: bool = False
    counter: OpCounter | None = field(default=None, compare=False)

    def star(self, w: Weight) -> Weight:
        """Closure ``one + w + w*w + ...``."""
        if self.star_fn is None:
            raise StarUnsupported(f"semiring {self.name!r} has no star")
        return self.star_fn(w)

    def is_zero(self, w: Weight) -> bool:
        return w == self.zero

    def sum(self, ws) -> Weight:
        total = self.zero
        for w in ws:
            total = self.add(total, w)
        return total

    def prod(self, ws) -> Weight:
        total = self.one
        for w in ws:
            total = self.mul(total, w)
        return total

    def approx_eq(self, a: Weight, b: Weight, atol: float = DEFAULT_ATOL,
                  rtol: float = DEFAULT_RTOL) -> bool:
        if self.exact:
            return a == b
        x, y = self.to_real(a), self.to_real(b)
        if x == y:
            return True
        if math.isnan(x) or math.isnan(y) or math.isinf(x) or math.isinf(y):
            return False
        return abs(x - y) <= atol + rtol * max(abs(x), abs(y))

    def distance(self, a: Weight, b: Weight) -> float:
        """Nonnegative discrepancy used by fixed-point stopping rules."""
        if self.exact:
            return 0.0 if a == b else 1.0
        x, y = self.to_real(a), self.to_real(b)
        if x == y:
            return 0.0
        d = abs(x - y)
        return math.inf if math.isnan(d) else d

    def counted(self, counter: OpCounter | None = None) -> tuple["Semiring", OpCounter]:
        """A copy of this semiring whose add/mul tally into ``counter`` (fresh by default)."""
        if counter is None:
            counter = OpCounter()
        add, mul = self.add, self.mul

        def counted_add(a, b):
            counter.adds += 1
            return add(a, b)

        def counted_mul(a, b):
            counter.muls += 1
            return mul(a, b)

        return replace(self, add=counted_add, mul=counted_mul, counter=counter), counter

    def __repr__(self):
        return f"Semiring({self.name})"


# -- real -------------------------------------------------------------------

def _real_star(w):
    if w >= 1 or w <= -1:
        raise StarDiverges(f"star({w!r}) diverges in the real semiring")
    return 1.0 / (1.0 - w)


def _parse_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise WeightParseError(f"invalid weight {text!r}") from None
    if math.isnan(value) or value < 0:
        raise WeightParseError(f"weights must be nonnegative numbers, got {text!r}")
    return value


REAL = Semiring(
    name="real",
    zero=0.0,
    one=1.0,
    add=operator.add,
    mul=operator.mul,
    star_fn=_real_star,
    parse_weight=_parse_float,
    format_weight=repr,
    to_real=float,
    from_real=float,
)


# -- log-real ---------------------------------------------------------------

_NEG_INF = -math.inf


def _logaddexp(a, b):
    if a == _NEG_INF:
        return b
    if b == _NEG_INF:
        return a
    if a > b:
        return a + math.log1p(math.exp(b - a))
    return b + math.log1p(math.exp(a - b))


def _logmul(a, b):
    if a == _NEG_INF or b == _NEG_INF:
        return _NEG_INF
    return a + b


def _log_star(w):
    if w >= 0:
        raise StarDiverges(f"star(exp({w!r})) diverges in the log-real semiring")
    return -math.log1p(-math.exp(w))


def _log(x: float) -> float:
    return math.log(x) if x > 0 else _NEG_INF


LOGREAL = Semiring(
    name="logreal",
    zero=_NEG_INF,
    one=0.0,
    add=_logaddexp,
    mul=_logmul,
    star_fn=_log_star,
    parse_weight=lambda text: _log(_parse_float(text)),
    format_weight=lambda w: repr(math.exp(w)),
    to_real=math.exp,
    from_real=_log,
)


# -- boolean ----------------------------------------------------------------

def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true"):
        return True
    if t in ("0", "false"):
        return False
    raise WeightParseError(f"invalid boolean weight {text!r} (expected 1 or 0)")


BOOLEAN = Semiring(
    name="boolean",
    zero=False,
    one=True,
    add=operator.or_,
    mul=operator.and_,
    star_fn=lambda w: True,
    parse_weight=_parse_bool,
    format_weight=lambda w: "1" if w else "0",
    to_real=float,
    from_real=bool,
    exact=True,
)


SEMIRINGS = {s.name: s for s in (REAL, LOGREAL, BOOLEAN)}


def get_semiring(name: str) -> Semiring:
    try:
        return SEMIRINGS[name]
    except KeyError:
        raise ValueError(f"unknown semiring {name!r}; choose from {sorted(SEMIRINGS)}") from None


def semiring_star(w: Weight, semiring: Semiring = REAL) -> Weight:
    return semiring.star(w)
