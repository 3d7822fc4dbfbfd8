"""Return-time search for circle rotations x -> x + alpha (mod 1).

A simultaneous return at n means every multiple n*i*alpha (i = 1..k) lies
within epsilon of an integer; equivalently the point (x, .., x) of the
k-fold product rotation by (alpha, 2*alpha, .., k*alpha) returns to its
epsilon-cube, for every base point x at once.  All comparisons are made on
rational approximants with a tracked error bound; a comparison that the
current precision cannot decide escalates the precision instead of
guessing, so a reported witness is never a rounding artifact.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction

from .errors import DepthExhaustedError, PrecisionError

DEFAULT_PRECISION_ENV = "SHIFTREC_PRECISION"
_MAX_PRECISION = 1 << 14


def default_precision() -> int:
    return int(os.environ.get(DEFAULT_PRECISION_ENV, "128"))


def circle_norm(x: Fraction | int | str) -> Fraction:
    """Distance from x to the nearest integer, in [0, 1/2], exactly."""
    f = Fraction(x)
    frac = f - math.floor(f)
    return min(frac, 1 - frac)


class RotationSystem:
    """The rotation angle, given exactly or by its continued fraction.

    Accepted forms: a :class:`Fraction` (or ``p/q`` / decimal literal
    string), the keyword ``golden`` for the reciprocal golden ratio
    ``[0; 1, 1, 1, ...]``, or ``cf:a1,a2,...`` for the rational with that
    finite expansion.  ``approx(precision)`` returns a rational approximant
    together with an error bound of at most ``2**-precision``.
    """

    def __init__(self, alpha, precision: int | None = None):
        self.precision = precision if precision is not None else default_precision()
        self._cf_terms: tuple[int, ...] | None = None
        if isinstance(alpha, str):
            alpha = alpha.strip()
            if alpha == "golden":
                self.kind = "golden"
                self.exact = None
                return
            if alpha.startswith("cf:"):
                terms = [int(tok) for tok in alpha[3:].split(",") if tok.strip()]
                if not terms or any(a < 1 for a in terms):
                    raise ValueError("cf terms must be positive partial quotients")
                alpha = _from_continued_fraction([0] + terms)
            else:
                alpha = Fraction(alpha)
        if isinstance(alpha, (int, Fraction)):
            value = Fraction(alpha)
            if not 0 <= value < 1:
                value -= math.floor(value)
            self.kind = "rational"
            self.exact = value
            return
        raise ValueError(f"cannot interpret rotation angle {alpha!r}")

    @classmethod
    def golden(cls, precision: int | None = None) -> "RotationSystem":
        return cls("golden", precision)

    def approx(self, precision: int) -> tuple[Fraction, Fraction]:
        """(value, error bound); the error is zero for an exact rational angle."""
        if self.kind == "rational":
            return self.exact, Fraction(0)
        # (sqrt(5) - 1) / 2 via an integer square root at the requested scale.
        scale = 1 << precision
        s = math.isqrt(5 * scale * scale)
        return Fraction(s - scale, 2 * scale), Fraction(1, scale)

    def cf_terms(self, depth: int) -> tuple[int, ...]:
        """The first ``depth`` partial quotients, including the integer part."""
        if self.kind == "golden":
            return (0,) + (1,) * max(depth - 1, 0)
        if self._cf_terms is None:
            terms = []
            num, den = self.exact.numerator, self.exact.denominator
            while den:
                a, rem = divmod(num, den)
                terms.append(a)
                num, den = den, rem
            self._cf_terms = tuple(terms)
        return self._cf_terms[:depth]

    def convergents(self, depth: int):
        """Yield (p, q) convergents of the expansion, q nondecreasing."""
        p_prev2, p_prev1 = 0, 1
        q_prev2, q_prev1 = 1, 0
        for a in self.cf_terms(depth):
            p = a * p_prev1 + p_prev2
            q = a * q_prev1 + q_prev2
            yield p, q
            p_prev2, p_prev1 = p_prev1, p
            q_prev2, q_prev1 = q_prev1, q

    def describe(self) -> str:
        if self.kind == "golden":
            return "golden"
        return f"{self.exact.numerator}/{self.exact.denominator}"


def _from_continued_fraction(terms: list[int]) -> Fraction:
    value = Fraction(terms[-1])
    for a in reversed(terms[:-1]):
        value = a + 1 / value
    return value


@dataclass(frozen=True)
class ReturnReport:
    n: int
    distances: tuple[Fraction, ...]  # one per multiple i = 1..k
    epsilon: Fraction
    bound_used: int
    precision: int

    def max_distance(self) -> Fraction:
        return max(self.distances)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "distances": [f"{d.numerator}/{d.denominator}" for d in self.distances],
            "distances_float": [float(d) for d in self.distances],
            "epsilon": f"{self.epsilon.numerator}/{self.epsilon.denominator}",
            "bound_used": self.bound_used,
            "precision": self.precision,
        }


def _certified_distances(
    system: RotationSystem, k: int, n: int, epsilon: Fraction, precision: int
) -> tuple[Fraction, ...] | None:
    """Distances for multiples 1..k if all are certifiably below epsilon,
    None if certifiably not, PrecisionError if undecidable at this precision."""
    value, err = system.approx(precision)
    dists = []
    for i in range(1, k + 1):
        d = circle_norm(i * n * value)
        slack = i * n * err
        if d + slack < epsilon:
            dists.append(d)
        elif d - slack >= epsilon:
            return None
        else:
            raise PrecisionError(
                f"distance for n={n}, i={i} undecidable within error {slack}"
            )
    return tuple(dists)


def find_multi_return(
    system: RotationSystem,
    k: int,
    epsilon: Fraction | str,
    n_max: int,
    precision: int | None = None,
) -> ReturnReport | None:
    """Least n <= n_max with every multiple n*i*alpha within epsilon of an
    integer; the scan re-runs at doubled precision when a comparison is too
    close to call."""
    if k < 1:
        raise ValueError("k must be positive")
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    prec = precision if precision is not None else system.precision
    while True:
        try:
            for n in range(1, n_max + 1):
                dists = _certified_distances(system, k, n, eps, prec)
                if dists is not None:
                    return ReturnReport(n, dists, eps, n_max, prec)
            return None
        except PrecisionError:
            prec *= 2
            if prec > _MAX_PRECISION:
                raise


def verify_return(
    system: RotationSystem, report: ReturnReport, precision: int | None = None
) -> bool:
    """Re-check a report, by default at twice the precision it was made at."""
    prec = precision if precision is not None else 2 * report.precision
    dists = _certified_distances(system, len(report.distances), report.n, report.epsilon, prec)
    return dists is not None


def cf_accelerated_return(
    system: RotationSystem,
    k: int,
    epsilon: Fraction | str,
    max_depth: int = 256,
    precision: int | None = None,
) -> ReturnReport:
    """An admissible (not necessarily least) return among convergent denominators.

    A denominator q with ``k * ||q * alpha|| < epsilon`` serves all the
    multiples at once; for a rational angle the final denominator always
    works.  Each candidate is certified directly before being reported.
    """
    if k < 1:
        raise ValueError("k must be positive")
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    prec = precision if precision is not None else system.precision
    for _, q in system.convergents(max_depth):
        if q < 1:
            continue
        while True:
            try:
                dists = _certified_distances(system, k, q, eps, prec)
                break
            except PrecisionError:
                prec *= 2
                if prec > _MAX_PRECISION:
                    raise
        if dists is not None:
            return ReturnReport(q, dists, eps, q, prec)
    raise DepthExhaustedError(
        f"no convergent denominator within depth {max_depth} certified a return"
    )


def dirichlet_ceiling(k: int, epsilon: Fraction | str) -> int:
    """Pigeonhole ceiling: some n <= ceil(1/epsilon)**k has all k multiples
    within 1/ceil(1/epsilon) of an integer, for every angle."""
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    q = math.ceil(1 / eps)
    return q**k
