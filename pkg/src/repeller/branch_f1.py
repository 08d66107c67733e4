"""The left branch of the circle map: an expanding full branch of [0, q].

Both constructions use the same skeleton: affine with slope q/b on [0, b]
(so the branch fixes 0 with multiplier q/b > 1 and sends b to q), then a
monotone continuation of (b, q] onto (q, 1].  The continuation is where the
two constructions differ:

  full      a single power piece 1 - (1-q)*((q-x)/(q-b))**s with s in (0,1);
            its derivative rises from q/b at b to +inf at q, so the branch
            is convex and steepens without bound at the cut point.
  physical  a monotone Hermite cubic on (b, q-u] followed by the quadratic
            cap 1 - (q-x)**2 on (q-u, q], u = (q-b)/4 by default; the
            derivative dies at the cut point (exactly zero at q), which is
            what lets orbit statistics concentrate at the fixed point for a
            fat set of starting points rather than just a dense one.  If
            the cubic fitting the two endpoint slopes is not strictly
            increasing, u is halved, at most twenty times, before the
            construction is declared infeasible.

Everything evaluates in closed form.  The offset helpers express values as
distances above q, which keeps full relative precision where absolute
coordinates would round to q or to 1.
"""

from __future__ import annotations

import math
from typing import Optional

from .errors import ConstructionFailed, IndexOutOfRange, OutOfDomain
from .params import ConstructionParams, DerivedConstants, Variant, validate
from .smoothing import MonotoneCubic, fit_hermite_cubic

__all__ = ["F1Evaluator", "build_f1"]


def _pow(base: float, expo: float) -> float:
    # x**y on subnormal bases can overflow for negative exponents
    try:
        return base ** expo
    except OverflowError:
        return math.inf


class F1Evaluator:
    """Closed-form evaluation of the left branch and its inverse."""

    def __init__(self, params: ConstructionParams, consts: DerivedConstants):
        self.params = params
        self.consts = consts
        q, b = params.q, params.b
        self._q, self._b = q, b
        self._one_minus_q = 1.0 - q
        self._qb_gap = q - b
        self._bq = b / q
        if params.variant is Variant.FULL:
            self._s = consts.s
            self.u: Optional[float] = None
            self.connector: Optional[MonotoneCubic] = None
            self._cap_left = None
            self._delta_cap = None
        else:
            # cubic from (b, q) slope q/b to (q - u, 1 - u^2) slope 2u;
            # halve u until the cubic is strictly increasing
            u = 0.25 * (q - b)
            connector = None
            for _ in range(21):
                cap_left = q - u
                cand = fit_hermite_cubic(b, cap_left, q, 1.0 - u * u,
                                         consts.m1, 2.0 * u)
                if cand.min_deriv() > 0.0:
                    connector = cand
                    break
                u *= 0.5
            if connector is None:
                raise ConstructionFailed(
                    0, "left-branch connector is not increasing for any "
                       "neighborhood width down to (q-b)/2**22")
            self.u = u
            self.connector = connector
            self._cap_left = connector.x1
            self._delta_cap = connector.y1 - q

    # -- forward ------------------------------------------------------------

    def f1_eval(self, x: float) -> float:
        """Branch value, mapping [0, q] increasingly onto [0, 1]."""
        if not (0.0 <= x <= self._q):
            raise OutOfDomain(f"left branch domain is [0, {self._q}], got {x}")
        if x <= self._b:
            return self.consts.m1 * x
        if self.params.variant is Variant.FULL:
            rho = (self._q - x) / self._qb_gap
            return 1.0 - self._one_minus_q * _pow(rho, self._s)
        if x <= self._cap_left:
            return self.connector.value(x)
        d = self._q - x
        return 1.0 - d * d

    def f1_deriv(self, x: float) -> float:
        """One-sided agreement at the seams is exact by construction.

        For the full variant the derivative diverges as x -> q; at x == q
        this returns math.inf (the honest limit).  For the physical variant
        it returns exactly 0.0 there.
        """
        if not (0.0 <= x <= self._q):
            raise OutOfDomain(f"left branch domain is [0, {self._q}], got {x}")
        if x <= self._b:
            return self.consts.m1
        if self.params.variant is Variant.FULL:
            if x == self._q:
                return math.inf
            rho = (self._q - x) / self._qb_gap
            return self._one_minus_q * self._s * _pow(rho, self._s - 1.0) / self._qb_gap
        if x <= self._cap_left:
            return self.connector.deriv(x)
        return 2.0 * (self._q - x)

    # -- inverse ------------------------------------------------------------

    def f1_inv(self, y: float) -> float:
        """The unique preimage in [0, q] of y in [0, 1]."""
        if not (0.0 <= y <= 1.0):
            raise OutOfDomain(f"branch range is [0, 1], got {y}")
        if y == self._q:
            return self._b  # exact junction, both pieces agree here
        if y < self._q:
            return y * self._bq
        if self.params.variant is Variant.FULL:
            rho = (1.0 - y) / self._one_minus_q
            return self._q - self._qb_gap * _pow(rho, 1.0 / self._s)
        if y <= self.connector.y1:
            return self.connector.inverse(y, rtol=self.params.tol_root)
        arg = 1.0 - y
        return self._q - math.sqrt(arg if arg > 0.0 else 0.0)

    def f1_inv_iter(self, y: float, k: int) -> float:
        """k-fold iterated inverse: the preimage chain contracts by b/q.

        After the first inverse the point sits in [0, q], and every further
        inverse is the exact affine contraction by b/q, so one call and one
        power suffice.
        """
        if k < 0:
            raise IndexOutOfRange(f"iteration count must be nonnegative, got {k}")
        if k == 0:
            return y if 0.0 <= y <= 1.0 else self._reject_range(y)
        return self.f1_inv(y) * self._bq ** (k - 1)

    def _reject_range(self, y: float) -> float:
        raise OutOfDomain(f"branch range is [0, 1], got {y}")

    # -- offset forms (distances above q) -------------------------------------

    def offset_above_q(self, w: float) -> float:
        """f1(w) - q for w in [b, q], cancellation-free.

        This is the re-entry coordinate of an excursion: a point w just
        right of b lands just above q, and the direct subtraction would
        round that tiny offset away.
        """
        if not (self._b <= w <= self._q):
            raise OutOfDomain(f"upper piece domain is [{self._b}, {self._q}], got {w}")
        if self.params.variant is Variant.FULL:
            if w == self._q:
                return self._one_minus_q
            rho = (self._q - w) / self._qb_gap
            return self._one_minus_q * (-math.expm1(self._s * math.log(rho)))
        if w <= self._cap_left:
            return self.connector.value_delta(w)
        d = self._q - w
        return self._one_minus_q - d * d

    def seed_from_offset(self, t: float) -> float:
        """Inverse of offset_above_q: the w in [b, q] with f1(w) == q + t."""
        if not (0.0 <= t <= self._one_minus_q):
            raise OutOfDomain(f"offset must lie in [0, {self._one_minus_q}], got {t}")
        if self.params.variant is Variant.FULL:
            ratio = t / self._one_minus_q
            if ratio >= 1.0:
                return self._q
            return self._b + self._qb_gap * (-math.expm1(math.log1p(-ratio) / self._s))
        if t >= self._delta_cap:
            arg = self._one_minus_q - t
            return self._q - math.sqrt(arg if arg > 0.0 else 0.0)
        return self.connector.inverse_delta(t, rtol=self.params.tol_root)


def build_f1(params: ConstructionParams,
             consts: Optional[DerivedConstants] = None) -> F1Evaluator:
    """Validate (unless given pre-derived constants) and build the branch."""
    if consts is None:
        consts = validate(params)
    return F1Evaluator(params, consts)
