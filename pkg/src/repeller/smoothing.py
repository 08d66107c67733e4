"""C1 connector pieces built from a trapezoidal derivative profile.

Every non-affine piece of both constructions is an integral of a piecewise
linear derivative profile: ramp from d_left to d_mid over a fraction theta
of the interval, hold d_mid, ramp to d_right over the final theta fraction.
The middle level d_mid is chosen in closed form so the integral matches the
required endpoint values; theta is halved until the profile is admissible.
The resulting piece is piecewise quadratic, so values, derivatives and
inverses are all closed form with no iteration at evaluation time.

The two quadratic ramps are anchored at their own endpoints ((x0, y0) and
(x1, y1) respectively), so the connector reproduces both endpoint values
and both endpoint derivatives bit for bit; the only seam rounding sits at
the interior breakpoints and is a few ulps.

The second shape in this module is a single Hermite cubic matching value
and slope at both ends, kept in shifted Horner form so the increment above
the bottom value is exact to full relative precision.  It carries no free
design parameter; when its derivative is not strictly positive the caller
must change the endpoint data (the left-branch builder halves its
neighborhood width) rather than adjust the cubic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NoConvergence, OutOfDomain
from .rootfind import newton_bisect

__all__ = ["SlopeProfileConnector", "fit_connector", "stable_quad_root",
           "MonotoneCubic", "fit_hermite_cubic"]


def stable_quad_root(A: float, B: float, v: float) -> float:
    """Smallest nonnegative root of A*t**2 + B*t = v, for B > 0 and v >= 0.

    Written in the form that avoids cancellation when A*v is small against
    B**2, which is the common case here (nearly affine ramps).
    """
    disc = B * B + 4.0 * A * v
    if disc < 0.0:
        disc = 0.0  # only reachable through rounding at the top of a ramp
    return 2.0 * v / (B + math.sqrt(disc))


@dataclass(frozen=True)
class SlopeProfileConnector:
    """One fitted connector piece on [x0, x1], increasing, C1 at both ends."""

    x0: float
    x1: float
    y0: float
    y1: float
    d_left: float
    d_mid: float
    d_right: float
    theta: float

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def ramp(self) -> float:
        return self.theta * (self.x1 - self.x0)

    def _breaks(self) -> tuple[float, float, float, float]:
        wr = self.ramp
        xa = self.x0 + wr
        xb = self.x1 - wr
        ya = self.y0 + 0.5 * wr * (self.d_left + self.d_mid)
        yb = self.y1 - 0.5 * wr * (self.d_right + self.d_mid)
        return xa, xb, ya, yb

    def _check_domain(self, x: float) -> None:
        if not (self.x0 <= x <= self.x1):
            raise OutOfDomain(f"{x} outside connector domain [{self.x0}, {self.x1}]")

    def value_delta(self, x: float) -> float:
        """value(x) - y0, computed without adding y0 (no cancellation)."""
        self._check_domain(x)
        wr = self.ramp
        xa, xb, ya, yb = self._breaks()
        if x <= xa:
            xi = x - self.x0
            return xi * (self.d_left + 0.5 * (self.d_mid - self.d_left) * xi / wr)
        if x < xb:
            return (ya - self.y0) + self.d_mid * (x - xa)
        eta = self.x1 - x
        return (self.y1 - self.y0) - eta * (self.d_right + 0.5 * (self.d_mid - self.d_right) * eta / wr)

    def value(self, x: float) -> float:
        self._check_domain(x)
        wr = self.ramp
        xa, xb, ya, yb = self._breaks()
        if x <= xa:
            xi = x - self.x0
            return self.y0 + xi * (self.d_left + 0.5 * (self.d_mid - self.d_left) * xi / wr)
        if x < xb:
            return ya + self.d_mid * (x - xa)
        eta = self.x1 - x
        return self.y1 - eta * (self.d_right + 0.5 * (self.d_mid - self.d_right) * eta / wr)

    def deriv(self, x: float) -> float:
        self._check_domain(x)
        wr = self.ramp
        xa, xb, _, _ = self._breaks()
        if x <= xa:
            return self.d_left + (self.d_mid - self.d_left) * (x - self.x0) / wr
        if x < xb:
            return self.d_mid
        return self.d_right + (self.d_mid - self.d_right) * (self.x1 - x) / wr

    def inverse(self, y: float) -> float:
        """The unique x with value(x) == y, closed form per quadratic piece."""
        if not (self.y0 <= y <= self.y1):
            raise OutOfDomain(f"{y} outside connector range [{self.y0}, {self.y1}]")
        return self.inverse_delta(y - self.y0)

    def inverse_delta(self, v: float) -> float:
        """The x with value(x) - y0 == v.

        Taking the increment directly preserves tiny values of v that would
        be lost forming y0 + v; the bottom ramp then resolves x - x0 to full
        relative precision.
        """
        span = self.y1 - self.y0
        if not (0.0 <= v <= span):
            raise OutOfDomain(f"increment {v} outside [0, {span}]")
        wr = self.ramp
        xa, xb, ya, yb = self._breaks()
        va = ya - self.y0
        vb = (yb - self.y0)
        if v <= va:
            xi = stable_quad_root(0.5 * (self.d_mid - self.d_left) / wr, self.d_left, v)
            return self.x0 + min(xi, wr)
        if v < vb:
            return xa + (v - va) / self.d_mid
        eta = stable_quad_root(0.5 * (self.d_mid - self.d_right) / wr, self.d_right, span - v)
        return self.x1 - min(eta, wr)


def fit_connector(x0: float, x1: float, y0: float, y1: float,
                  d_left: float, d_right: float, *,
                  require_nondecreasing_profile: bool = False,
                  theta: float = 0.25, max_halvings: int = 80) -> SlopeProfileConnector:
    """Fit the trapezoid profile to the endpoint data by halving theta.

    The middle level is forced by the integral constraint:
        d_mid = (S - theta*(d_left + d_right)/2) / (1 - theta),  S = (y1-y0)/(x1-x0).
    Halving continues until the profile is admissible: strictly positive
    everywhere, and nondecreasing (d_left <= d_mid <= d_right) when the
    caller needs the piece convex.  Raises NoConvergence when no theta
    works; for the convex requirement that happens exactly when S falls
    outside (d_left, d_right), since d_mid tends to S as theta shrinks.
    """
    w = x1 - x0
    if not (w > 0.0):
        raise OutOfDomain(f"empty connector domain [{x0}, {x1}]")
    if not (y1 > y0):
        raise OutOfDomain(f"connector must increase, got values {y0} -> {y1}")
    if d_left <= 0.0 or d_right <= 0.0:
        raise OutOfDomain("endpoint slopes must be positive")
    S = (y1 - y0) / w
    th = theta
    for _ in range(max_halvings):
        d_mid = (S - 0.5 * th * (d_left + d_right)) / (1.0 - th)
        if require_nondecreasing_profile:
            ok = d_left <= d_mid <= d_right
        else:
            ok = d_mid > 0.0
        if ok:
            return SlopeProfileConnector(x0=x0, x1=x1, y0=y0, y1=y1,
                                         d_left=d_left, d_mid=d_mid,
                                         d_right=d_right, theta=th)
        th *= 0.5
    raise NoConvergence(
        f"no admissible profile: mean slope {S} against endpoint slopes "
        f"({d_left}, {d_right})" +
        (", nondecreasing profile required" if require_nondecreasing_profile else ""))


@dataclass(frozen=True)
class MonotoneCubic:
    """One increasing Hermite cubic on [x0, x1], in shifted Horner form.

    H(x) = y0 + D*(d0 + D*(c2 + c3*D)) with D = x - x0.  The increment
    H(x) - y0 has no constant term, so tiny increments just above x0
    evaluate to full relative precision -- the bottom end is exactly where
    the construction consumes them.  Both endpoints are special-cased so
    the values and slopes there are the stored data bit for bit, not the
    polynomial's rounding of it.
    """

    x0: float
    x1: float
    y0: float
    y1: float
    d0: float
    d1: float
    c2: float
    c3: float

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    def _check_domain(self, x: float) -> None:
        if not (self.x0 <= x <= self.x1):
            raise OutOfDomain(f"{x} outside cubic domain [{self.x0}, {self.x1}]")

    def value_delta(self, x: float) -> float:
        """value(x) - y0, computed without forming y0 + anything."""
        self._check_domain(x)
        if x == self.x1:
            return self.y1 - self.y0
        d = x - self.x0
        return d * (self.d0 + d * (self.c2 + self.c3 * d))

    def value(self, x: float) -> float:
        self._check_domain(x)
        if x == self.x1:
            return self.y1
        d = x - self.x0
        return self.y0 + d * (self.d0 + d * (self.c2 + self.c3 * d))

    def deriv(self, x: float) -> float:
        self._check_domain(x)
        if x == self.x1:
            return self.d1
        d = x - self.x0
        return self.d0 + d * (2.0 * self.c2 + 3.0 * self.c3 * d)

    def min_deriv(self) -> float:
        """Exact minimum of the derivative over [x0, x1] (quadratic vertex)."""
        lowest = min(self.d0, self.d1)
        if self.c3 != 0.0:
            dv = -self.c2 / (3.0 * self.c3)
            if 0.0 < dv < self.width:
                lowest = min(lowest, self.d0 + dv * (2.0 * self.c2 + 3.0 * self.c3 * dv))
        return lowest

    def inverse_delta(self, v: float, *, rtol: float = 1e-14,
                      maxiter: int = 200) -> float:
        """The x with value(x) - y0 == v, by bracketed Newton.

        The bracket is the cubic's own knot interval; Newton polishes inside
        it with bisection fallback, to relative tolerance rtol on x.
        """
        span = self.y1 - self.y0
        if not (0.0 <= v <= span):
            raise OutOfDomain(f"increment {v} outside [0, {span}]")
        if v == 0.0:
            return self.x0
        if v == span:
            return self.x1
        w = self.width
        top = w * (self.d0 + w * (self.c2 + self.c3 * w))
        if v >= top:
            return self.x1

        def g(d: float) -> float:
            return d * (self.d0 + d * (self.c2 + self.c3 * d)) - v

        def dg(d: float) -> float:
            return self.d0 + d * (2.0 * self.c2 + 3.0 * self.c3 * d)

        return self.x0 + newton_bisect(g, dg, 0.0, w, rtol=rtol, maxiter=maxiter)

    def inverse(self, y: float, *, rtol: float = 1e-14, maxiter: int = 200) -> float:
        """The unique x with value(x) == y."""
        if not (self.y0 <= y <= self.y1):
            raise OutOfDomain(f"{y} outside cubic range [{self.y0}, {self.y1}]")
        return self.inverse_delta(y - self.y0, rtol=rtol, maxiter=maxiter)


def fit_hermite_cubic(x0: float, x1: float, y0: float, y1: float,
                      d0: float, d1: float) -> MonotoneCubic:
    """The unique cubic matching value and slope at both ends.

    No monotonicity is imposed here: the returned object's min_deriv()
    reports the exact derivative minimum and the caller decides whether the
    endpoint data must change.  (Monotonicity of a Hermite cubic is a
    constraint on the endpoint slopes relative to the secant; with both of
    them fixed there is nothing left to limit inside the cubic itself.)
    """
    w = x1 - x0
    if not (w > 0.0):
        raise OutOfDomain(f"empty cubic domain [{x0}, {x1}]")
    if not (y1 > y0):
        raise OutOfDomain(f"cubic must increase, got values {y0} -> {y1}")
    s = (y1 - y0) / w
    c2 = (3.0 * s - 2.0 * d0 - d1) / w
    c3 = (d0 + d1 - 2.0 * s) / (w * w)
    return MonotoneCubic(x0=x0, x1=x1, y0=y0, y1=y1, d0=d0, d1=d1, c2=c2, c3=c3)
