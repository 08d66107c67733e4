"""Parameter validation and the geometric partition of the return interval.

Both constructions share one skeleton.  A cut point q splits the circle
[0,1) into a left interval [0,q] carrying a single increasing branch onto
[0,1], and a return interval (q,1].  The return interval is tiled by a
geometric family of cells accumulating at q from the right; the left
interval carries the pullback family of intervals accumulating at the
fixed point 0.  Everything in this module is closed form: cells are
computed on demand from (q, b, a_eff), never stored in tables, so indexed
access is O(1) and two computations of the same endpoint agree bit for bit.

Cells are half open on the left and closed on the right, so every point of
(q,1] lies in exactly one cell and shared endpoints belong to the cell on
their left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

from .errors import DepthExceeded, IndexOutOfRange, InvalidParam, OutOfDomain

__all__ = [
    "Variant",
    "ConstructionParams",
    "DerivedConstants",
    "PartitionCell",
    "Partition",
    "validate",
    "params_from_json",
    "params_to_json",
    "DEFAULT_N_MAX",
    "DEFAULT_TOL_ROOT",
    "DEFAULT_TOL_GLUE",
    "DEFAULT_DEPTH_CAP",
]

DEFAULT_N_MAX = 400
DEFAULT_TOL_ROOT = 1e-14
DEFAULT_TOL_GLUE = 1e-8
DEFAULT_DEPTH_CAP = 2000


class Variant(Enum):
    """Which of the two constructions is being built.

    FULL: convex return branches, left-branch derivative blows up at the
    cut point, every sampled orbit statistic concentrates at the fixed point.
    PHYSICAL: globally C1 map, left-branch derivative vanishes at the cut
    point, a positive-measure set of starting points concentrates there.
    """

    FULL = "full"
    PHYSICAL = "physical"


def default_full_p_rule(n: int) -> float:
    # any nondecreasing sequence in (0,1) tending to 1 whose product stays
    # positive is admissible; this is the simplest such choice
    return 1.0 - 2.0 ** (-n)


@dataclass(frozen=True)
class ConstructionParams:
    """User-facing knobs for one construction.

    q: cut point, in (0,1); the return interval is (q,1].
    b: preimage of q under the left branch, in (0,q).
    a: cell-contraction ratio in (1/2,1).  FULL only, user chosen.
    alpha: exponent defining the contraction ratio (b/q)**alpha.  PHYSICAL only.
    beta: exponent controlling how fast the affine part of each return
        branch fills its cell.  PHYSICAL only.
    epsilon: size prefactor of the non-affine part of each return branch.
        PHYSICAL only.
    p_seq_spec: rule n -> p_n for the affine fraction of cell n (FULL only;
        defaults to 1 - 2**-n).  Must be nondecreasing, in (0,1), tend to 1,
        and keep the infinite product positive.
    n_max: how deep enumeration-style checks walk the cell family.  Cells
        beyond n_max remain computable by closed form.
    tol_root: relative tolerance of the safeguarded root finder.
    tol_glue: tolerance for one-sided derivative agreement checks.
    """

    variant: Variant
    q: float
    b: float
    a: Optional[float] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    epsilon: Optional[float] = None
    p_seq_spec: Optional[Callable[[int], float]] = field(default=None, repr=False)
    n_max: int = DEFAULT_N_MAX
    tol_root: float = DEFAULT_TOL_ROOT
    tol_glue: float = DEFAULT_TOL_GLUE


@dataclass(frozen=True)
class DerivedConstants:
    """Constants computed once at validation and shared by every module.

    r: width of the gap between q and the first cell; equals
       1 - (1-q)*(b/q) - q = (1-q)*(q-b)/q > 0.
    a_eff: cell contraction ratio (the user's a for FULL, (b/q)**alpha for
       PHYSICAL); cell n has width proportional to a_eff**n.
    m1: slope of both affine pieces at the fixed point, q/b > 1.
    s: exponent of the left branch's upper piece (FULL only, in (0,1)).
    mn_base: limit slope of the affine branch pieces, a_eff/(1-a_eff) > 1.
    """

    r: float
    a_eff: float
    m1: float
    s: Optional[float]
    mn_base: float


@dataclass(frozen=True)
class PartitionCell:
    """One cell of the return-interval partition with its sub-splits.

    Offsets are distances above q; they carry full precision where the
    absolute coordinates q + offset would round.  For n >= 2 the cell splits
    into an affine piece of width len_left, a connector piece of width
    len_mid and a right piece of width len_right that abuts z_n = k_right.
    For the PHYSICAL variant len_mid == len_right is exact by construction;
    for FULL the two widths returned here are an even split of the
    non-affine remainder and branch assembly may shrink the right piece.
    The first cell (n = 1) carries a single affine piece and no sub-split.
    """

    n: int
    k_left: float
    k_right: float
    z_n: float
    off_left: float
    off_right: float
    width: float
    p_n: Optional[float]
    len_left: Optional[float]
    len_mid: Optional[float]
    len_right: Optional[float]


def _require(cond: bool, fieldname: str, reason: str) -> None:
    if not cond:
        raise InvalidParam(fieldname, reason)


def _basic_checks(p: ConstructionParams) -> None:
    _require(isinstance(p.variant, Variant), "variant", "must be Variant.FULL or Variant.PHYSICAL")
    _require(0.0 < p.q < 1.0, "q", f"must lie in (0,1), got {p.q}")
    _require(0.0 < p.b < p.q, "b", f"must lie in (0, q)=(0,{p.q}), got {p.b}")
    _require(p.n_max >= 2, "n_max", "must be at least 2")
    _require(p.tol_root > 0.0, "tol_root", "must be positive")
    _require(p.tol_glue > 0.0, "tol_glue", "must be positive")


def _derive(p: ConstructionParams) -> DerivedConstants:
    q, b = p.q, p.b
    r = (1.0 - q) * (q - b) / q  # == 1 - (1-q)*(b/q) - q, written gap-free
    if p.variant is Variant.FULL:
        a_eff = float(p.a)
        s = q * (q - b) / (b * (1.0 - q))
    else:
        a_eff = (b / q) ** p.alpha
        s = None
    m1 = q / b
    mn_base = a_eff / (1.0 - a_eff)
    return DerivedConstants(r=r, a_eff=a_eff, m1=m1, s=s, mn_base=mn_base)


def _check_p_sequence(rule: Callable[[int], float], n_max: int) -> None:
    prev = 0.0
    for n in range(2, n_max + 1):
        pn = rule(n)
        # pn == 1.0 is tolerated once the sequence has already converged to
        # within float resolution of 1 (the tail underflows below one ulp);
        # an early exact 1.0 is a genuinely inadmissible rule
        if pn == 1.0:
            _require(prev >= 1.0 - 1e-12, "p_seq_spec",
                     f"p_{n}=1.0 reached before the sequence converged (p_{n - 1}={prev})")
        else:
            _require(0.0 < pn < 1.0, "p_seq_spec", f"p_{n}={pn} outside (0,1)")
        _require(pn >= prev, "p_seq_spec", f"p_{n}={pn} decreases below p_{n - 1}={prev}")
        prev = pn
    x_last = 1.0 - rule(n_max)
    x_prev = 1.0 - rule(n_max - 1)
    # the tail 1 - p_n must vanish geometrically so the product converges
    _require(
        x_last < x_prev or x_last == 0.0,
        "p_seq_spec",
        f"1 - p_n is not decreasing near n_max ({x_prev} -> {x_last}); product may vanish",
    )


def validate(p: ConstructionParams) -> DerivedConstants:
    """Check every admissibility condition and return the derived constants.

    Raises InvalidParam naming the offending field; for the PHYSICAL size
    conditions on epsilon the message reports the numeric margin by which
    the inequality fails.
    """
    _basic_checks(p)
    if p.variant is Variant.FULL:
        _require(p.a is not None, "a", "required for the full variant")
        _require(p.alpha is None and p.beta is None and p.epsilon is None,
                 "alpha", "alpha/beta/epsilon are physical-variant parameters")
        _require(0.5 < p.a < 1.0, "a", f"must lie in (1/2, 1), got {p.a}")
        _require(p.b > p.q * p.q,
                 "b",
                 f"must exceed q^2={p.q * p.q} so the upper-piece exponent stays below 1 "
                 "(a constraint of the closed form chosen here, not of the construction)")
        _check_p_sequence(p.p_seq_spec or default_full_p_rule, p.n_max)
    else:
        _require(p.a is None, "a", "a is a full-variant parameter; the ratio is (b/q)**alpha here")
        _require(p.p_seq_spec is None, "p_seq_spec", "the affine fractions are fixed by epsilon and beta")
        _require(p.alpha is not None and p.beta is not None and p.epsilon is not None,
                 "alpha", "alpha, beta and epsilon are all required for the physical variant")
        _require(p.q < 0.5, "q", "physical variant requires q < 1/2")
        _require(0.0 < p.alpha < 0.5, "alpha", f"must lie in (0, 1/2), got {p.alpha}")
        _require(p.beta > 0.0, "beta", f"must be positive, got {p.beta}")
        _require(p.alpha + p.beta < 0.5,
                 "beta", f"2*alpha + 2*beta = {2 * (p.alpha + p.beta)} must stay below 1")
        _require(p.epsilon > 0.0, "epsilon", f"must be positive, got {p.epsilon}")

    consts = _derive(p)
    _require(consts.r > 0.0, "q", "derived gap width r must be positive")
    _require(consts.m1 > 1.0, "b", "q/b must exceed 1")
    if p.variant is Variant.FULL:
        _require(0.0 < consts.s < 1.0, "b", f"upper-piece exponent s={consts.s} outside (0,1)")
    else:
        _require(consts.a_eff > 0.5,
                 "alpha", f"(b/q)**alpha = {consts.a_eff} must exceed 1/2")
        # the two size conditions on epsilon, checked numerically
        fac2 = p.epsilon * (p.b / p.q) ** (2.0 * p.beta)
        width_k2 = consts.r * (1.0 - consts.a_eff)
        len_r2 = fac2 * width_k2
        half_k1 = 0.5 * (1.0 - p.q - consts.r)
        _require(len_r2 < half_k1,
                 "epsilon",
                 f"right-piece width at n=2 must stay below half the first cell; "
                 f"margin {half_k1 - len_r2:.6g} (needs > 0)")
        _require(1.0 / fac2 > 2.0 * consts.mn_base,
                 "epsilon",
                 f"1/(epsilon*(b/q)^(2*beta)) = {1.0 / fac2:.6g} must exceed "
                 f"2*mn_base = {2.0 * consts.mn_base:.6g}; margin {1.0 / fac2 - 2.0 * consts.mn_base:.6g}")
    _require(consts.mn_base > 1.0, "a", "cell ratio must exceed 1/2 so the limit slope exceeds 1")
    return consts


class Partition:
    """Closed-form indexed access to the cell families of one construction.

    Immutable after construction; safe for concurrent reads.
    """

    def __init__(self, params: ConstructionParams, consts: DerivedConstants,
                 depth_cap: int = DEFAULT_DEPTH_CAP):
        self.params = params
        self.consts = consts
        self.depth_cap = depth_cap
        self._ln_a = math.log(consts.a_eff)
        self._ln_r = math.log(consts.r)
        q = params.q
        self._width_k1 = 1.0 - q - consts.r

    @classmethod
    def from_params(cls, params: ConstructionParams, *, unchecked: bool = False,
                    depth_cap: int = DEFAULT_DEPTH_CAP) -> "Partition":
        """Validate (unless told not to) and build.

        unchecked=True skips the inequality checks but still derives the
        constants; it exists so that deliberately broken parameter sets can
        be constructed for negative-control verification runs.
        """
        if unchecked:
            _basic_checks(params)
            consts = _derive(params)
        else:
            consts = validate(params)
        return cls(params, consts, depth_cap=depth_cap)

    # -- scalar sequences ---------------------------------------------------

    def p_ratio(self, n: int) -> float:
        """Fraction of cell n occupied by its affine piece, in (0,1)."""
        if n < 2:
            raise IndexOutOfRange(f"affine fractions start at n=2, got {n}")
        p = self.params
        if p.variant is Variant.FULL:
            rule = p.p_seq_spec or default_full_p_rule
            return rule(n)
        return 1.0 - 2.0 * self._eps_factor(n)

    def _eps_factor(self, n: int) -> float:
        p = self.params
        return p.epsilon * (p.b / p.q) ** (n * p.beta)

    def slope_m(self, n: int) -> float:
        """Slope of the affine piece of return branch n; always > 1."""
        if n < 1:
            raise IndexOutOfRange(f"branch indices start at 1, got {n}")
        if n == 1:
            return self.consts.m1
        return self.consts.mn_base / self.p_ratio(n)

    # -- cell geometry ------------------------------------------------------

    def off(self, j: int) -> float:
        """Distance from q to the right endpoint of cell j+2 (= r * a_eff**j)."""
        return self.consts.r * self.consts.a_eff ** j

    def cell_K(self, n: int) -> PartitionCell:
        """Cell n of the return-interval partition, with sub-splits."""
        if n < 1:
            raise IndexOutOfRange(f"cell indices start at 1, got {n}")
        q = self.params.q
        if n == 1:
            left = q + self.consts.r
            return PartitionCell(
                n=1, k_left=left, k_right=1.0, z_n=1.0,
                off_left=self.consts.r, off_right=1.0 - q,
                width=self._width_k1,
                p_n=None, len_left=None, len_mid=None, len_right=None,
            )
        off_l = self.off(n - 1)
        off_r = self.off(n - 2)
        width = off_r - off_l  # exact: the two offsets are within a factor 1/a < 2
        p_n = self.p_ratio(n)
        len_left = p_n * width
        if self.params.variant is Variant.FULL:
            rest = width - len_left
            len_mid = 0.5 * rest
            len_right = 0.5 * rest
        else:
            fac = self._eps_factor(n)
            len_mid = fac * width
            len_right = fac * width
        return PartitionCell(
            n=n, k_left=q + off_l, k_right=q + off_r, z_n=q + off_r,
            off_left=off_l, off_right=off_r, width=width,
            p_n=p_n, len_left=len_left, len_mid=len_mid, len_right=len_right,
        )

    def cell_J(self, n: int) -> tuple[float, float]:
        """Interval n of the pullback family on the left of the cut point.

        The first is the whole return interval (q, 1]; deeper ones contract
        toward the fixed point by the exact factor b/q per level.
        """
        if n < 1:
            raise IndexOutOfRange(f"pullback indices start at 1, got {n}")
        q, b = self.params.q, self.params.b
        if n == 1:
            return (q, 1.0)
        scale = (b / q) ** (n - 2)
        return (b * scale, q * scale)

    # -- branch lookup ------------------------------------------------------

    def locate_offset(self, t: float) -> tuple[int, float]:
        """Cell index and in-cell offset for a point q + t of the return interval."""
        if not (t > 0.0):
            raise OutOfDomain(f"offset must be positive, got {t}")
        r = self.consts.r
        if t > r:
            if t > 1.0 - self.params.q:
                raise OutOfDomain(f"offset {t} lies beyond the circle")
            return 1, t - r
        # closed-form guess, then at most one step of boundary correction
        v = (math.log(t) - self._ln_r) / self._ln_a
        n = int(math.floor(v)) + 2
        if n < 2:
            n = 2
        while t <= self.off(n - 1):
            n += 1
            if n - 2 > self.depth_cap:
                raise DepthExceeded(f"offset {t} sits deeper than cell {self.depth_cap}")
        while t > self.off(n - 2):
            n -= 1
        if n - 2 > self.depth_cap:
            raise DepthExceeded(f"offset {t} sits deeper than cell {self.depth_cap}")
        return n, t - self.off(n - 1)

    def locate_I2(self, x: float) -> tuple[int, float]:
        """Cell index and distance above k_left for a coordinate x in (q, 1].

        Boundary attribution agrees exactly with the endpoints cell_K
        reports: locate_I2(cell_K(n).k_right) == n for every n, because the
        correction below compares against the very same floats.  The log
        estimate is off by at most a few cells; the loops finish the job.
        """
        q = self.params.q
        if not (q < x <= 1.0):
            raise OutOfDomain(f"expected a point of ({q}, 1], got {x}")
        t = x - q
        if x > q + self.consts.r:
            return 1, x - (q + self.consts.r)
        v = (math.log(t) - self._ln_r) / self._ln_a
        n = int(math.floor(v)) + 2
        if n < 2:
            n = 2
        while x <= q + self.off(n - 1):
            n += 1
            if n - 2 > self.depth_cap:
                raise DepthExceeded(f"point {x} sits deeper than cell {self.depth_cap}")
        while x > q + self.off(n - 2):
            n -= 1
        if n < 2:
            return 1, x - (q + self.consts.r)
        if n - 2 > self.depth_cap:
            raise DepthExceeded(f"point {x} sits deeper than cell {self.depth_cap}")
        return n, x - (q + self.off(n - 1))

    def locate_log(self, log_t: float) -> tuple[int, float]:
        """Like locate_offset but takes ln(t), for offsets too small to represent.

        Returns (n, lam) where lam in (0,1] is the relative position within
        cell n.  Not subject to the depth cap: this is the representation the
        orbit engine uses to stay exact arbitrarily close to the cut point.
        """
        a = self.consts.a_eff
        if log_t > self._ln_r:
            t = math.exp(log_t)
            if t > 1.0 - self.params.q:
                raise OutOfDomain(f"offset exp({log_t}) lies beyond the circle")
            return 1, (t - self.consts.r) / self._width_k1
        v = (log_t - self._ln_r) / self._ln_a
        j = math.floor(v)
        frac = v - j
        lam = (math.exp(frac * self._ln_a) - a) / (1.0 - a)
        n = int(j) + 2
        if lam <= 0.0:
            # frac rounded up to 1: the point is the right endpoint of the next cell
            n += 1
            lam = 1.0
        elif lam > 1.0:
            lam = 1.0
        return n, lam

    def lam_to_offset(self, n: int, lam: float) -> float:
        """Plain offset above q of the point at relative position lam in cell n.

        Underflows to 0.0 for cells too deep to represent; callers that need
        deep points keep (n, lam) instead.
        """
        if n == 1:
            return self.consts.r + lam * self._width_k1
        cell = self.cell_K(n)
        return cell.off_left + lam * cell.width


# -- JSON parameter schema ----------------------------------------------------

_JSON_KEYS = {"variant", "q", "b", "a", "alpha", "beta", "epsilon",
              "n_max", "tol_root", "tol_glue"}
_NUMERIC_KEYS = {"q", "b", "a", "alpha", "beta", "epsilon", "tol_root", "tol_glue"}


def params_from_json(obj: dict) -> ConstructionParams:
    """Build ConstructionParams from the documented JSON schema.

    Unknown keys are rejected so that typos fail loudly instead of being
    silently ignored.
    """
    if not isinstance(obj, dict):
        raise InvalidParam("(root)", "parameter document must be a JSON object")
    for key in obj:
        if key not in _JSON_KEYS:
            raise InvalidParam(key, "unknown parameter key")
    if "variant" not in obj:
        raise InvalidParam("variant", "required")
    tag = obj["variant"]
    if tag not in ("full", "physical"):
        raise InvalidParam("variant", f"must be 'full' or 'physical', got {tag!r}")
    for key in _NUMERIC_KEYS & obj.keys():
        if not isinstance(obj[key], (int, float)) or isinstance(obj[key], bool):
            raise InvalidParam(key, f"must be a number, got {obj[key]!r}")
    if "n_max" in obj and (not isinstance(obj["n_max"], int) or isinstance(obj["n_max"], bool)):
        raise InvalidParam("n_max", f"must be an integer, got {obj['n_max']!r}")
    for key in ("q", "b"):
        if key not in obj:
            raise InvalidParam(key, "required")
    kwargs = {k: obj[k] for k in obj if k != "variant"}
    return ConstructionParams(variant=Variant(tag), **kwargs)


def params_to_json(p: ConstructionParams) -> dict:
    """Serialize back to the documented JSON schema (custom p rules excluded)."""
    out: dict = {"variant": p.variant.value, "q": p.q, "b": p.b,
                 "n_max": p.n_max, "tol_root": p.tol_root, "tol_glue": p.tol_glue}
    if p.variant is Variant.FULL:
        out["a"] = p.a
    else:
        out["alpha"] = p.alpha
        out["beta"] = p.beta
        out["epsilon"] = p.epsilon
    return out
