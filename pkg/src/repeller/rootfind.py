"""Safeguarded scalar root finding on a bracket.

Two solvers with one contract: the function is increasing on the bracket
and endpoint signs are checked up front with a useful error.

newton_bisect is the package's own inner solver (the cubic connector's
inverse evaluates through it): a bisection bracket polished by Newton
steps, falling back to bisection whenever a step would leave the bracket.
solve_increasing wraps scipy's Brent solver and exists so verification can
re-derive every inverse by an independent method.  Both surface iteration
cap hits as NoConvergence, which for the functions used here indicates a
defect in the callable, not slow convergence.
"""

from __future__ import annotations

from typing import Callable

from scipy.optimize import brentq

from .errors import NoConvergence, OutOfDomain

__all__ = ["newton_bisect", "solve_increasing", "invert_increasing"]


def newton_bisect(g: Callable[[float], float], dg: Callable[[float], float],
                  lo: float, hi: float, *, rtol: float = 1e-14,
                  maxiter: int = 200) -> float:
    """Root of an increasing g on [lo, hi], Newton inside a bisection bracket.

    The bracket never widens: every iterate replaces one endpoint, Newton
    steps are accepted only when they stay strictly inside, and anything
    else (including a nonpositive derivative sample) bisects instead.
    Stops when the step or the bracket is below rtol relative to the root.
    """
    if not lo < hi:
        raise OutOfDomain(f"bracket is empty: [{lo}, {hi}]")
    g_lo, g_hi = g(lo), g(hi)
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    if g_lo > 0.0 or g_hi < 0.0:
        raise OutOfDomain(
            f"no sign change on bracket: g({lo})={g_lo}, g({hi})={g_hi}")
    x = 0.5 * (lo + hi)
    for _ in range(maxiter):
        gx = g(x)
        if gx == 0.0:
            return x
        if gx > 0.0:
            hi = x
        else:
            lo = x
        d = dg(x)
        if d > 0.0:
            x_next = x - gx / d
            if not lo < x_next < hi:
                x_next = 0.5 * (lo + hi)
        else:
            x_next = 0.5 * (lo + hi)
        if abs(x_next - x) <= rtol * abs(x_next) or hi - lo <= rtol * max(abs(lo), abs(hi)):
            return x_next
        x = x_next
    raise NoConvergence(
        f"newton_bisect exceeded {maxiter} iterations on [{lo}, {hi}]")


def solve_increasing(g: Callable[[float], float], lo: float, hi: float,
                     *, rtol: float = 1e-14, maxiter: int = 200) -> float:
    """Root of an increasing function g on [lo, hi] with g(lo) <= 0 <= g(hi)."""
    if not lo < hi:
        raise OutOfDomain(f"bracket is empty: [{lo}, {hi}]")
    g_lo, g_hi = g(lo), g(hi)
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    if g_lo > 0.0 or g_hi < 0.0:
        raise OutOfDomain(
            f"no sign change on bracket: g({lo})={g_lo}, g({hi})={g_hi}")
    rtol = max(rtol, 4e-16)  # brentq rejects tolerances below ~2 ulp
    try:
        return float(brentq(g, lo, hi, rtol=rtol, maxiter=maxiter))
    except (ValueError, RuntimeError) as exc:
        raise NoConvergence(f"bracketed solve failed: {exc}") from exc


def invert_increasing(fn: Callable[[float], float], y: float, lo: float, hi: float,
                      *, rtol: float = 1e-14, maxiter: int = 200) -> float:
    """Preimage of y under an increasing function, by bracketed root finding."""
    return solve_increasing(lambda x: fn(x) - y, lo, hi, rtol=rtol, maxiter=maxiter)
