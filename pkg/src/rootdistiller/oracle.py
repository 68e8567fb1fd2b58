"""Independent ground truth for checking distilled roots.

Computed with mpmath rather than the gmpy2 contexts used by the distiller,
and with bisection rather than Newton, so no arithmetic or iteration code
is shared with the path being checked.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath

from .mpcontext import MPReal, PrecContext, make_context
from .polynomial import Polynomial

GUARD_DIGITS = 8


@dataclass(frozen=True)
class OracleRoot:
    value: MPReal
    index_j: int


def _mp(bits: int) -> mpmath.ctx_mp.MPContext:
    # private context: mpmath's module-level mp is shared global state
    ctx = mpmath.MPContext()
    ctx.prec = bits
    return ctx


def _to_mp(mp, v):
    """Exact conversion of an MPReal (or decimal string / int) into ``mp``."""
    if isinstance(v, MPReal):
        man, exp = v.value.as_mantissa_exp()
        return mp.ldexp(mp.mpf(int(man)), int(exp))
    return mp.mpf(v)


def _from_mp(v, ctx: PrecContext) -> MPReal:
    sign, man, exp, _ = v._mpf_
    if not man:
        return ctx.zero
    return MPReal(ctx.gmp.mul_2exp(-int(man) if sign else int(man), int(exp)), ctx)


def chebyshev_roots(d: int, a: MPReal, b: MPReal, ctx: PrecContext) -> list[OracleRoot]:
    """Zeros ``cos((2j+1)pi/(2d))`` of T_d lying in ``[a, b]``, ascending."""
    if d < 1:
        raise ValueError("degree must be positive")
    guard = make_context(ctx.prec_digits + GUARD_DIGITS)
    mp = _mp(guard.prec_bits)
    lo, hi = _to_mp(mp, a), _to_mp(mp, b)
    if not lo < hi:
        raise ValueError("interval must satisfy a < b")
    found = []
    for j in range(d):
        alpha = mp.cos((2 * j + 1) * mp.pi / (2 * d))
        if lo <= alpha <= hi:
            found.append(OracleRoot(_from_mp(alpha, ctx), j))
    found.reverse()  # cos is decreasing in j
    return found


def _eval(mp, coeffs, x):
    acc = mp.zero
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def bisection_steps(width, target_tol) -> int:
    """Halvings needed to shrink ``width`` to at most ``target_tol``: ceil(log2(width/tol))."""
    n = 0
    while width > target_tol:
        width = width / 2
        n += 1
    return n


def bisection_refine(f: Polynomial, x1: MPReal, x2: MPReal, target_tol) -> MPReal:
    """Midpoint of a sign-change bracket of width <= ``target_tol``.

    ``f`` is evaluated with its coefficients taken exactly, at a precision high
    enough that the sign of ``f`` is trustworthy near its simple roots. The
    result carries the oracle's guard digits.
    """
    out_ctx = make_context(f.ctx.prec_digits + GUARD_DIGITS)
    bits = 2 * f.ctx.prec_bits + 4 * f.degree + 64
    mp = _mp(bits)
    coeffs = [_to_mp(mp, c) for c in f.coeffs]
    lo, hi = _to_mp(mp, x1), _to_mp(mp, x2)
    if lo > hi:
        lo, hi = hi, lo
    tol = _to_mp(mp, target_tol)
    if not tol > 0:
        raise ValueError("target_tol must be positive")
    flo, fhi = _eval(mp, coeffs, lo), _eval(mp, coeffs, hi)
    if flo == 0:
        return _from_mp(lo, out_ctx)
    if fhi == 0:
        return _from_mp(hi, out_ctx)
    if mp.sign(flo) == mp.sign(fhi):
        raise ValueError("f does not change sign on the bracket")
    for _ in range(bisection_steps(hi - lo, tol)):
        mid = (lo + hi) / 2
        fm = _eval(mp, coeffs, mid)
        if fm == 0:
            return _from_mp(mid, out_ctx)
        if mp.sign(fm) == mp.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
    return _from_mp((lo + hi) / 2, out_ctx)


def sign_change_subintervals(f: Polynomial, x1: MPReal, x2: MPReal, pieces: int = 64) -> list[tuple[MPReal, MPReal]]:
    """Split ``[x1, x2]`` evenly and keep the pieces on which ``f`` changes sign."""
    mp = _mp(2 * f.ctx.prec_bits + 4 * f.degree + 64)
    coeffs = [_to_mp(mp, c) for c in f.coeffs]
    lo, hi = _to_mp(mp, x1), _to_mp(mp, x2)
    ctx = make_context(f.ctx.prec_digits + GUARD_DIGITS)
    xs = [lo + (hi - lo) * i / pieces for i in range(pieces + 1)]
    fs = [_eval(mp, coeffs, x) for x in xs]
    return [(_from_mp(xs[i], ctx), _from_mp(xs[i + 1], ctx))
            for i in range(pieces) if fs[i] * fs[i + 1] <= 0]

