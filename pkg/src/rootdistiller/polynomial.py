"""Power-basis polynomials: exact Chebyshev generation, rounding, evaluation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from pathlib import Path
from typing import Iterable, Sequence

import gmpy2

from .mpcontext import MPReal, PrecContext, make_context, parse_decimal, to_decimal


def _strip(coeffs: Sequence) -> tuple:
    coeffs = tuple(coeffs)
    n = len(coeffs)
    while n > 1 and coeffs[n - 1] == 0:
        n -= 1
    return coeffs[:n] if n else (0,)


@dataclass(frozen=True)
class ExactPolynomial:
    """Integer coefficients, ascending powers."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in _strip(self.coeffs)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: int | Fraction) -> int | Fraction:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    @classmethod
    def from_roots(cls, roots: Iterable[Fraction]) -> "ExactPolynomial":
        """Integer polynomial vanishing exactly at the given rationals.

        The monic product is scaled by the lcm of the root denominators
        raised to the degree, which clears every denominator.
        """
        roots = [Fraction(r) for r in roots]
        poly = [Fraction(1)]
        for r in roots:
            nxt = [Fraction(0)] * (len(poly) + 1)
            for i, c in enumerate(poly):
                nxt[i + 1] += c
                nxt[i] -= r * c
            poly = nxt
        scale = lcm(1, *(r.denominator for r in roots)) ** len(roots)
        scaled = [c * scale for c in poly]
        assert all(c.denominator == 1 for c in scaled)
        return cls(tuple(int(c) for c in scaled))


def chebyshev_T(d: int) -> ExactPolynomial:
    """First-kind Chebyshev polynomial of degree ``d`` via the three-term recurrence."""
    if d < 0:
        raise ValueError("degree must be non-negative")
    prev, cur = [1], [0, 1]
    if d == 0:
        return ExactPolynomial((1,))
    for _ in range(d - 1):
        nxt = [0] + [2 * c for c in cur]
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return ExactPolynomial(tuple(cur))


@dataclass(frozen=True)
class Polynomial:
    """Coefficients (ascending powers) rounded to a fixed precision."""

    coeffs: tuple[MPReal, ...]
    ctx: PrecContext
    _raw: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        g = self.ctx.gmp
        coeffs = tuple(c if c.ctx == self.ctx else self.ctx.real(c) for c in self.coeffs)
        coeffs = _strip(coeffs) if coeffs else (self.ctx.zero,)
        if coeffs == (0,):
            coeffs = (self.ctx.zero,)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "_raw", tuple(g.plus(c.value) for c in coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: MPReal) -> MPReal:
        return horner_eval(self, x)

    @classmethod
    def from_strings(cls, coeffs: Sequence[str], ctx: PrecContext) -> "Polynomial":
        return cls(tuple(parse_decimal(c, ctx) for c in coeffs), ctx)

    def with_context(self, ctx: PrecContext) -> "Polynomial":
        return Polynomial(tuple(ctx.real(c) for c in self.coeffs), ctx)


def round_coeffs(p: ExactPolynomial, ctx: PrecContext) -> Polynomial:
    return Polynomial(tuple(ctx.real(gmpy2.mpz(c)) for c in p.coeffs), ctx)


def horner_eval(p: Polynomial, x: MPReal) -> MPReal:
    """Horner's scheme, each product and sum rounded to ``p.ctx``."""
    g = p.ctx.gmp
    xv = g.plus(x.value)
    raw = p._raw
    acc = raw[-1]
    for c in reversed(raw[:-1]):
        acc = g.add(g.mul(acc, xv), c)
    return MPReal(acc, p.ctx)


def compensated_horner_eval(p: Polynomial, x: MPReal) -> MPReal:
    """Compensated Horner scheme (Graillat, Langlois and Louvet, 2005).

    The rounding error of every product (via a fused multiply-subtract) and
    every sum (via TwoSum) is recovered exactly and accumulated in a second
    Horner recurrence. All operations stay at ``p.ctx`` precision, yet the
    result is as accurate as plain Horner evaluated with twice the precision.
    """
    g = p.ctx.gmp
    xv = g.plus(x.value)
    raw = p._raw
    s = raw[-1]
    corr = g.plus(0)
    for a in reversed(raw[:-1]):
        prod = g.mul(s, xv)
        prod_err = g.fms(s, xv, prod)
        s_new = g.add(prod, a)
        bb = g.sub(s_new, prod)
        sum_err = g.add(g.sub(prod, g.sub(s_new, bb)), g.sub(a, bb))
        corr = g.add(g.mul(corr, xv), g.add(prod_err, sum_err))
        s = s_new
    return MPReal(g.add(s, corr), p.ctx)


EVALUATORS = {
    "horner": horner_eval,
    "compensated": compensated_horner_eval,
}


def derivative(p: Polynomial) -> Polynomial:
    if p.degree == 0:
        return Polynomial((p.ctx.zero,), p.ctx)
    return Polynomial(tuple(c * (i + 1) for i, c in enumerate(p.coeffs[1:])), p.ctx)


def polynomial_to_json(p: Polynomial) -> dict:
    return {
        "degree": p.degree,
        "coeffs": [to_decimal(c) for c in p.coeffs],
        "prec": p.ctx.prec_digits,
    }


def load_polynomial(path: str | Path) -> Polynomial:
    """Read ``{"degree", "coeffs", "prec"}``; coefficients are parsed at ``prec``."""
    data = json.loads(Path(path).read_text())
    try:
        degree, coeffs, prec = int(data["degree"]), data["coeffs"], int(data["prec"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: expected keys degree, coeffs, prec") from exc
    if not isinstance(coeffs, list) or len(coeffs) != degree + 1:
        raise ValueError(f"{path}: coeffs must list degree + 1 = {degree + 1} entries")
    p = Polynomial.from_strings([str(c) for c in coeffs], make_context(prec))
    if p.degree != degree:
        raise ValueError(f"{path}: leading coefficient is zero")
    return p


def save_polynomial(p: Polynomial, path: str | Path) -> None:
    Path(path).write_text(json.dumps(polynomial_to_json(p), indent=2) + "\n")
