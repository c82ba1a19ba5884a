"""Exact sparse multivariate polynomials over the rationals.

A polynomial is a dict mapping monomials to nonzero Fractions, where a
monomial is a sorted tuple of (variable, exponent) pairs and a variable is
any tuple whose entries compare (entry variables are ("m", arrow, i, j),
the flow parameter is ("t",)).  The empty monomial is the constant term.
This mirrors the usual sparse-dict representation and keeps identity
testing exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

Var = tuple
Mono = tuple  # sorted tuple of (Var, int) pairs, exponents > 0
ONE: Mono = ()


class Poly:
    """Immutable sparse polynomial with Fraction coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Mono, Fraction] | None = None):
        clean: dict[Mono, Fraction] = {}
        if terms:
            for mono, coeff in terms.items():
                coeff = Fraction(coeff)
                if coeff:
                    clean[mono] = clean.get(mono, Fraction(0)) + coeff
        self.terms = {m: c for m, c in clean.items() if c}

    @classmethod
    def zero(cls) -> "Poly":
        return cls()

    @classmethod
    def const(cls, value) -> "Poly":
        value = Fraction(value)
        return cls({ONE: value}) if value else cls()

    @classmethod
    def var(cls, v: Var, coeff=1) -> "Poly":
        return cls({((v, 1),): Fraction(coeff)})

    def is_zero(self) -> bool:
        return not self.terms

    def constant(self) -> Fraction:
        return self.terms.get(ONE, Fraction(0))

    def total_degree(self) -> int:
        return max((sum(e for _, e in m) for m in self.terms), default=0)

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return Poly(out)

    def __sub__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) - c
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def scale(self, scalar) -> "Poly":
        scalar = Fraction(scalar)
        return Poly({m: c * scalar for m, c in self.terms.items()})

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        out: dict[Mono, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return Poly(out)

    def __rmul__(self, scalar):
        if isinstance(scalar, (int, Fraction)):
            return self.scale(scalar)
        return NotImplemented

    def diff(self, v: Var) -> "Poly":
        out: dict[Mono, Fraction] = {}
        for mono, coeff in self.terms.items():
            for i, (var, exp) in enumerate(mono):
                if var != v:
                    continue
                if exp == 1:
                    new = mono[:i] + mono[i + 1 :]
                else:
                    new = mono[:i] + ((var, exp - 1),) + mono[i + 1 :]
                out[new] = out.get(new, Fraction(0)) + coeff * exp
                break
        return Poly(out)

    def variables(self) -> set:
        return {v for m in self.terms for v, _ in m}

    def evaluate(self, assignment: Mapping[Var, Fraction]) -> Fraction:
        total = Fraction(0)
        for mono, coeff in self.terms.items():
            val = coeff
            for var, exp in mono:
                val *= Fraction(assignment[var]) ** exp
            total += val
        return total

    def substitute(self, images: Mapping[Var, "Poly"]) -> "Poly":
        """Replace each variable by a polynomial (variables not listed stay)."""
        total = Poly.zero()
        for mono, coeff in self.terms.items():
            acc = Poly.const(coeff)
            for var, exp in mono:
                img = images.get(var)
                if img is None:
                    img = Poly.var(var)
                for _ in range(exp):
                    acc = acc * img
            total = total + acc
        return total

    def coefficient_of(self, v: Var, exp: int) -> "Poly":
        """The polynomial coefficient of v**exp (v removed from monomials)."""
        out: dict[Mono, Fraction] = {}
        for mono, coeff in self.terms.items():
            got = 0
            rest = []
            for var, e in mono:
                if var == v:
                    got = e
                else:
                    rest.append((var, e))
            if got == exp:
                out[tuple(rest)] = out.get(tuple(rest), Fraction(0)) + coeff
        return Poly(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, coeff in sorted(self.terms.items()):
            factors = [f"{_var_name(v)}^{e}" if e > 1 else _var_name(v) for v, e in mono]
            body = "*".join(factors)
            if not body:
                parts.append(str(coeff))
            elif coeff == 1:
                parts.append(body)
            elif coeff == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{coeff}*{body}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Poly({self})"


def _mono_mul(m1: Mono, m2: Mono) -> Mono:
    if not m1:
        return m2
    if not m2:
        return m1
    merged: dict = {}
    for v, e in m1:
        merged[v] = merged.get(v, 0) + e
    for v, e in m2:
        merged[v] = merged.get(v, 0) + e
    return tuple(sorted(merged.items()))


def _var_name(v: Var) -> str:
    if v and v[0] == "m":
        return f"{v[1]}[{v[2]},{v[3]}]"
    if v and v[0] == "t":
        return "t"
    return str(v)


def poly_sum(polys: Iterable[Poly]) -> Poly:
    total = Poly.zero()
    for p in polys:
        total = total + p
    return total
