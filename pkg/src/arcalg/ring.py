"""Exact arithmetic in the coefficient rings R_n = Z[A^(1/2), A^(-1/2), v1^(+-1), ..., vn^(+-1)].

R_n is the ring of Laurent polynomials in the commuting variables A^(1/2)
and v1, ..., vn with integer coefficients.  The exponent of A is stored in
half-integer units (an integer count of A^(1/2) factors), so A itself has
half_a = 2 and the scalar delta = A^(1/2) + A^(-1/2) is exact.  Integer
coefficients are Python ints, hence arbitrary precision.

Values are immutable after construction and safe to share across threads.
Canonical form: no zero coefficients are stored, and two polynomials are
equal iff their term maps are identical.  Printing orders monomials by
graded lexicographic key (total degree, half_a, vexp), largest first.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple

__all__ = [
    "ArityError",
    "Monomial",
    "LaurentPoly",
    "zero",
    "one",
    "const",
    "a_power",
    "a_half_power",
    "v_power",
    "delta",
    "loop_scalar",
    "puncture_loop_scalar",
    "parse_poly",
]


class ArityError(ValueError):
    """Operands live over coefficient rings with different puncture counts."""


class Monomial(NamedTuple):
    """Unit monomial A^(half_a/2) * v1^vexp[0] * ... * vn^vexp[n-1]."""

    half_a: int
    vexp: tuple[int, ...]

    def degree(self) -> int:
        return self.half_a + sum(self.vexp)

    def inverse(self) -> "Monomial":
        return Monomial(-self.half_a, tuple(-e for e in self.vexp))

    def __mul__(self, other: "Monomial") -> "Monomial":  # type: ignore[override]
        return Monomial(
            self.half_a + other.half_a,
            tuple(a + b for a, b in zip(self.vexp, other.vexp)),
        )


def _mono_key(m: Monomial) -> tuple:
    return (m.degree(), m.half_a, m.vexp)


def _mono_str(m: Monomial, coeff: int) -> str:
    """Render one term without a leading sign, e.g. ``2*A^(1/2)*v1^-1``."""
    parts: list[str] = []
    h = m.half_a
    if h:
        if h % 2 == 0:
            k = h // 2
            parts.append("A" if k == 1 else f"A^{k}")
        else:
            parts.append(f"A^({h}/2)")
    for i, e in enumerate(m.vexp, start=1):
        if e:
            parts.append(f"v{i}" if e == 1 else f"v{i}^{e}")
    c = abs(coeff)
    if c != 1 or not parts:
        parts.insert(0, str(c))
    return "*".join(parts)


class LaurentPoly:
    """A sparse element of R_n: a finite map from monomials to nonzero ints."""

    __slots__ = ("arity", "_terms", "_hash")

    def __init__(self, arity: int, terms: Mapping[Monomial, int] | Iterable[tuple[Monomial, int]] = ()):
        if arity < 0:
            raise ValueError("arity must be nonnegative")
        items = terms.items() if isinstance(terms, Mapping) else terms
        tmap: dict[Monomial, int] = {}
        for mono, coeff in items:
            if len(mono.vexp) != arity:
                raise ArityError(f"monomial arity {len(mono.vexp)} != ring arity {arity}")
            if coeff:
                c = tmap.get(mono, 0) + coeff
                if c:
                    tmap[mono] = c
                else:
                    del tmap[mono]
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "_terms", tmap)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("LaurentPoly is immutable")

    # -- inspection ---------------------------------------------------------

    def terms(self) -> list[tuple[Monomial, int]]:
        """Terms in canonical (descending graded lex) order."""
        return sorted(self._terms.items(), key=lambda kv: _mono_key(kv[0]), reverse=True)

    def coeff(self, mono: Monomial) -> int:
        return self._terms.get(mono, 0)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_one(self) -> bool:
        return self._terms == {Monomial(0, (0,) * self.arity): 1}

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    # -- ring structure -----------------------------------------------------

    def _coerce(self, other) -> "LaurentPoly | None":
        if isinstance(other, LaurentPoly):
            if other.arity != self.arity:
                raise ArityError(f"arity mismatch: {self.arity} != {other.arity}")
            return other
        if isinstance(other, int):
            return const(other, self.arity)
        return None

    def __add__(self, other) -> "LaurentPoly":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms = dict(self._terms)
        for mono, c in o._terms.items():
            s = terms.get(mono, 0) + c
            if s:
                terms[mono] = s
            else:
                terms.pop(mono, None)
        return LaurentPoly(self.arity, terms)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.arity, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "LaurentPoly":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> "LaurentPoly":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other) -> "LaurentPoly":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        acc: dict[Monomial, int] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in o._terms.items():
                m = m1 * m2
                s = acc.get(m, 0) + c1 * c2
                if s:
                    acc[m] = s
                else:
                    del acc[m]
        return LaurentPoly(self.arity, acc)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentPoly":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            inv = self.try_unit_inverse()
            if inv is None:
                raise ValueError("negative power of a non-unit polynomial")
            return inv ** (-k)
        result = one(self.arity)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def try_unit_inverse(self) -> "LaurentPoly | None":
        """Inverse if this is a unit of R_n (a single term with coefficient +-1)."""
        if len(self._terms) != 1:
            return None
        (mono, c), = self._terms.items()
        if c not in (1, -1):
            return None
        return LaurentPoly(self.arity, {mono.inverse(): c})

    # -- evaluation ---------------------------------------------------------

    def specialize(self, a_half, vs: Iterable = ()) -> Fraction:
        """Exact rational value with A^(1/2) -> a_half and v_i -> vs[i-1].

        Every substituted value must be nonzero; the variables are units.
        """
        ah = Fraction(a_half)
        vals = [Fraction(x) for x in vs]
        if len(vals) != self.arity:
            raise ArityError(f"expected {self.arity} v-values, got {len(vals)}")
        if ah == 0 or any(x == 0 for x in vals):
            raise ValueError("specialization values must be nonzero")
        total = Fraction(0)
        for mono, c in self._terms.items():
            term = Fraction(c) * ah ** mono.half_a
            for val, e in zip(vals, mono.vexp):
                term *= val ** e
            total += term
        return total

    # -- identity -----------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = const(other, self.arity)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.arity == other.arity and self._terms == other._terms

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.arity, frozenset(self._terms.items())))
            object.__setattr__(self, "_hash", h)
        return h

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        out = []
        for mono, c in self.terms():
            body = _mono_str(mono, c)
            if not out:
                out.append(f"-{body}" if c < 0 else body)
            else:
                out.append(f" - {body}" if c < 0 else f" + {body}")
        return "".join(out)

    def __repr__(self) -> str:
        return f"<R{self.arity}: {self}>"


# -- constructors -----------------------------------------------------------


def zero(arity: int) -> LaurentPoly:
    return LaurentPoly(arity, {})


def one(arity: int) -> LaurentPoly:
    return const(1, arity)


def const(c: int, arity: int) -> LaurentPoly:
    return LaurentPoly(arity, {Monomial(0, (0,) * arity): c})


def a_half_power(h: int, arity: int) -> LaurentPoly:
    """A^(h/2), with h counted in units of A^(1/2)."""
    return LaurentPoly(arity, {Monomial(h, (0,) * arity): 1})


def a_power(k: int, arity: int) -> LaurentPoly:
    """A^k for a whole exponent k."""
    return a_half_power(2 * k, arity)


def v_power(i: int, arity: int, e: int = 1) -> LaurentPoly:
    """v_i^e for the i-th puncture variable, 1-indexed."""
    if not 1 <= i <= arity:
        raise ValueError(f"v{i} does not exist in R_{arity}")
    vexp = tuple(e if j == i else 0 for j in range(1, arity + 1))
    return LaurentPoly(arity, {Monomial(0, vexp): 1})


def delta(arity: int) -> LaurentPoly:
    """The scalar A^(1/2) + A^(-1/2)."""
    return a_half_power(1, arity) + a_half_power(-1, arity)


def loop_scalar(arity: int) -> LaurentPoly:
    """Value of a null-homotopic loop enclosing no puncture: -A^2 - A^-2."""
    return -(a_power(2, arity)) - a_power(-2, arity)


def puncture_loop_scalar(arity: int) -> LaurentPoly:
    """Value of a loop enclosing exactly one puncture: A + A^-1."""
    return a_power(1, arity) + a_power(-1, arity)


def parse_poly(text: str, arity: int) -> LaurentPoly:
    """Parse the canonical scalar grammar; inverse of ``str`` on R_n values."""
    from . import expressions

    return expressions.parse_scalar(text, arity)
