"""Sparse multivariate polynomials over exact rationals.

Coefficients are `fractions.Fraction` throughout; generators are named
symbols ordered by a fixed rank (independent variable, then derivatives of
the dependent variable by order, then parameter symbols).  Terms are kept
in a dict keyed by exponent vectors, with no stored zeros, so equality is
structural.  Exponents are integers; negative exponents are tolerated so
that series coefficients may be localized at arbitrary-constant symbols,
but the expression frontend only ever builds genuine polynomials.
"""
from __future__ import annotations

import re
from fractions import Fraction
from math import gcd

__all__ = [
    "Poly",
    "deriv_gen",
    "deriv_order",
    "gen_sort_key",
    "grlex_key",
    "poly_substitute",
    "rational_roots",
    "rational_roots_residual",
    "sturm_root_count",
]

INDEP = "x"
DEP = "y"

_NAT_SPLIT = re.compile(r"(\d+)")


def _natural_key(name: str):
    return tuple(int(p) if p.isdigit() else p for p in _NAT_SPLIT.split(name))


def deriv_gen(order: int) -> str:
    """Internal generator name for the order-th derivative of the dependent variable."""
    if order < 0:
        raise ValueError("negative derivative order")
    return DEP if order == 0 else DEP + "'" * order


def deriv_order(name: str):
    """Derivative order of a generator name, or None for non-derivative symbols."""
    if name == DEP:
        return 0
    if name.startswith(DEP) and len(name) > 1 and set(name[1:]) == {"'"}:
        return len(name) - 1
    return None


def gen_sort_key(name: str):
    if name == INDEP:
        return (0, 0, ())
    k = deriv_order(name)
    if k is not None:
        return (1, k, ())
    return (2, 0, _natural_key(name))


def grlex_key(exps):
    """Canonical graded-lexicographic key for an exponent vector.

    Total degree first; ties broken so that weight on earlier generators
    (x before y before derivatives before parameters) sorts first.
    """
    return (sum(exps), tuple(-e for e in exps))


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected rational, got {type(value).__name__}")


class Poly:
    """Immutable-by-convention sparse polynomial."""

    __slots__ = ("gens", "terms")

    def __init__(self, gens=(), terms=None):
        gens = tuple(gens)
        terms = {e: c for e, c in (terms or {}).items() if c != 0}
        if terms and gens:
            used = [any(e[i] for e in terms) for i in range(len(gens))]
            if not all(used):
                keep = [i for i, u in enumerate(used) if u]
                gens = tuple(gens[i] for i in keep)
                terms = {tuple(e[i] for i in keep): c for e, c in terms.items()}
        elif not terms:
            gens = ()
        self.gens = gens
        self.terms = terms

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "Poly":
        return Poly((), {})

    @staticmethod
    def const(value) -> "Poly":
        value = _as_fraction(value)
        if value == 0:
            return Poly.zero()
        return Poly((), {(): value})

    @staticmethod
    def one() -> "Poly":
        return Poly.const(1)

    @staticmethod
    def gen(name: str) -> "Poly":
        return Poly((name,), {(1,): Fraction(1)})

    @staticmethod
    def monomial(coeff, powers: dict) -> "Poly":
        coeff = _as_fraction(coeff)
        powers = {g: int(e) for g, e in powers.items() if e != 0}
        if coeff == 0:
            return Poly.zero()
        gens = tuple(sorted(powers, key=gen_sort_key))
        return Poly(gens, {tuple(powers[g] for g in gens): coeff})

    # -- alignment ---------------------------------------------------------

    def _aligned_terms(self, gens: tuple) -> dict:
        if self.gens == gens:
            return dict(self.terms)
        pos = {g: i for i, g in enumerate(gens)}
        idx = [pos[g] for g in self.gens]
        out = {}
        n = len(gens)
        for e, c in self.terms.items():
            key = [0] * n
            for i, p in zip(idx, e):
                key[i] = p
            out[tuple(key)] = c
        return out

    def _union_gens(self, other: "Poly") -> tuple:
        if self.gens == other.gens:
            return self.gens
        return tuple(sorted(set(self.gens) | set(other.gens), key=gen_sort_key))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        elif not isinstance(other, Poly):
            return NotImplemented
        gens = self._union_gens(other)
        terms = self._aligned_terms(gens)
        for e, c in other._aligned_terms(gens).items():
            s = terms.get(e, 0) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return Poly(gens, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.gens, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        elif not isinstance(other, Poly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = _as_fraction(other)
            if q == 0:
                return Poly.zero()
            return Poly(self.gens, {e: c * q for e, c in self.terms.items()})
        if not isinstance(other, Poly):
            return NotImplemented
        gens = self._union_gens(other)
        a = self._aligned_terms(gens)
        b = other._aligned_terms(gens)
        if len(a) > len(b):
            a, b = b, a
        out = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                key = tuple(i + j for i, j in zip(ea, eb))
                s = out.get(key, 0) + ca * cb
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return Poly(gens, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial power must be a nonnegative integer")
        result = Poly.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        gens = self._union_gens(other)
        return self._aligned_terms(gens) == other._aligned_terms(gens)

    def __bool__(self):
        return bool(self.terms)

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.gens

    def const_value(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        if not self.is_const():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()))

    def degree(self, name: str) -> int:
        """Largest exponent of `name`; 0 when absent, -1 for the zero polynomial."""
        if self.is_zero():
            return -1
        if name not in self.gens:
            return 0
        i = self.gens.index(name)
        return max(e[i] for e in self.terms)

    def total_degree(self) -> int:
        if self.is_zero():
            return -1
        return max(sum(e) for e in self.terms)

    def max_deriv_order(self):
        """Highest derivative order among generators present, or None."""
        orders = [deriv_order(g) for g in self.gens]
        orders = [k for k in orders if k is not None]
        return max(orders) if orders else None

    def sorted_terms(self, reverse: bool = False):
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=reverse)

    def leading_term(self):
        """(exponents, coefficient) of the graded-lex maximal term."""
        if self.is_zero():
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=grlex_key)
        return e, self.terms[e]

    # -- calculus and substitution ------------------------------------------

    def diff(self, name: str) -> "Poly":
        if name not in self.gens:
            return Poly.zero()
        i = self.gens.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            key = e[:i] + (e[i] - 1,) + e[i + 1:]
            out[key] = out.get(key, 0) + c * e[i]
        return Poly(self.gens, out)

    def subs_rational(self, bindings: dict) -> "Poly":
        """Substitute rational values for a subset of generators."""
        if not bindings:
            return self
        keep = [i for i, g in enumerate(self.gens) if g not in bindings]
        vals = {i: _as_fraction(bindings[g]) for i, g in enumerate(self.gens) if g in bindings}
        gens = tuple(self.gens[i] for i in keep)
        out = {}
        for e, c in self.terms.items():
            for i, v in vals.items():
                if e[i] < 0 and v == 0:
                    raise ZeroDivisionError("evaluating negative power at zero")
                c = c * v ** e[i]
            if c == 0:
                continue
            key = tuple(e[i] for i in keep)
            s = out.get(key, 0) + c
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return Poly(gens, out)

    def evaluate(self, bindings: dict) -> Fraction:
        res = self.subs_rational({g: bindings[g] for g in self.gens})
        return res.const_value()

    def coeff_of(self, name: str, power: int) -> "Poly":
        """Coefficient of name**power, as a polynomial in the remaining generators."""
        if name not in self.gens:
            return self if power == 0 else Poly.zero()
        i = self.gens.index(name)
        gens = self.gens[:i] + self.gens[i + 1:]
        out = {}
        for e, c in self.terms.items():
            if e[i] != power:
                continue
            out[e[:i] + e[i + 1:]] = c
        return Poly(gens, out)

    def collect(self, names):
        """Group terms by their monomial over `names`.

        Returns a list of ((exponents over names), coefficient Poly) pairs,
        sorted ascending by graded-lex key.  `names` are put in canonical
        generator order.
        """
        names = tuple(sorted(set(names), key=gen_sort_key))
        idx = {g: i for i, g in enumerate(self.gens)}
        sel = [idx.get(g) for g in names]
        rest = [i for i, g in enumerate(self.gens) if g not in names]
        rest_gens = tuple(self.gens[i] for i in rest)
        groups = {}
        for e, c in self.terms.items():
            key = tuple(e[i] if i is not None else 0 for i in sel)
            rkey = tuple(e[i] for i in rest)
            groups.setdefault(key, {})[rkey] = c
        out = [(key, Poly(rest_gens, terms)) for key, terms in groups.items()]
        out.sort(key=lambda kv: grlex_key(kv[0]))
        return out

    def mul_term(self, coeff, powers: dict) -> "Poly":
        return self * Poly.monomial(coeff, powers)

    def div_term(self, coeff, powers: dict) -> "Poly":
        """Exact division by coeff * monomial; exponents may go negative."""
        coeff = _as_fraction(coeff)
        if coeff == 0:
            raise ZeroDivisionError("division by zero monomial")
        inv = {g: -int(e) for g, e in powers.items() if e != 0}
        return self.mul_term(Fraction(1) / coeff, inv)

    def univariate(self, name: str):
        """Coefficient list [c0, c1, ...] if the polynomial involves only `name`."""
        if any(g != name for g in self.gens):
            raise ValueError("polynomial is not univariate in " + name)
        if self.is_zero():
            return [Fraction(0)]
        if not self.gens:
            return [self.const_value()]
        deg = self.degree(name)
        coeffs = [Fraction(0)] * (deg + 1)
        for e, c in self.terms.items():
            coeffs[e[0]] = c
        return coeffs

    def content(self) -> Fraction:
        """Positive rational c such that self / c has coprime integer coefficients."""
        if self.is_zero():
            return Fraction(1)
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, c.numerator)
            den = den * c.denominator // gcd(den, c.denominator)
        return Fraction(num, den)

    def __repr__(self):
        if self.is_zero():
            return "Poly(0)"
        bits = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                g if p == 1 else f"{g}^{p}"
                for g, p in zip(self.gens, e) if p != 0
            )
            bits.append(f"{c}" + ("*" + mono if mono else ""))
        return "Poly(" + " + ".join(bits) + ")"


def poly_substitute(p: Poly, bindings: dict):
    """Substitute symbols by polynomial fractions, clearing denominators.

    `bindings` maps a generator name to a (numerator, denominator) pair of
    polynomials.  The result is returned as a single numerator polynomial
    together with bookkeeping {name: (denominator, power)} so that the value
    equals numerator / prod(denominator**power).
    """
    bookkeeping = {}
    result = p
    for name, (num, den) in bindings.items():
        if not isinstance(num, Poly):
            num = Poly.const(num)
        if not isinstance(den, Poly):
            den = Poly.const(den)
        if den.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if name not in result.gens:
            bookkeeping[name] = (den, 0)
            continue
        top = result.degree(name)
        if top < 0:
            top = 0
        acc = Poly.zero()
        for k in range(top + 1):
            coeff = result.coeff_of(name, k)
            if coeff.is_zero():
                continue
            acc = acc + coeff * num ** k * den ** (top - k)
        result = acc
        bookkeeping[name] = (den, top)
    return result, bookkeeping


def _divisors(n: int):
    n = abs(n)
    if n == 0:
        return []
    divs = {1}
    d = 2
    while d * d <= n:
        while n % d == 0:
            divs |= {x * d for x in divs}
            n //= d
        d += 1
    if n > 1:
        divs |= {x * n for x in divs}
    return sorted(divs)


def _eval_coeffs(coeffs, v: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * v + c
    return acc


def _deflate(coeffs, root: Fraction):
    # synthetic division by (s - root); caller guarantees the root is exact
    n = len(coeffs) - 1
    out = [Fraction(0)] * n
    out[n - 1] = coeffs[n]
    for k in range(n - 1, 0, -1):
        out[k - 1] = coeffs[k] + root * out[k]
    return out


def rational_roots_residual(q):
    """Rational roots with multiplicity plus the unfactored residual coefficients.

    Accepts a coefficient list [c0, c1, ...] of Fractions or a univariate
    Poly.  Each candidate from the rational-root theorem (on the
    integer-cleared polynomial) is verified by exact evaluation and divided
    out with its full multiplicity.
    """
    if isinstance(q, Poly):
        if q.is_zero():
            raise ValueError("identically zero")
        if q.is_const():
            return {}, [q.const_value()]
        name = q.gens[0]
        coeffs = q.univariate(name)
    else:
        coeffs = [_as_fraction(c) for c in q]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        raise ValueError("identically zero")
    if len(coeffs) == 1:
        return {}, coeffs

    roots = {}
    k = 0
    while coeffs[k] == 0:
        k += 1
    if k:
        roots[Fraction(0)] = k
        coeffs = coeffs[k:]

    # clear to coprime integers
    den = 1
    for c in coeffs:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    g = 0
    for c in ints:
        g = gcd(g, c)
    if g > 1:
        ints = [c // g for c in ints]
    coeffs = [Fraction(c) for c in ints]

    if len(coeffs) > 1:
        cands = set()
        for p in _divisors(ints[0]):
            for qd in _divisors(ints[-1]):
                cands.add(Fraction(p, qd))
        cands |= {-c for c in cands}
        for cand in sorted(cands):
            while len(coeffs) > 1 and _eval_coeffs(coeffs, cand) == 0:
                roots[cand] = roots.get(cand, 0) + 1
                coeffs = _deflate(coeffs, cand)
    return roots, coeffs


def rational_roots(q):
    """All rational roots with multiplicity and the residual degree left over."""
    roots, residual = rational_roots_residual(q)
    return roots, len(residual) - 1


def _poly_rem(a, b):
    # remainder of a by b, coefficient lists ascending, b nonzero
    a = list(a)
    while len(a) >= len(b) and any(c != 0 for c in a):
        while a and a[-1] == 0:
            a.pop()
        if len(a) < len(b):
            break
        factor = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[i + shift] -= factor * c
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def _sign_at(coeffs, point):
    """Sign of the polynomial at a rational point, or at -inf/+inf for None bounds."""
    if point == "+inf":
        v = coeffs[-1]
    elif point == "-inf":
        v = coeffs[-1] * (-1) ** (len(coeffs) - 1)
    else:
        v = _eval_coeffs(coeffs, point)
    return (v > 0) - (v < 0)


def sturm_root_count(coeffs, lo=None, hi=None) -> int:
    """Number of distinct real roots in (lo, hi] by Sturm's theorem.

    Bounds are Fractions; None means the corresponding infinity.  Intended
    for polynomials already stripped of their rational roots, where boundary
    roots cannot occur.
    """
    coeffs = [_as_fraction(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) <= 1:
        return 0
    chain = [coeffs, [c * i for i, c in enumerate(coeffs)][1:]]
    while len(chain[-1]) > 1 or (chain[-1] and chain[-1][0] != 0):
        rem = _poly_rem(chain[-2], chain[-1])
        if not rem:
            break
        chain.append([-c for c in rem])

    def variations(point):
        signs = [s for s in (_sign_at(p, point) for p in chain if p) if s != 0]
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    lo_pt = "-inf" if lo is None else lo
    hi_pt = "+inf" if hi is None else hi
    return variations(lo_pt) - variations(hi_pt)
