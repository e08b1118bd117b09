"""Singularity analysis: leading orders, resonances, series consistency.

The pipeline follows the classical three steps: find exponents p where a
power-law ansatz balances the dominant terms, find the offsets s at which
arbitrary constants enter (roots of the part linear in the perturbation),
then push a truncated Puiseux expansion through the full equation order by
order, checking the compatibility condition at every resonance.

Everything is exact.  Arbitrary leading coefficients are carried as the
symbol a0; series coefficients live in polynomials over the arbitrary
constants, localized at a0 (negative powers of a0 are permitted, and the
order-by-order solve only ever divides by rational multiples of a0 powers).
Equations must be autonomous; the singular position enters only through the
shifted variable and is never a stored symbol.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .expressions import DiffPoly, OdeProblem, format_poly
from .poly import (
    INDEP,
    Poly,
    deriv_order,
    rational_roots,
    rational_roots_residual,
    sturm_root_count,
)

__all__ = [
    "ARBITRARY",
    "Unresolved",
    "LeadingOrder",
    "Branch",
    "PuiseuxSeries",
    "PainleveReport",
    "dominant_exponents",
    "leading_coefficients",
    "resonances",
    "expand_series",
    "painleve_test",
]

ARBITRARY = "arbitrary"

_A0 = "a0"
_S = "s"
_P = "p"


@dataclass
class Unresolved:
    """A univariate constraint whose remaining roots are all irrational."""

    poly: Poly

    def __str__(self):
        return f"unresolved({format_poly(self.poly)})"


def _residual_poly(gen: str, coeffs) -> Poly:
    """Residual coefficients as a polynomial, integer-cleared with positive lead."""
    p = Poly((gen,), {(i,): c for i, c in enumerate(coeffs)})
    content = p.content()
    _, lead = p.leading_term()
    if lead < 0:
        content = -content
    return p * (Fraction(1) / content)


@dataclass
class LeadingOrder:
    """One candidate leading behaviour.

    `exponent` is None when a dominant group balances only at irrational
    exponents; `balance` then carries the offending polynomial in p.
    """

    exponent: Fraction | None
    terms: tuple
    balance: Poly | None = None


@dataclass
class Branch:
    """One singular pattern and everything derived from it."""

    p: Fraction | None
    a0: object  # Fraction | "arbitrary" | Unresolved
    dominant_terms: tuple = ()
    resonance_poly: Poly | None = None
    resonance_full: Poly | None = None
    resonances: list = field(default_factory=list)  # [(value, multiplicity)]
    direction: str = ""
    delta: Fraction | None = None
    verdict: str = "pending"
    reason: str | None = None
    series: "PuiseuxSeries | None" = None
    arbitrary_constants: int | None = None
    generic: bool = False

    def fail(self, reason: str):
        self.verdict = "fail"
        self.reason = reason

    def inconclusive(self, reason: str):
        self.verdict = "inconclusive"
        self.reason = reason

    def resonance_values(self):
        return [s for s, _ in self.resonances]


@dataclass
class PuiseuxSeries:
    """Truncated expansion sum_i coeff_i * chi^(p + i*step)."""

    leading_exponent: Fraction
    step: Fraction
    coefficients: list  # Poly over the arbitrary-constant symbols
    truncation: int


@dataclass
class PainleveReport:
    problem: OdeProblem
    branches: list
    overall: str
    generic_branch_found: bool


# -- term profiles -------------------------------------------------------------

def _term_profiles(eq: DiffPoly):
    """[(coefficient, {derivative order: exponent})] in canonical term order."""
    profiles = []
    for exps, coeff in eq.monomials():
        orders = {}
        for g, e in zip(eq.poly.gens, exps):
            if e == 0:
                continue
            k = deriv_order(g)
            if k is None:
                raise ValueError("autonomous equations only")
            orders[k] = e
        profiles.append((coeff, orders))
    return profiles


def _line(profile):
    """Exponent function of a term is slope*p + intercept."""
    _, orders = profile
    slope = sum(orders.values())
    intercept = -sum(k * e for k, e in orders.items())
    return slope, Fraction(intercept)


def _ff_value(p: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for i in range(k):
        out *= p - i
    return out


def _ff_poly(gen: str, shift: Fraction, k: int) -> Poly:
    """Falling-factorial product (g + shift)(g + shift - 1)...(k factors)."""
    out = Poly.one()
    g = Poly.gen(gen)
    for i in range(k):
        out = out * (g + (shift - i))
    return out


def _admissible_exponent(p: Fraction) -> bool:
    if p == 0:
        return False
    if p.denominator == 1:
        return p < 0
    return True


def _balance_in_p(profiles, indices) -> Poly:
    total = Poly.zero()
    for t in indices:
        coeff, orders = profiles[t]
        term = Poly.const(coeff)
        for k, e in orders.items():
            term = term * _ff_poly(_P, Fraction(0), k) ** e
        total = total + term
    return total


def dominant_exponents(ode: OdeProblem | DiffPoly):
    """Candidate leading exponents with their dominant term sets.

    Candidates come from pairwise crossings of the terms' exponent functions
    and from rational roots of each coincident group's balance polynomial;
    a candidate survives when its exponent value is minimal over all terms.
    Groups whose balance polynomial provably has only irrational roots in
    the group's minimality region are reported with exponent None.
    """
    eq = ode.equation if isinstance(ode, OdeProblem) else ode
    if INDEP in eq.poly.gens:
        raise ValueError("autonomous equations only")
    profiles = _term_profiles(eq)
    lines = {}
    for idx, prof in enumerate(profiles):
        lines.setdefault(_line(prof), []).append(idx)
    keys = sorted(lines)

    candidates = set()
    for i, (m1, c1) in enumerate(keys):
        for m2, c2 in keys[i + 1:]:
            if m1 != m2:
                candidates.add(Fraction(c2 - c1, m1 - m2))

    unresolved = []
    for m, c in keys:
        balance = _balance_in_p(profiles, lines[(m, c)])
        if balance.is_zero():
            continue
        if balance.is_const():
            continue
        roots, residual = rational_roots_residual(balance.univariate(_P))
        candidates.update(roots)
        if len(residual) - 1 > 0:
            lo = None
            hi = None
            empty = False
            for m2, c2 in keys:
                if (m2, c2) == (m, c):
                    continue
                if m2 == m:
                    if c2 < c:
                        empty = True
                        break
                    continue
                bound = Fraction(c2 - c, m - m2)
                if m > m2:
                    hi = bound if hi is None else min(hi, bound)
                else:
                    lo = bound if lo is None else max(lo, bound)
            if not empty and (lo is None or hi is None or lo < hi):
                if sturm_root_count(residual, lo, hi) > 0:
                    unresolved.append(
                        LeadingOrder(None, tuple(lines[(m, c)]), _residual_poly(_P, residual))
                    )

    out = []
    for p in sorted(candidates):
        if not _admissible_exponent(p):
            continue
        values = {key: key[0] * p + key[1] for key in keys}
        vmin = min(values.values())
        dominant = sorted(
            t for key, idxs in lines.items() if values[key] == vmin for t in idxs
        )
        if len(dominant) < 2 and _balance_in_p(profiles, dominant).evaluate({_P: p}) != 0:
            continue
        out.append(LeadingOrder(p, tuple(dominant)))
    return out + unresolved


def leading_coefficients(ode: OdeProblem | DiffPoly, p: Fraction, terms):
    """Leading coefficients balancing the dominant terms at exponent p.

    Returns rational values, the marker "arbitrary" when the balance
    vanishes identically, and an Unresolved tail when irrational roots
    remain after extracting every rational one.
    """
    eq = ode.equation if isinstance(ode, OdeProblem) else ode
    profiles = _term_profiles(eq)
    balance = Poly.zero()
    for t in terms:
        coeff, orders = profiles[t]
        value = coeff
        m = 0
        for k, e in orders.items():
            value *= _ff_value(p, k) ** e
            m += e
        balance = balance + Poly.monomial(value, {_A0: m})
    if balance.is_zero():
        return [ARBITRARY]
    coeffs = balance.univariate(_A0)
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
    roots, residual = rational_roots_residual(coeffs)
    outcomes = sorted(r for r in roots if r != 0)
    if len(residual) - 1 > 0:
        outcomes.append(Unresolved(_residual_poly(_A0, residual)))
    return outcomes


def _resonance_poly_full(profiles, terms, p: Fraction, a0) -> Poly:
    """Part of the dominant terms linear in the perturbation mu*chi^(p+s)."""
    total = Poly.zero()
    for t in terms:
        coeff, orders = profiles[t]
        order_list = sorted(orders)
        for k in order_list:
            e = orders[k]
            pick = Poly.const(coeff) * e * _ff_poly(_S, p, k)
            base = a0 * _ff_value(p, k)
            pick = pick * base ** (e - 1)
            for k2 in order_list:
                if k2 == k:
                    continue
                pick = pick * (a0 * _ff_value(p, k2)) ** orders[k2]
            total = total + pick
    return total


def resonances(ode: OdeProblem | DiffPoly, branch: Branch):
    """Resonance polynomial and its rational roots; sets branch admissibility.

    Fails the branch on irrational resonances, a missing generic resonance
    -1, or any repeated resonance; fixes the series direction (right, left,
    or mixed) and the step size from the leading exponent's denominator.
    """
    eq = ode.equation if isinstance(ode, OdeProblem) else ode
    profiles = _term_profiles(eq)
    p = branch.p
    a0_sym = Poly.gen(_A0) if branch.a0 == ARBITRARY else Poly.const(branch.a0)
    full = _resonance_poly_full(profiles, branch.dominant_terms, p, a0_sym)
    branch.resonance_full = full

    reduced_terms = {}
    if branch.a0 == ARBITRARY:
        powers = set()
        for (key, coeff) in full.collect([_S]):
            if len(coeff.terms) != 1:
                branch.inconclusive("symbolic resonance polynomial")
                return None, []
            (exps, value), = coeff.terms.items()
            a0_power = exps[coeff.gens.index(_A0)] if _A0 in coeff.gens else 0
            powers.add(a0_power)
            reduced_terms[key] = value
        if len(powers) > 1:
            branch.inconclusive("symbolic resonance polynomial")
            return None, []
    else:
        for (key, coeff) in full.collect([_S]):
            reduced_terms[key] = coeff.const_value()
    reduced = Poly((_S,), reduced_terms)
    if reduced.is_zero():
        branch.inconclusive("degenerate resonance polynomial")
        return None, []
    content = reduced.content()
    _, lead = reduced.leading_term()
    if lead < 0:
        content = -content
    reduced = reduced * (Fraction(1) / content)
    branch.resonance_poly = reduced

    roots, residual_degree = rational_roots(reduced)
    q = p.denominator
    generic = Fraction(-1)
    others = []
    for value in sorted(roots):
        mult = roots[value]
        if value == generic:
            mult -= 1
        others.extend([value] * mult)

    if residual_degree > 0:
        branch.fail("irrational resonance")
    elif generic not in roots:
        branch.fail("missing generic resonance")
    elif any(m > 1 for m in roots.values()):
        branch.fail("repeated resonance")

    if all(s >= 0 for s in others):
        branch.direction = "right"
        branch.delta = Fraction(1, q)
    elif all(s <= 0 for s in others):
        branch.direction = "left"
        branch.delta = Fraction(-1, q)
    else:
        branch.direction = "mixed"
        if branch.verdict == "pending":
            branch.inconclusive("annulus expansion not implemented")

    ordered = [generic] if generic in roots else []
    ordered += sorted(others, reverse=(branch.direction == "left"))
    branch.resonances = [(s, roots.get(s, 0)) for s in dict.fromkeys(ordered)]

    if branch.verdict == "pending" and branch.direction in ("right", "left"):
        for s in others:
            if s == 0:
                continue
            idx = s / branch.delta
            if idx.denominator != 1 or idx <= 0:
                branch.inconclusive("resonance off series lattice")
                break
    return branch.resonance_poly, branch.resonances


# -- series evaluation ----------------------------------------------------------

def _series_derivative(series: dict) -> dict:
    return {e - 1: c * e for e, c in series.items() if e != 0}


def _series_mul(a: dict, b: dict, limit: Fraction, side: int) -> dict:
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = ea + eb
            if side > 0 and e > limit:
                continue
            if side < 0 and e < limit:
                continue
            prev = out.get(e)
            cur = ca * cb if prev is None else prev + ca * cb
            if cur.is_zero():
                out.pop(e, None)
            else:
                out[e] = cur
    return out


def _eval_on_series(profiles, series: dict, p: Fraction, bound: Fraction, side: int) -> dict:
    derivs = {0: series}

    def deriv(k):
        if k not in derivs:
            derivs[k] = _series_derivative(deriv(k - 1))
        return derivs[k]

    total = {}
    for coeff, orders in profiles:
        slots = []
        for k in sorted(orders):
            slots.extend([k] * orders[k])
        # lowest (right) / highest (left) reachable exponent of each factor is p - k
        suffix = [Fraction(0)] * (len(slots) + 1)
        for i in range(len(slots) - 1, -1, -1):
            suffix[i] = suffix[i + 1] + (p - slots[i])
        cur = {Fraction(0): Poly.const(coeff)}
        for i, k in enumerate(slots):
            cur = _series_mul(cur, deriv(k), bound - suffix[i + 1], side)
        for e, c in cur.items():
            prev = total.get(e)
            acc = c if prev is None else prev + c
            if acc.is_zero():
                total.pop(e, None)
            else:
                total[e] = acc
    return total


def expand_series(ode: OdeProblem | DiffPoly, branch: Branch, orders: int | None = None):
    """Push the expansion through the full equation, order by order.

    Non-resonance coefficients are solved from the single linear equation at
    their level (the divisor is the resonance polynomial value there, a
    rational multiple of an a0 power); resonance levels require the forcing
    term to vanish identically and introduce a fresh arbitrary symbol.
    """
    eq = ode.equation if isinstance(ode, OdeProblem) else ode
    if branch.verdict != "pending" or branch.direction not in ("right", "left"):
        raise ValueError("series expansion requires an admissible right or left branch")
    profiles = _term_profiles(eq)
    p = branch.p
    delta = branch.delta
    q = p.denominator
    side = 1 if delta > 0 else -1
    res_values = branch.resonance_values()
    if orders is None:
        max_steps = max(abs(s) * q for s in res_values)
        orders = int(max_steps) + 5
    m0, c0 = _line(profiles[branch.dominant_terms[0]])
    v0 = m0 * p + c0

    arbitrary = []
    if branch.a0 == ARBITRARY:
        coefficients = [Poly.gen(_A0)]
        arbitrary.append(_A0)
    else:
        coefficients = [Poly.const(branch.a0)]

    res_at = {}
    for s in res_values:
        if s == 0:
            continue
        idx = s / delta
        if idx.denominator == 1 and idx > 0:
            res_at[int(idx)] = s

    for j in range(1, orders + 1):
        target = v0 + j * delta
        series = {
            p + i * delta: c
            for i, c in enumerate(coefficients)
            if not c.is_zero()
        }
        residual = _eval_on_series(profiles, series, p, target, side)
        for e in sorted(residual, reverse=(side < 0)):
            if (side > 0 and e < target) or (side < 0 and e > target):
                branch.fail(f"series inconsistency at exponent {e}")
                return None
        forcing = residual.get(target, Poly.zero())
        if j in res_at:
            if not forcing.is_zero():
                branch.fail(f"resonance condition violated at s = {res_at[j]}")
                return None
            name = f"a{j}"
            coefficients.append(Poly.gen(name))
            arbitrary.append(name)
            continue
        divisor = branch.resonance_full.subs_rational({_S: j * delta})
        if divisor.is_zero():
            raise AssertionError("zero divisor at a non-resonance order")
        if divisor.is_const():
            coefficients.append(forcing * (Fraction(-1) / divisor.const_value()))
        else:
            if len(divisor.terms) != 1:
                branch.inconclusive("division by a symbolic expression required")
                return None
            (exps, value), = divisor.terms.items()
            powers = {g: e for g, e in zip(divisor.gens, exps)}
            coefficients.append(-forcing.div_term(value, powers))

    branch.series = PuiseuxSeries(p, delta, coefficients, orders)
    weak = p.denominator != 1 or any(s.denominator != 1 for s in res_values)
    branch.verdict = "weak-pass" if weak else "pass"
    count = len(arbitrary) + (1 if branch.direction == "right" else 0)
    branch.arbitrary_constants = count
    branch.generic = count == eq.order
    return branch.series


def _branch_sort_key(branch: Branch):
    if branch.p is None:
        return (1, Fraction(0), 2, Fraction(0))
    if isinstance(branch.a0, Fraction):
        return (0, branch.p, 0, branch.a0)
    if branch.a0 == ARBITRARY:
        return (0, branch.p, 1, Fraction(0))
    return (0, branch.p, 2, Fraction(0))


def painleve_test(
    ode: OdeProblem | DiffPoly,
    orders: int | None = None,
    lenient: bool = False,
) -> PainleveReport:
    """Run the full singularity pipeline over every branch.

    The default verdict is strict: every branch must pass, and a generic
    branch (arbitrary-constant count, counting the singular position,
    equal to the equation order) must exist.  The lenient flag accepts a
    single generic passing branch.
    """
    problem = ode if isinstance(ode, OdeProblem) else OdeProblem(ode)
    eq = problem.equation
    leading = dominant_exponents(eq)
    branches = []
    for lo in leading:
        if lo.exponent is None:
            b = Branch(None, Unresolved(lo.balance), lo.terms, direction="none")
            b.fail("unresolved leading coefficient")
            branches.append(b)
            continue
        for outcome in leading_coefficients(eq, lo.exponent, lo.terms):
            b = Branch(lo.exponent, outcome, lo.terms)
            if isinstance(outcome, Unresolved):
                b.direction = "none"
                b.fail("unresolved leading coefficient")
                branches.append(b)
                continue
            resonances(eq, b)
            if b.verdict == "pending" and b.direction in ("right", "left"):
                expand_series(eq, b, orders)
            branches.append(b)
    branches.sort(key=_branch_sort_key)

    generic_found = any(b.generic for b in branches)
    if not branches:
        overall = "no-branches"
    elif all(b.verdict in ("pass", "weak-pass") for b in branches) and generic_found:
        overall = "weak" if any(b.verdict == "weak-pass" for b in branches) else "passes"
    else:
        overall = "fails"
    if lenient and overall == "fails":
        if any(b.generic and b.verdict == "pass" for b in branches):
            overall = "passes"
        elif any(b.generic and b.verdict == "weak-pass" for b in branches):
            overall = "weak"
    return PainleveReport(problem, branches, overall, generic_found)
