"""Vector fields, prolongation, symmetry verification, brackets, classification.

A point generator acts as xi*d/dx + eta*d/dy with polynomial coefficients in
the plane variables.  Prolongation coefficients are produced by the total
derivative recursion; when self-checking is enabled (the default outside -O
runs) each prolongation is recomputed through the closed binomial sum and the
two must agree exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd

from .expressions import DiffPoly, OdeProblem, format_poly
from .linalg import rank, solve
from .poly import INDEP, Poly, deriv_gen, deriv_order, poly_substitute

__all__ = [
    "VectorField",
    "ExtendedField",
    "StructureTable",
    "total_derivative",
    "prolong",
    "is_symmetry",
    "reduce_on_shell",
    "check_contact_condition",
    "lie_bracket",
    "structure_constants",
    "classify_pair",
    "span_contains",
    "fields_rank",
    "normalize_field",
]

SELF_CHECK = __debug__

_Y = deriv_gen(0)


@dataclass(eq=True)
class VectorField:
    """Point generator xi*d/dx + eta*d/dy; coefficients polynomial in (x, y)."""

    xi: Poly
    eta: Poly

    def __post_init__(self):
        for comp in (self.xi, self.eta):
            for g in comp.gens:
                if g != INDEP and deriv_order(g) != 0:
                    raise ValueError(
                        "vector field components must be polynomials in the plane variables"
                    )

    def is_zero(self) -> bool:
        return self.xi.is_zero() and self.eta.is_zero()

    def apply(self, f: Poly) -> Poly:
        return self.xi * f.diff(INDEP) + self.eta * f.diff(_Y)

    def scaled(self, c) -> "VectorField":
        return VectorField(self.xi * c, self.eta * c)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.xi + other.xi, self.eta + other.eta)

    def format(self, dep: str = "y", indep: str = "x") -> str:
        return (
            format_poly(self.xi, dep=dep, indep=indep)
            + ","
            + format_poly(self.eta, dep=dep, indep=indep)
        )

    def __repr__(self):
        return f"VectorField({self.format()})"


@dataclass
class ExtendedField:
    """A generator together with its prolongation coefficients up to some order."""

    base: VectorField
    coefficients: list  # [eta^[1], ..., eta^[n]]

    @property
    def order(self) -> int:
        return len(self.coefficients)


def total_derivative(f: Poly, max_order: int | None = None) -> Poly:
    """d/dx along solutions: df/dx + sum_k y^(k+1) * df/dy^(k)."""
    if max_order is not None:
        top = f.max_deriv_order()
        if top is not None and top >= max_order:
            raise ValueError("input involves derivatives of order >= max_order")
    out = f.diff(INDEP)
    for g in f.gens:
        k = deriv_order(g)
        if k is None:
            continue
        out = out + Poly.gen(deriv_gen(k + 1)) * f.diff(g)
    return out


def _prolong_coeffs(xi: Poly, eta: Poly, n: int) -> list:
    dxi = total_derivative(xi)
    coeffs = []
    prev = eta
    for k in range(1, n + 1):
        prev = total_derivative(prev) - Poly.gen(deriv_gen(k)) * dxi
        coeffs.append(prev)
    return coeffs


def _prolong_binomial(xi: Poly, eta: Poly, n: int) -> list:
    d_eta = [eta]
    d_xi = [xi]
    for _ in range(n):
        d_eta.append(total_derivative(d_eta[-1]))
        d_xi.append(total_derivative(d_xi[-1]))
    out = []
    for k in range(1, n + 1):
        acc = d_eta[k]
        for i in range(k):
            acc = acc - comb(k, i + 1) * Poly.gen(deriv_gen(k - i)) * d_xi[i + 1]
        out.append(acc)
    return out


def prolong(g: VectorField, n: int, check: bool | None = None) -> ExtendedField:
    """Extend a generator to act on derivatives up to order n (n >= 1)."""
    if n < 1:
        raise ValueError("prolongation order must be >= 1")
    coeffs = _prolong_coeffs(g.xi, g.eta, n)
    if check is None:
        check = SELF_CHECK
    if check:
        alt = _prolong_binomial(g.xi, g.eta, n)
        if coeffs != alt:
            raise AssertionError("prolongation recursion and binomial form disagree")
    return ExtendedField(g, coeffs)


def reduce_on_shell(expr: Poly, eq: DiffPoly) -> Poly:
    """Substitute the top derivative (and induced higher ones) and clear denominators.

    Returns the numerator polynomial in derivatives of order < eq.order; it
    vanishes exactly when the input vanishes on solutions.
    """
    n = eq.order
    num, den = eq.solved_top()
    n_cache = {0: num}
    d_den = None
    while True:
        m = expr.max_deriv_order()
        if m is None or m < n:
            return expr
        j = m - n
        while j not in n_cache:
            k = max(n_cache)
            if d_den is None:
                d_den = total_derivative(den)
            n_cache[k + 1] = total_derivative(n_cache[k]) * den - (k + 1) * n_cache[k] * d_den
        expr, _ = poly_substitute(expr, {deriv_gen(m): (n_cache[j], den ** (j + 1))})


def symmetry_condition(xi: Poly, eta: Poly, eq: DiffPoly) -> Poly:
    """Prolonged action of the generator on the equation, reduced on-shell."""
    if not eq.quasi_linear:
        raise ValueError("cannot solve for highest derivative")
    n = eq.order
    coeffs = _prolong_coeffs(xi, eta, n)
    f = eq.poly
    applied = xi * f.diff(INDEP) + eta * f.diff(_Y)
    for k in range(1, n + 1):
        applied = applied + coeffs[k - 1] * f.diff(deriv_gen(k))
    return reduce_on_shell(applied, eq)


def is_symmetry(g: VectorField, ode: OdeProblem | DiffPoly):
    """(holds, residual): residual is the on-shell, denominator-cleared action."""
    eq = ode.equation if isinstance(ode, OdeProblem) else ode
    residual = symmetry_condition(g.xi, g.eta, eq)
    return residual.is_zero(), residual


def check_contact_condition(xi: Poly, eta: Poly) -> bool:
    """First-derivative dependence is admissible iff d(eta)/dy' = y' * d(xi)/dy'."""
    for comp in (xi, eta):
        top = comp.max_deriv_order()
        if top is not None and top > 1:
            raise ValueError("contact condition applies to first-order coefficients only")
    y1 = deriv_gen(1)
    return eta.diff(y1) == Poly.gen(y1) * xi.diff(y1)


def lie_bracket(g1: VectorField, g2: VectorField) -> VectorField:
    return VectorField(
        g1.apply(g2.xi) - g2.apply(g1.xi),
        g1.apply(g2.eta) - g2.apply(g1.eta),
    )


# -- coefficient-vector machinery ----------------------------------------------

def _field_monomials(fields):
    keys = set()
    for g in fields:
        for comp_idx, comp in ((0, g.xi), (1, g.eta)):
            for e in comp.terms:
                mono = tuple((name, k) for name, k in zip(comp.gens, e) if k)
                keys.add((comp_idx, mono))
    return sorted(keys)


def _field_vector(g: VectorField, keys):
    lookup = {}
    for comp_idx, comp in ((0, g.xi), (1, g.eta)):
        for e, c in comp.terms.items():
            mono = tuple((name, k) for name, k in zip(comp.gens, e) if k)
            lookup[(comp_idx, mono)] = c
    return [lookup.get(k, Fraction(0)) for k in keys]


def fields_rank(fields) -> int:
    keys = _field_monomials(fields)
    if not keys:
        return 0
    cols = [_field_vector(g, keys) for g in fields]
    return rank([[cols[j][i] for j in range(len(cols))] for i in range(len(keys))])


def span_contains(fields, g: VectorField) -> bool:
    """Exact rank test for membership of g in the rational span of fields."""
    if g.is_zero():
        return True
    all_fields = list(fields) + [g]
    keys = _field_monomials(all_fields)
    cols = [_field_vector(f, keys) for f in fields]
    target = _field_vector(g, keys)
    matrix = [[cols[j][i] for j in range(len(cols))] for i in range(len(keys))]
    with_target = [row + [t] for row, t in zip(matrix, target)]
    return rank(matrix) == rank(with_target)


def normalize_field(g: VectorField) -> VectorField:
    """Integer-clear both components jointly, content 1, leading coefficient +1.

    The leading coefficient is the graded-lex largest monomial of xi, or of
    eta when xi vanishes.
    """
    coeffs = list(g.xi.terms.values()) + list(g.eta.terms.values())
    if not coeffs:
        return g
    num = 0
    den = 1
    for c in coeffs:
        num = gcd(num, c.numerator)
        den = den * c.denominator // gcd(den, c.denominator)
    scale = Fraction(den, num)
    lead_comp = g.xi if not g.xi.is_zero() else g.eta
    _, lead_coeff = lead_comp.leading_term()
    if lead_coeff * scale < 0:
        scale = -scale
    return g.scaled(scale)


@dataclass
class StructureTable:
    """Bracket expansion coefficients over a basis: [G_i, G_j] = sum_k c[i][j][k] G_k."""

    basis: list
    constants: list  # constants[i][j][k] -> Fraction

    def check_jacobi(self) -> bool:
        m = len(self.basis)
        c = self.constants
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    for l in range(m):
                        total = sum(
                            c[i][j][t] * c[t][k][l]
                            + c[j][k][t] * c[t][i][l]
                            + c[k][i][t] * c[t][j][l]
                            for t in range(m)
                        )
                        if total != 0:
                            return False
        return True


def structure_constants(basis) -> StructureTable:
    """Expand every bracket over the basis by exact linear solves."""
    basis = list(basis)
    m = len(basis)
    if fields_rank(basis) < m:
        raise ValueError("dependent basis")
    keys = _field_monomials(basis)
    cols = [_field_vector(g, keys) for g in basis]
    matrix = [[cols[j][i] for j in range(m)] for i in range(len(keys))]
    constants = [[[Fraction(0)] * m for _ in range(m)] for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            b = lie_bracket(basis[i], basis[j])
            bkeys = _field_monomials([b])
            if not set(bkeys) <= set(keys):
                raise ValueError(f"not closed under bracket: [G{i + 1}, G{j + 1}]")
            target = _field_vector(b, keys)
            sol = solve(matrix, target)
            if sol is None:
                raise ValueError(f"not closed under bracket: [G{i + 1}, G{j + 1}]")
            for k in range(m):
                constants[i][j][k] = sol[k]
                constants[j][i][k] = -sol[k]
    table = StructureTable(basis, constants)
    if not table.check_jacobi():
        raise AssertionError("Jacobi identity violated in structure constants")
    return table


def classify_pair(g1: VectorField, g2: VectorField):
    """Two-dimensional algebra type (I-IV) plus the normalized pair.

    Commuting pairs split on whether the coefficient determinant
    xi1*eta2 - xi2*eta1 vanishes identically (type II) or not (type I);
    non-commuting pairs are re-expressed so [G1, G2] = G1 and split the
    same way into types III and IV.
    """
    if fields_rank([g1, g2]) < 2:
        raise ValueError("pair does not span a two-dimensional algebra")
    w = g1.xi * g2.eta - g2.xi * g1.eta
    b = lie_bracket(g1, g2)
    if b.is_zero():
        return ("I" if not w.is_zero() else "II"), (g1, g2)
    keys = _field_monomials([g1, g2, b])
    cols = [_field_vector(g, keys) for g in (g1, g2)]
    matrix = [[cols[j][i] for j in range(2)] for i in range(len(keys))]
    sol = solve(matrix, _field_vector(b, keys))
    if sol is None:
        raise ValueError("pair does not span a two-dimensional algebra")
    alpha, beta = sol
    if alpha != 0:
        new_g2 = g2.scaled(Fraction(1) / alpha)
    else:
        new_g2 = g1.scaled(Fraction(-1) / beta)
    new_g1 = normalize_field(b)
    # rescaling [G1, G2] = G1 is scale-free in G1, so normalization keeps it exact
    return ("III" if not w.is_zero() else "IV"), (new_g1, new_g2)
