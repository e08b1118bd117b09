"""Determining equations for point symmetries under a polynomial ansatz.

The ansatz takes xi and eta as polynomials in (x, y) with every variable
raised to degree at most d (so 2*(d+1)^2 unknown coefficients).  The
prolonged action on the equation, reduced on-shell and cleared of
denominators, is linear and homogeneous in the unknowns; splitting by
monomials in (x, y, y', ..., y^(n-1)) gives one exact matrix row per
monomial, and the right nullspace is exactly the solution set within the
ansatz.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

from .expressions import OdeProblem
from .lie import VectorField, is_symmetry, normalize_field, reduce_on_shell, _prolong_coeffs
from .linalg import ExactMatrix, nullspace
from .poly import INDEP, Poly, deriv_gen, grlex_key

__all__ = [
    "Ansatz",
    "DeterminingSystem",
    "SymmetryBasis",
    "default_degree",
    "determining_system",
    "solve_point_symmetries",
]

DEGREE_ENV = "ODEKIT_DEGREE"
_Y = deriv_gen(0)


def default_degree() -> int:
    value = os.environ.get(DEGREE_ENV)
    if value is None:
        return 5
    try:
        degree = int(value)
    except ValueError as exc:
        raise ValueError(f"{DEGREE_ENV} must be an integer, got {value!r}") from exc
    if degree < 0:
        raise ValueError(f"{DEGREE_ENV} must be nonnegative")
    return degree


@dataclass
class Ansatz:
    """Unknown coefficient layout for xi and eta, degree <= d in each variable."""

    degree: int
    unknowns: list  # ordered unknown symbol names, xi block then eta block

    @staticmethod
    def of_degree(d: int) -> "Ansatz":
        names = []
        for comp in ("xi", "eta"):
            for i in range(d + 1):
                for j in range(d + 1):
                    names.append(f"{comp}_{i}_{j}")
        return Ansatz(d, names)

    def component_polys(self):
        d = self.degree
        xi = Poly.zero()
        eta = Poly.zero()
        for i in range(d + 1):
            for j in range(d + 1):
                xi = xi + Poly.monomial(1, {INDEP: i, _Y: j, f"xi_{i}_{j}": 1})
                eta = eta + Poly.monomial(1, {INDEP: i, _Y: j, f"eta_{i}_{j}": 1})
        return xi, eta

    def field_from_vector(self, vec) -> VectorField:
        d = self.degree
        xi_terms = {}
        eta_terms = {}
        idx = 0
        for target in (xi_terms, eta_terms):
            for i in range(d + 1):
                for j in range(d + 1):
                    c = vec[idx]
                    idx += 1
                    if c:
                        target[(i, j)] = Fraction(c)
        gens = (INDEP, _Y)
        return VectorField(Poly(gens, xi_terms), Poly(gens, eta_terms))


@dataclass
class DeterminingSystem:
    """Linear system whose nullspace is the symmetry solution set in the ansatz."""

    matrix: ExactMatrix
    row_monomials: list
    ansatz: Ansatz
    problem: OdeProblem


def determining_system(ode: OdeProblem, degree: int) -> DeterminingSystem:
    eq = ode.equation
    if not eq.quasi_linear:
        raise ValueError("cannot solve for highest derivative")
    ansatz = Ansatz.of_degree(degree)
    xi, eta = ansatz.component_polys()
    n = eq.order
    f = eq.poly
    coeffs = _prolong_coeffs(xi, eta, n)
    applied = xi * f.diff(INDEP) + eta * f.diff(_Y)
    for k in range(1, n + 1):
        applied = applied + coeffs[k - 1] * f.diff(deriv_gen(k))
    residual = reduce_on_shell(applied, eq)

    var_gens = [INDEP] + [deriv_gen(k) for k in range(n)]
    unknown_pos = {name: i for i, name in enumerate(ansatz.unknowns)}
    rows = []
    row_monomials = []
    for mono, coeff in residual.collect(var_gens):
        row = [Fraction(0)] * len(ansatz.unknowns)
        for exps, value in coeff.terms.items():
            live = [(g, e) for g, e in zip(coeff.gens, exps) if e]
            if len(live) != 1 or live[0][1] != 1 or live[0][0] not in unknown_pos:
                raise AssertionError("determining system is not linear in the unknowns")
            row[unknown_pos[live[0][0]]] = value
        rows.append(row)
        row_monomials.append(mono)
    order = sorted(range(len(rows)), key=lambda i: grlex_key(row_monomials[i]))
    rows = [rows[i] for i in order]
    row_monomials = [row_monomials[i] for i in order]
    return DeterminingSystem(ExactMatrix(rows), row_monomials, ansatz, ode)


@dataclass
class SymmetryBasis:
    """Verified, normalized basis of point symmetries found within an ansatz."""

    fields: list
    ansatz: Ansatz
    problem: OdeProblem

    @property
    def dimension(self) -> int:
        return len(self.fields)


def _field_sort_key(g: VectorField):
    def comp_key(p: Poly):
        return tuple(
            (sum(e), tuple((name, k) for name, k in zip(p.gens, e) if k), c)
            for e, c in p.sorted_terms()
        )

    return (comp_key(g.xi), comp_key(g.eta))


def solve_point_symmetries(ode: OdeProblem, degree: int | None = None) -> SymmetryBasis:
    if degree is None:
        degree = default_degree()
    system = determining_system(ode, degree)
    count = len(system.ansatz.unknowns)
    if system.matrix.nrows == 0:
        vectors = [
            [Fraction(1) if i == j else Fraction(0) for i in range(count)]
            for j in range(count)
        ]
    else:
        vectors = nullspace(system.matrix)
    basis = []
    for vec in vectors:
        g = system.ansatz.field_from_vector(vec)
        holds, residual = is_symmetry(g, ode)
        if not holds:
            raise RuntimeError(
                "solver produced a field with nonzero symmetry residual: "
                + g.format(dep=ode.dep, indep=ode.indep)
            )
        basis.append(normalize_field(g))
    basis.sort(key=_field_sort_key)
    return SymmetryBasis(basis, system.ansatz, ode)
