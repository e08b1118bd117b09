import random
from fractions import Fraction

import pytest

from odekit.poly import (
    Poly,
    poly_substitute,
    rational_roots,
    rational_roots_residual,
    sturm_root_count,
)

GENS = ["x", "y", "y'", "a1", "a2"]


def random_poly(rng, gens=GENS, max_terms=5, max_exp=3, max_coeff=9):
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        key = tuple(rng.randint(0, max_exp) for _ in gens)
        num = rng.randint(-max_coeff, max_coeff)
        den = rng.randint(1, 4)
        if num == 0:
            continue
        terms[key] = terms.get(key, 0) + Fraction(num, den)
    return Poly(tuple(gens), {k: v for k, v in terms.items() if v != 0})


def test_ring_axioms_randomized():
    rng = random.Random(20240811)
    for _ in range(200):
        p = random_poly(rng)
        q = random_poly(rng)
        r = random_poly(rng)
        assert (p + q) - q == p
        assert p * q == q * p
        assert p * (q + r) == p * q + p * r
        assert (p * q) * r == p * (q * r)


def test_identity_substitution_randomized():
    rng = random.Random(7)
    one = Poly.one()
    for _ in range(200):
        p = random_poly(rng)
        bindings = {g: (Poly.gen(g), one) for g in p.gens}
        result, book = poly_substitute(p, bindings)
        assert result == p
        assert all(power >= 0 for _, power in book.values())


def test_substitute_identity_binding_example():
    p = Poly.gen("y") ** 2
    result, _ = poly_substitute(p, {"y": (Poly.one(), Poly.one())})
    assert result == Poly.one()


def test_substitute_second_order_example():
    # y'' bound to the solved Painleve-Ince top derivative
    y = Poly.gen("y")
    y1 = Poly.gen("y'")
    num = -3 * y * y1 - y ** 3
    p = Poly.gen("y''")
    result, book = poly_substitute(p, {"y''": (num, Poly.one())})
    assert result == num
    assert book["y''"][1] == 1


def test_substitute_third_order_example():
    y1 = Poly.gen("y'")
    y2 = Poly.gen("y''")
    p = Poly.gen("y'''")
    num = 3 * y2 ** 2
    den = 2 * y1
    result, book = poly_substitute(p, {"y'''": (num, den)})
    assert result == num
    assert book["y'''"] == (den, 1)


def test_substitute_zero_denominator_rejected():
    with pytest.raises(ZeroDivisionError, match="division by zero polynomial"):
        poly_substitute(Poly.gen("y"), {"y": (Poly.one(), Poly.zero())})


def test_substitute_clears_mixed_powers():
    # (y'')^2 + y'' with y'' -> a/b must give (a^2 + a*b) / b^2
    a = Poly.gen("y") + 1
    b = Poly.gen("y'") + 2
    p = Poly.gen("y''") ** 2 + Poly.gen("y''")
    result, book = poly_substitute(p, {"y''": (a, b)})
    assert result == a ** 2 + a * b
    assert book["y''"] == (b, 2)


# -- rational roots ------------------------------------------------------------

def coeffs(*values):
    return [Fraction(v) for v in values]


def test_rational_roots_examples():
    # s^2 - 1
    roots, residual = rational_roots(coeffs(-1, 0, 1))
    assert roots == {Fraction(-1): 1, Fraction(1): 1} and residual == 0
    # s^2 + s
    roots, residual = rational_roots(coeffs(0, 1, 1))
    assert roots == {Fraction(0): 1, Fraction(-1): 1} and residual == 0
    # s^2 + 1
    roots, residual = rational_roots(coeffs(1, 0, 1))
    assert roots == {} and residual == 2


def test_rational_roots_zero_rejected():
    with pytest.raises(ValueError, match="identically zero"):
        rational_roots([Fraction(0)])


def test_rational_roots_fractional_and_multiplicity():
    # (2s - 1)^2 (s + 3) (s^2 + 2)
    poly = [Fraction(1)]

    def mul(p, q):
        out = [Fraction(0)] * (len(p) + len(q) - 1)
        for i, a in enumerate(p):
            for j, b in enumerate(q):
                out[i + j] += a * b
        return out

    poly = mul(poly, [Fraction(-1), Fraction(2)])
    poly = mul(poly, [Fraction(-1), Fraction(2)])
    poly = mul(poly, [Fraction(3), Fraction(1)])
    poly = mul(poly, [Fraction(2), Fraction(0), Fraction(1)])
    roots, residual = rational_roots(poly)
    assert roots == {Fraction(1, 2): 2, Fraction(-3): 1}
    assert residual == 2


def test_rational_roots_invariants_randomized():
    rng = random.Random(99)
    for _ in range(200):
        # build a polynomial from known rational roots times an irreducible factor
        known = [
            Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(rng.randint(0, 3))
        ]
        poly = [Fraction(rng.randint(1, 5))]

        def mul(p, q):
            out = [Fraction(0)] * (len(p) + len(q) - 1)
            for i, a in enumerate(p):
                for j, b in enumerate(q):
                    out[i + j] += a * b
            return out

        for r in known:
            poly = mul(poly, [-r, Fraction(1)])
        if rng.random() < 0.5:
            poly = mul(poly, [Fraction(1), Fraction(0), Fraction(1)])  # s^2 + 1
        roots, residual = rational_roots(poly)
        degree = len(poly) - 1
        assert sum(roots.values()) + residual == degree
        for root in roots:
            value = sum(c * root ** i for i, c in enumerate(poly))
            assert value == 0
        for r in set(known):
            assert roots.get(r, 0) == known.count(r)


def test_rational_roots_residual_coefficients():
    roots, residual = rational_roots_residual(coeffs(2, 0, 1))  # s^2 + 2
    assert roots == {}
    assert residual == coeffs(2, 0, 1)


def test_sturm_root_count():
    # p^2 + 2p - 1 has roots -1 +- sqrt(2): one in (-inf, 2), both in (-inf, inf)
    assert sturm_root_count(coeffs(-1, 2, 1), None, Fraction(2)) == 2
    assert sturm_root_count(coeffs(-1, 2, 1), None, None) == 2
    assert sturm_root_count(coeffs(-1, 2, 1), Fraction(0), Fraction(1)) == 1
    assert sturm_root_count(coeffs(1, 0, 1), None, None) == 0  # s^2 + 1
    assert sturm_root_count(coeffs(2, 0, -1), Fraction(-1), Fraction(1)) == 0  # roots +-sqrt(2)


def test_collect_and_leading_term():
    p = Poly.gen("x") * Poly.gen("y") + 2 * Poly.gen("y") ** 3
    groups = dict(p.collect(["x"]))
    assert groups[(1,)] == Poly.gen("y")
    assert groups[(0,)] == 2 * Poly.gen("y") ** 3
    exps, coeff = p.leading_term()
    assert coeff == 2


def test_negative_exponent_division():
    p = Poly.monomial(Fraction(5, 6), {"a2": 2})
    q = p.div_term(Fraction(1), {"a0": 1})
    assert q.degree("a0") == -1
    assert q * Poly.gen("a0") == p
