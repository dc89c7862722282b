"""Invariants of ternary cubics: Aronhold S (degree 4), T (degree 6), discriminant.

S and T are obtained as the one-dimensional spaces of degree-4 and degree-6
polynomials in the ten coefficients that have torus weight zero and are
annihilated by the six root operators ``x_a d/dx_b`` of sl(3).  They are
normalized to primitive integer form with a positive coefficient on their
grlex-leading monomial.  The discriminant is ``T^2 + lam * S^3`` with ``lam``
fixed by vanishing on a nodal cubic, then scaled so that its restriction to
the seven-coefficient family has coefficient 16 on ``c1^5 c4^2 c5^2 c6^3``.

Coefficients are monomial coefficients: ``f = sum c_ijk x^i y^j z^k``.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .linalg import nullspace_exact
from .poly import MultiPoly

CUBIC_EXPONENTS = tuple(e for e in itertools.product(range(4), repeat=3) if sum(e) == 3)
CUBIC_EXPONENTS = tuple(sorted(CUBIC_EXPONENTS, reverse=True))
CUBIC_VARS = tuple("c" + "".join(map(str, e)) for e in CUBIC_EXPONENTS)

# the seven-coefficient family c1 x^2y + c2 x^2z + c3 xy^2 + c4 xz^2 + c5 y^2z + c6 yz^2 + c7 xyz
FAMILY_EXPONENTS = ((2, 1, 0), (2, 0, 1), (1, 2, 0), (1, 0, 2), (0, 2, 1), (0, 1, 2), (1, 1, 1))
FAMILY_VARS = tuple(f"c{i}" for i in range(1, 8))

_EXP_INDEX = {e: i for i, e in enumerate(CUBIC_EXPONENTS)}


def _weight(mono) -> tuple[int, int, int]:
    w = [0, 0, 0]
    for k, d in enumerate(mono):
        if d:
            for a in range(3):
                w[a] += d * CUBIC_EXPONENTS[k][a]
    return tuple(w)


def _root_operator(a: int, b: int) -> list[MultiPoly]:
    """Image coefficients of ``x_a d/dx_b f`` as linear forms in the c's."""
    cs = MultiPoly.gens(CUBIC_VARS)
    out = [MultiPoly.zero(CUBIC_VARS) for _ in CUBIC_EXPONENTS]
    for k, e in enumerate(CUBIC_EXPONENTS):
        if e[b] == 0:
            continue
        ne = list(e)
        ne[b] -= 1
        ne[a] += 1
        out[_EXP_INDEX[tuple(ne)]] = out[_EXP_INDEX[tuple(ne)]] + cs[k] * e[b]
    return out


def _invariant_of_degree(d: int) -> MultiPoly:
    monos = _weight_zero_monomials(d)
    basis = [MultiPoly(CUBIC_VARS, {m: 1}) for m in monos]
    rows_by_key: dict = {}
    for a, b in itertools.permutations(range(3), 2):
        op = _root_operator(a, b)
        images = []
        for p in basis:
            img = MultiPoly.zero(CUBIC_VARS)
            for k, v in enumerate(CUBIC_VARS):
                if p.degree(v) > 0:
                    img = img + p.diff(v) * op[k]
            images.append(img)
        for col, img in enumerate(images):
            for e, c in img.terms.items():
                rows_by_key.setdefault((a, b, e), {})[col] = c
    rows = [[r.get(col, 0) for col in range(len(basis))] for r in rows_by_key.values()]
    ker = nullspace_exact(rows, len(basis))
    if len(ker) != 1:
        raise ArithmeticError(f"expected a unique invariant of degree {d}, found {len(ker)}")
    inv = MultiPoly(CUBIC_VARS, {m: c for m, c in zip(monos, ker[0]) if c})
    return inv.primitive()


def _weight_zero_monomials(d: int) -> list[tuple[int, ...]]:
    out = []

    def rec(k, left, acc, w):
        if k == len(CUBIC_VARS):
            if left == 0 and w == (d, d, d):
                out.append(tuple(acc))
            return
        e = CUBIC_EXPONENTS[k]
        for m in range(left + 1):
            nw = (w[0] + m * e[0], w[1] + m * e[1], w[2] + m * e[2])
            if max(nw) > d:
                break
            acc.append(m)
            rec(k + 1, left - m, acc, nw)
            acc.pop()

    rec(0, d, [], (0, 0, 0))
    return out


@lru_cache(maxsize=None)
def aronhold_S() -> MultiPoly:
    return _invariant_of_degree(4)


@lru_cache(maxsize=None)
def invariant_T() -> MultiPoly:
    return _invariant_of_degree(6)


def cubic_coefficients(f: MultiPoly, names=("x", "y", "z")) -> dict:
    """Assignment ``{c_ijk: coefficient}`` of a ternary cubic in x, y, z."""
    idx = [f.vars.index(v) for v in names]
    out = {v: 0 for v in CUBIC_VARS}
    for e, c in f.terms.items():
        key = tuple(e[i] for i in idx)
        if sum(key) != 3 or sum(e) != 3:
            raise ValueError("not a ternary cubic form")
        out["c" + "".join(map(str, key))] = c
    return out


def _nodal_example() -> dict:
    # y^2 z - x^3 - x^2 z, node at (0:0:1)
    v = {name: 0 for name in CUBIC_VARS}
    v["c021"] = 1
    v["c300"] = -1
    v["c201"] = -1
    return v


@lru_cache(maxsize=None)
def _disc_lambda() -> Fraction:
    S, T = aronhold_S(), invariant_T()
    node = _nodal_example()
    s, t = Fraction(S.eval(node)), Fraction(T.eval(node))
    if s == 0:
        raise ArithmeticError("calibration cubic has vanishing S")
    return -t * t / s**3


def family_substitution(variables=FAMILY_VARS) -> dict:
    """Map general cubic coefficients to the seven-coefficient family."""
    gens = dict(zip(FAMILY_VARS, MultiPoly.gens(variables)))
    sub = {name: 0 for name in CUBIC_VARS}
    for fv, e in zip(FAMILY_VARS, FAMILY_EXPONENTS):
        sub["c" + "".join(map(str, e))] = gens[fv]
    return sub


@lru_cache(maxsize=None)
def _disc_unscaled() -> MultiPoly:
    S, T = aronhold_S(), invariant_T()
    return T * T + S * S * S * _disc_lambda()


LEADING_MONOMIAL = (5, 0, 0, 2, 2, 3, 0)  # c1^5 c4^2 c5^2 c6^3


@lru_cache(maxsize=None)
def _disc_scale() -> Fraction:
    restricted = _disc_unscaled().subs(family_substitution(), FAMILY_VARS)
    lead = restricted.terms.get(LEADING_MONOMIAL)
    if not lead:
        raise ArithmeticError("restricted discriminant lacks the calibration monomial")
    return Fraction(16) / lead


@lru_cache(maxsize=None)
def discriminant() -> MultiPoly:
    """Discriminant of the general ternary cubic (ten coefficients)."""
    return _disc_unscaled().scale(_disc_scale())


@lru_cache(maxsize=None)
def restricted_discriminant() -> MultiPoly:
    """Discriminant of ``c1 x^2y + ... + c7 xyz`` as a polynomial in c1..c7."""
    return discriminant().subs(family_substitution(), FAMILY_VARS)


@lru_cache(maxsize=None)
def restricted_S() -> MultiPoly:
    return aronhold_S().subs(family_substitution(), FAMILY_VARS)


@lru_cache(maxsize=None)
def restricted_T() -> MultiPoly:
    return invariant_T().subs(family_substitution(), FAMILY_VARS)


def family_to_general(c7: Sequence) -> dict:
    v = {name: 0 for name in CUBIC_VARS}
    for val, e in zip(c7, FAMILY_EXPONENTS):
        v["c" + "".join(map(str, e))] = val
    return v


def ternary_cubic_invariants(c) -> tuple:
    """``(S, T, Disc)`` of a cubic given by 10 coefficients (``CUBIC_VARS`` order
    or a mapping) or by the 7 family coefficients."""
    if isinstance(c, dict):
        vals = {name: c.get(name, 0) for name in CUBIC_VARS}
    elif len(c) == 7:
        vals = family_to_general(c)
    elif len(c) == 10:
        vals = dict(zip(CUBIC_VARS, c))
    else:
        raise ValueError("expected 7 or 10 coefficients")
    return aronhold_S().eval(vals), invariant_T().eval(vals), discriminant().eval(vals)

