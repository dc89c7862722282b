"""Sparse multivariate polynomials with exact rational coefficients.

A :class:`MultiPoly` stores a tuple of variable names and a dict mapping
exponent tuples (dense over that variable tuple) to nonzero coefficients.
Coefficients are Python ``int`` whenever possible and ``Fraction`` otherwise,
so integer-valued polynomials stay on the fast path.

Binary operations require identical variable tuples; use :func:`align` to
bring two polynomials onto a common variable list first.

Resultant sign convention: ``resultant(p, q, x)`` is the determinant of the
Sylvester matrix whose first ``deg_x q`` rows hold the coefficients of ``p``
(highest power first) and whose last ``deg_x p`` rows hold those of ``q``.
With this convention ``resultant(x - 1, x - 2, x) == -1``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Mapping, Sequence, Tuple

Exponent = Tuple[int, ...]


class VariableMismatch(ValueError):
    pass


class NonExactDivision(ArithmeticError):
    """Raised when a division leaves a nonzero remainder."""

    def __init__(self, quotient: "MultiPoly", remainder: "MultiPoly"):
        super().__init__(f"division is not exact; remainder has {len(remainder.terms)} terms")
        self.quotient = quotient
        self.remainder = remainder


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    if isinstance(c, bool):
        return int(c)
    if isinstance(c, int):
        return c
    if isinstance(c, Rational):
        c = Fraction(c)
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, float):
        c = Fraction(c)
        return c.numerator if c.denominator == 1 else c
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


def _div_coeff(a, b):
    if isinstance(a, int) and isinstance(b, int) and a % b == 0:
        return a // b
    return _norm(Fraction(a) / b)


class MultiPoly:
    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[Exponent, object] | None = None, _trusted=False):
        self.vars = tuple(variables)
        if _trusted:
            self.terms = terms
        else:
            n = len(self.vars)
            if len(set(self.vars)) != n:
                raise ValueError(f"repeated variable names in {self.vars}")
            clean: Dict[Exponent, object] = {}
            for e, c in (terms or {}).items():
                e = tuple(int(k) for k in e)
                if len(e) != n or min(e, default=0) < 0:
                    raise ValueError(f"bad exponent {e} for variables {self.vars}")
                c = _norm(c)
                if c:
                    c = clean.get(e, 0) + c
                    if c:
                        clean[e] = c
                    else:
                        clean.pop(e, None)
            self.terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, variables: Sequence[str]) -> "MultiPoly":
        return cls(variables, {}, _trusted=True)

    @classmethod
    def constant(cls, c, variables: Sequence[str]) -> "MultiPoly":
        variables = tuple(variables)
        c = _norm(c)
        return cls(variables, {(0,) * len(variables): c} if c else {}, _trusted=True)

    @classmethod
    def var(cls, name: str, variables: Sequence[str]) -> "MultiPoly":
        variables = tuple(variables)
        e = [0] * len(variables)
        e[variables.index(name)] = 1
        return cls(variables, {tuple(e): 1}, _trusted=True)

    @classmethod
    def gens(cls, variables: Sequence[str]) -> list["MultiPoly"]:
        return [cls.var(v, variables) for v in variables]

    # -- basic properties ---------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree(self, var: str) -> int:
        if not self.terms:
            return -1
        k = self.vars.index(var)
        return max(e[k] for e in self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get((0,) * len(self.vars), 0)

    def used_vars(self) -> tuple[str, ...]:
        used = [False] * len(self.vars)
        for e in self.terms:
            for k, d in enumerate(e):
                if d:
                    used[k] = True
        return tuple(v for v, u in zip(self.vars, used) if u)

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.vars == other.vars and self.terms == other.terms
        try:
            c = _norm(other)
        except TypeError:
            return NotImplemented
        return self.terms == ({(0,) * len(self.vars): c} if c else {})

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    # -- arithmetic -----------------------------------------------------
    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.vars != self.vars:
                raise VariableMismatch(f"variable sets differ: {self.vars} vs {other.vars}")
            return other
        return MultiPoly.constant(other, self.vars)

    def __add__(self, other):
        other = self._coerce(other)
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        out = dict(big)
        for e, c in small.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                del out[e]
        return MultiPoly(self.vars, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.vars, {e: -c for e, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "MultiPoly":
        c = _norm(c)
        if not c:
            return MultiPoly.zero(self.vars)
        out = {}
        for e, a in self.terms.items():
            out[e] = _norm(a * c) if isinstance(c, Fraction) or isinstance(a, Fraction) else a * c
        return MultiPoly(self.vars, out, _trusted=True)

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        other = self._coerce(other)
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out: Dict[Exponent, object] = {}
        get = out.get
        for eb, cb in b.items():
            for ea, ca in a.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = get(e, 0) + ca * cb
        out = {e: _norm(c) for e, c in out.items() if c}
        return MultiPoly(self.vars, out, _trusted=True)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = MultiPoly.constant(1, self.vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, MultiPoly):
            return self.exact_div(other)
        other = _norm(other)
        return self.scale(Fraction(1) / other)

    # -- ordering and printing ----------------------------------------
    def sorted_terms(self) -> list[tuple[Exponent, object]]:
        """Terms in graded lexicographic order, largest first."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def leading_term(self) -> tuple[Exponent, object]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=lambda e: (sum(e), e))
        return e, self.terms[e]

    def to_str(self) -> str:
        """Canonical text form: grlex-sorted terms with explicit rational coefficients."""
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                (v if k == 1 else f"{v}^{k}") for v, k in zip(self.vars, e) if k
            )
            c = Fraction(c)
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            cs = str(mag.numerator) if mag.denominator == 1 else f"{mag.numerator}/{mag.denominator}"
            if mono:
                body = mono if mag == 1 else f"{cs}*{mono}"
            else:
                body = cs
            parts.append((sign, body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    __str__ = to_str

    def __repr__(self):
        return f"MultiPoly({self.vars!r}, {self.to_str()!r})"

    # -- evaluation and substitution ----------------------------------
    def eval(self, assignment: Mapping[str, object]):
        """Exact value at a point; ``assignment`` must cover every variable in use."""
        used = self.used_vars()
        missing = [v for v in used if v not in assignment]
        if missing:
            raise KeyError(f"missing values for variables {missing}")
        vals = [assignment.get(v, 0) for v in self.vars]
        vals = [v if isinstance(v, (int, Fraction, float, complex)) else _norm(v) for v in vals]
        powers: list[dict] = [dict() for _ in vals]
        total = 0
        for e, c in self.terms.items():
            t = c
            for k, d in enumerate(e):
                if d:
                    pw = powers[k].get(d)
                    if pw is None:
                        pw = vals[k] ** d
                        powers[k][d] = pw
                    t = t * pw
            total = total + t
        if isinstance(total, Fraction) and total.denominator == 1:
            return total.numerator
        return total

    __call__ = eval

    def eval_float(self, assignment: Mapping[str, object]):
        """Evaluate with float coefficients; values may be numpy arrays."""
        vals = [assignment.get(v, 0) for v in self.vars]
        total = 0.0
        for e, c in self.terms.items():
            t = float(c)
            for k, d in enumerate(e):
                if d:
                    t = t * vals[k] ** d
            total = total + t
        return total

    def subs(self, mapping: Mapping[str, object], variables: Sequence[str] | None = None) -> "MultiPoly":
        """Substitute polynomials (or numbers) for variables.

        The result lives over ``variables`` (default: the variable list of the
        first polynomial in ``mapping``, or ``self.vars`` if none)."""
        if variables is None:
            variables = next((m.vars for m in mapping.values() if isinstance(m, MultiPoly)), self.vars)
        variables = tuple(variables)
        images = []
        for v in self.vars:
            if v in mapping:
                m = mapping[v]
                if isinstance(m, MultiPoly):
                    if m.vars != variables:
                        m = m.with_vars(variables)
                else:
                    m = MultiPoly.constant(m, variables)
            else:
                m = MultiPoly.var(v, variables)
            images.append(m)
        cache = [dict() for _ in images]

        def power(k, d):
            p = cache[k].get(d)
            if p is None:
                p = images[k] if d == 1 else power(k, d - 1) * images[k]
                cache[k][d] = p
            return p

        out: Dict[Exponent, object] = {}
        for e, c in self.terms.items():
            t = MultiPoly.constant(c, variables)
            for k, d in enumerate(e):
                if d:
                    t = t * power(k, d)
            for te, tc in t.terms.items():
                s = out.get(te, 0) + tc
                if s:
                    out[te] = s
                else:
                    out.pop(te, None)
        return MultiPoly(variables, out, _trusted=True)

    def with_vars(self, variables: Sequence[str]) -> "MultiPoly":
        """Re-express over another variable list containing every used variable."""
        variables = tuple(variables)
        if variables == self.vars:
            return self
        pos = {v: i for i, v in enumerate(variables)}
        idx = []
        for k, v in enumerate(self.vars):
            if v in pos:
                idx.append(pos[v])
            else:
                idx.append(None)
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(variables)
            for k, d in enumerate(e):
                if d:
                    if idx[k] is None:
                        raise VariableMismatch(f"variable {self.vars[k]} is used but absent from target list")
                    ne[idx[k]] = d
            out[tuple(ne)] = c
        return MultiPoly(variables, out, _trusted=True)

    # -- univariate views ----------------------------------------------
    def coeffs_in(self, var: str) -> dict[int, "MultiPoly"]:
        """Map power -> coefficient polynomial (over the same variable list, ``var`` absent)."""
        k = self.vars.index(var)
        buckets: Dict[int, dict] = {}
        for e, c in self.terms.items():
            d = e[k]
            ne = e[:k] + (0,) + e[k + 1:]
            buckets.setdefault(d, {})[ne] = c
        return {d: MultiPoly(self.vars, t, _trusted=True) for d, t in buckets.items()}

    def univariate_coeffs(self, var: str | None = None) -> list:
        """Dense coefficient list (lowest degree first) of a univariate polynomial."""
        used = self.used_vars()
        if var is None:
            if len(used) > 1:
                raise ValueError(f"polynomial is not univariate: {used}")
            var = used[0] if used else self.vars[0]
        elif any(v != var for v in used):
            raise ValueError(f"polynomial involves variables other than {var}")
        k = self.vars.index(var)
        deg = self.degree(var)
        out = [0] * (deg + 1)
        for e, c in self.terms.items():
            out[e[k]] = c
        return out

    def diff(self, var: str) -> "MultiPoly":
        k = self.vars.index(var)
        out = {}
        for e, c in self.terms.items():
            if e[k]:
                out[e[:k] + (e[k] - 1,) + e[k + 1:]] = c * e[k]
        return MultiPoly(self.vars, out, _trusted=True)

    def homogeneous_part(self, degree: int) -> "MultiPoly":
        return MultiPoly(self.vars, {e: c for e, c in self.terms.items() if sum(e) == degree}, _trusted=True)

    def content(self) -> Fraction:
        """Positive rational content (gcd of numerators over lcm of denominators)."""
        from math import gcd, lcm

        if not self.terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self.terms.values():
            c = Fraction(c)
            num = gcd(num, c.numerator)
            den = lcm(den, c.denominator)
        return Fraction(num, den)

    def primitive(self) -> "MultiPoly":
        """Scale to integer coefficients with gcd 1 and positive grlex-leading coefficient."""
        if not self.terms:
            return self
        c = self.content()
        if self.leading_term()[1] < 0:
            c = -c
        return self.scale(1 / c)

    # -- division ---------------------------------------------------------
    def divmod(self, q: "MultiPoly") -> tuple["MultiPoly", "MultiPoly"]:
        """Multivariate division by a single divisor w.r.t. grlex order."""
        q = self._coerce(q)
        if not q.terms:
            raise ZeroDivisionError("division by the zero polynomial")
        lq, lc = q.leading_term()
        qterms = list(q.terms.items())
        rem = dict(self.terms)
        quo: Dict[Exponent, object] = {}
        rest: Dict[Exponent, object] = {}
        key = lambda e: (sum(e), e)
        # repeatedly cancel the largest remaining term
        import heapq

        heap = [(-sum(e), tuple(-x for x in e)) for e in rem]
        heapq.heapify(heap)
        while heap:
            negdeg, nege = heapq.heappop(heap)
            e = tuple(-x for x in nege)
            c = rem.pop(e, 0)
            if not c:
                continue
            if all(x >= y for x, y in zip(e, lq)):
                m = tuple(x - y for x, y in zip(e, lq))
                f = _div_coeff(c, lc)
                quo[m] = f
                for qe, qc in qterms:
                    if qe == lq:
                        continue
                    te = tuple(x + y for x, y in zip(m, qe))
                    old = rem.get(te)
                    s = (old or 0) - f * qc
                    if s:
                        if old is None:
                            heapq.heappush(heap, (-sum(te), tuple(-x for x in te)))
                        rem[te] = _norm(s)
                    elif old is not None:
                        del rem[te]
            else:
                rest[e] = c
        return MultiPoly(self.vars, quo, _trusted=True), MultiPoly(self.vars, rest, _trusted=True)

    def exact_div(self, q: "MultiPoly") -> "MultiPoly":
        quo, rem = self.divmod(q)
        if rem.terms:
            raise NonExactDivision(quo, rem)
        return quo

    def divides(self, p: "MultiPoly") -> bool:
        return not p.divmod(self)[1].terms


def align(*polys: MultiPoly) -> list[MultiPoly]:
    """Bring polynomials onto a common variable list (order of first appearance)."""
    names: list[str] = []
    for p in polys:
        for v in p.vars:
            if v not in names:
                names.append(v)
    return [p.with_vars(names) for p in polys]


def poly_arith(p: MultiPoly, q: MultiPoly, op: str) -> MultiPoly:
    if p.vars != q.vars:
        raise VariableMismatch(f"variable sets differ: {p.vars} vs {q.vars}")
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown operation {op!r}")


def poly_eval(p: MultiPoly, assignment: Mapping[str, object]):
    return p.eval(assignment)


def poly_exact_div(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    return p.exact_div(q)


# -- determinants and resultants ---------------------------------------------

def det(matrix: Sequence[Sequence[MultiPoly]]) -> MultiPoly:
    """Determinant by fraction-free (Bareiss) elimination with exact division."""
    n = len(matrix)
    if n == 0:
        raise ValueError("empty matrix")
    variables = next((e.vars for row in matrix for e in row if isinstance(e, MultiPoly)), ())
    m = [[e if isinstance(e, MultiPoly) else MultiPoly.constant(e, variables) for e in row] for row in matrix]
    sign = 1
    prev = MultiPoly.constant(1, variables)
    for k in range(n - 1):
        if not m[k][k].terms:
            piv = next((i for i in range(k + 1, n) if m[i][k].terms), None)
            if piv is None:
                return MultiPoly.zero(variables)
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = num.exact_div(prev) if k else num
        prev = m[k][k]
    return m[n - 1][n - 1] if sign > 0 else -m[n - 1][n - 1]


def sylvester_matrix(p: MultiPoly, q: MultiPoly, var: str) -> list[list[MultiPoly]]:
    m, n = p.degree(var), q.degree(var)
    if m < 1 or n < 1:
        raise ValueError(f"both polynomials need positive degree in {var}")
    pc, qc = p.coeffs_in(var), q.coeffs_in(var)
    zero = MultiPoly.zero(p.vars)
    size = m + n
    rows = []
    for i in range(n):
        rows.append([pc.get(m - (j - i), zero) if 0 <= j - i <= m else zero for j in range(size)])
    for i in range(m):
        rows.append([qc.get(n - (j - i), zero) if 0 <= j - i <= n else zero for j in range(size)])
    return rows


def resultant_univariate(p: MultiPoly, q: MultiPoly, var: str) -> MultiPoly:
    """Resultant of ``p`` and ``q`` with respect to ``var``; ``var`` is dropped from the result."""
    if p.vars != q.vars:
        raise VariableMismatch(f"variable sets differ: {p.vars} vs {q.vars}")
    if not p.terms or not q.terms:
        raise ValueError("resultant of the zero polynomial")
    r = det(sylvester_matrix(p, q, var))
    rest = tuple(v for v in p.vars if v != var)
    return r.with_vars(rest) if rest else r


# -- univariate helpers over Q ---------------------------------------------

def upoly_trim(a: list) -> list:
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return a


def upoly_divmod(a: list, b: list) -> tuple[list, list]:
    """Dense univariate division, coefficients lowest degree first."""
    a = [Fraction(x) for x in upoly_trim(a)]
    b = [Fraction(x) for x in upoly_trim(b)]
    if not b:
        raise ZeroDivisionError
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        f = a[-1] / b[-1]
        s = len(a) - len(b)
        q[s] = f
        for i, c in enumerate(b):
            a[s + i] -= f * c
        a = upoly_trim(a)
    return q, a


def upoly_gcd(a: list, b: list) -> list:
    """Monic gcd of two dense univariate polynomials over Q."""
    a, b = upoly_trim(a), upoly_trim(b)
    while b:
        _, r = upoly_divmod(a, b)
        a, b = b, r
    if not a:
        return []
    lead = Fraction(a[-1])
    return [Fraction(c) / lead for c in a]


_TERM_RE = re.compile(r"\s*([+-])?\s*([^+-]+)")


def parse_poly(text: str, variables: Sequence[str]) -> MultiPoly:
    """Parse the canonical text form produced by :meth:`MultiPoly.to_str`."""
    variables = tuple(variables)
    text = text.strip()
    if text == "0":
        return MultiPoly.zero(variables)
    terms: Dict[Exponent, object] = {}
    pos = {v: i for i, v in enumerate(variables)}
    for sign, body in _TERM_RE.findall(text):
        body = body.strip()
        coeff = Fraction(1)
        e = [0] * len(variables)
        for factor in body.split("*"):
            factor = factor.strip()
            if re.fullmatch(r"\d+(/\d+)?", factor):
                coeff *= Fraction(factor)
            else:
                name, _, k = factor.partition("^")
                if name not in pos:
                    raise ValueError(f"unknown variable {name!r}")
                e[pos[name]] += int(k) if k else 1
        if sign == "-":
            coeff = -coeff
        e = tuple(e)
        terms[e] = terms.get(e, 0) + coeff
    return MultiPoly(variables, terms)
