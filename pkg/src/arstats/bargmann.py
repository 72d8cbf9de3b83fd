"""Analytic (Bargmann-type) realizations of the Fock spaces.

Fock vectors become polynomials, |n> -> C_n x_1^{n_1} ... x_r^{n_r}, and the
Jacobson generators become differential operators:

=========  ===================================  =====================================
kind       a_i^+                                a_i^-
=========  ===================================  =====================================
I          x_i                                  k d_i + x_i d_i^2 + d_i sum_{j!=i} x_j d_j
II         k x_i + x_i sum_j x_j d_j             d_i
fermionic  (k-1) x_i - x_i sum_j x_j d_j         d_i
=========  ===================================  =====================================

with coefficients

    I:          C_n = sqrt((k-1)! / (n_1!...n_r! (k-1+n)!))
    II:         C_n = sqrt((k-1+n)! / (n_1!...n_r! (k-1)!))
    fermionic:  C_n = sqrt((k-1)! / (n_1!...n_r! (k-1-n)!))

The fermionic coefficient solves sqrt(n_i) C_n = sqrt(k-n) C_{n-e_i}; its
creation operator sums x_j d_j (not x_j d_i).  Both forms are certified by
:func:`verify_realization_equivalence`.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from numbers import Number
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import BasisMismatch, CutoffTooSmall, InvalidParamsError
from .fock import LOWER, RAISE, FockBasis, SectorParams, check_state, ladder_matrix
from .report import VerificationReport

NUMBER = "number"


class MultiPoly:
    """Sparse multivariate polynomial: multi-index tuple -> coefficient.

    Coefficients may be any numbers (floats, complex, Fractions); exact zeros
    are never stored.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple[int, ...], Number] | None = None):
        if nvars < 1:
            raise InvalidParamsError("a polynomial needs at least one variable")
        self.nvars = nvars
        self.terms: dict[tuple[int, ...], Number] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise InvalidParamsError(f"bad multi-index {exps} for {nvars} variables")
            if c != 0:
                self.terms[exps] = self.terms.get(exps, 0) + c
        self.terms = {e: c for e, c in self.terms.items() if c != 0}

    @classmethod
    def constant(cls, nvars: int, c: Number = 1) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def monomial(cls, exps: Sequence[int], c: Number = 1) -> "MultiPoly":
        return cls(len(exps), {tuple(exps): c})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "MultiPoly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    def _check(self, other: "MultiPoly") -> None:
        if other.nvars != self.nvars:
            raise BasisMismatch(f"polynomials in {self.nvars} and {other.nvars} variables")

    def __add__(self, other):
        if isinstance(other, Number):
            other = MultiPoly.constant(self.nvars, other)
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return MultiPoly(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return MultiPoly(self.nvars, {e: c * other for e, c in self.terms.items()})
        self._check(other)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return MultiPoly(self.nvars, terms)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __getitem__(self, exps) -> Number:
        return self.terms.get(tuple(exps), 0)

    def __len__(self):
        return len(self.terms)

    def diff(self, i: int) -> "MultiPoly":
        terms = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                terms[tuple(f)] = c * e[i]
        return MultiPoly(self.nvars, terms)

    def mul_var(self, i: int) -> "MultiPoly":
        terms = {}
        for e, c in self.terms.items():
            f = list(e)
            f[i] += 1
            terms[tuple(f)] = c
        return MultiPoly(self.nvars, terms)

    def euler(self) -> "MultiPoly":
        """sum_j x_j d_j."""
        out = MultiPoly(self.nvars)
        for j in range(self.nvars):
            out = out + self.diff(j).mul_var(j)
        return out

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Number]]:
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]))

    def render(self, var: str = "x", digits: int = 17) -> str:
        """Plain-text form in graded-lex order, e.g. ``1.4142135623730951*x1*x2^2``."""
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            factors = [f"{var}{j + 1}" + (f"^{p}" if p > 1 else "") for j, p in enumerate(e) if p]
            coef = f"{c:.{digits}g}" if isinstance(c, float) else str(c)
            parts.append("*".join([coef] + factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"MultiPoly({self.nvars}, {self.render()})"


class RealizationKind(enum.Enum):
    I = "I"
    II = "II"
    FERMIONIC = "fermionic"

    @property
    def sector(self) -> int:
        return -1 if self is RealizationKind.FERMIONIC else 1

    @property
    def domain(self) -> str:
        if self is RealizationKind.II:
            return "unit ball |z_1|^2 + ... + |z_r|^2 < 1"
        return "entire C^r"

    @classmethod
    def parse(cls, value) -> "RealizationKind":
        if isinstance(value, cls):
            return value
        for kind in cls:
            if str(value).lower() == kind.value.lower():
                return kind
        raise InvalidParamsError(f"unknown realization kind {value!r}")


def _check_kind(kind: RealizationKind, params: SectorParams) -> None:
    if kind.sector != params.s:
        raise InvalidParamsError(
            f"realization {kind.value} needs s={kind.sector:+d}, got s={params.s:+d}"
        )


def coefficient_squared(kind: RealizationKind, params: SectorParams, n: Sequence[int]) -> Fraction:
    kind = RealizationKind.parse(kind)
    _check_kind(kind, params)
    n = check_state(params, n)
    k, total = params.k, sum(n)
    fact = math.factorial
    prod = math.prod(fact(v) for v in n)
    if kind is RealizationKind.I:
        return Fraction(fact(k - 1), prod * fact(k - 1 + total))
    if kind is RealizationKind.II:
        return Fraction(fact(k - 1 + total), prod * fact(k - 1))
    return Fraction(fact(k - 1), prod * fact(k - 1 - total))


def basis_coefficient(kind: RealizationKind, params: SectorParams, n: Sequence[int]) -> float:
    """C_n for the given realization, from exact factorials and one square root."""
    return math.sqrt(coefficient_squared(kind, params, n))


def apply_generator(
    kind: RealizationKind, params: SectorParams, p: MultiPoly, i: int, direction: str
) -> MultiPoly:
    """Apply the differential image of a_i^+ (``raise``), a_i^- (``lower``) or N_i (``number``)."""
    kind = RealizationKind.parse(kind)
    _check_kind(kind, params)
    if p.nvars != params.r:
        raise BasisMismatch(f"polynomial has {p.nvars} variables, sector has r={params.r}")
    if not 0 <= i < params.r:
        raise InvalidParamsError(f"mode index {i} out of range")
    k = params.k
    if direction == NUMBER:
        return p.diff(i).mul_var(i)
    if kind is RealizationKind.I:
        if direction == RAISE:
            return p.mul_var(i)
        if direction == LOWER:
            d = p.diff(i)
            cross = MultiPoly(p.nvars)
            for j in range(p.nvars):
                if j != i:
                    cross = cross + p.diff(j).mul_var(j)
            return k * d + d.diff(i).mul_var(i) + cross.diff(i)
    elif kind is RealizationKind.II:
        if direction == LOWER:
            return p.diff(i)
        if direction == RAISE:
            return k * p.mul_var(i) + p.euler().mul_var(i)
    else:
        if direction == LOWER:
            return p.diff(i)
        if direction == RAISE:
            return (k - 1) * p.mul_var(i) - p.euler().mul_var(i)
    raise InvalidParamsError(f"direction must be raise, lower or number; got {direction!r}")


CoefficientFn = Callable[[RealizationKind, SectorParams, Sequence[int]], float]


def state_to_polynomial(
    kind: RealizationKind,
    basis: FockBasis,
    amplitudes: Sequence[Number],
    coefficient: CoefficientFn = basis_coefficient,
) -> MultiPoly:
    """sum_n amplitude(n) C_n x^n over ``basis``."""
    kind = RealizationKind.parse(kind)
    amplitudes = np.asarray(amplitudes)
    if amplitudes.shape != (basis.size,):
        raise BasisMismatch(f"amplitude vector of shape {amplitudes.shape} for basis of size {basis.size}")
    terms = {}
    for n, a in zip(basis.states, amplitudes):
        if a != 0:
            a = a.item() if hasattr(a, "item") else a
            terms[n] = a * coefficient(kind, basis.params, n)
    return MultiPoly(basis.params.r, terms)


def _poly_residual(p: MultiPoly, q: MultiPoly) -> float:
    worst = 0.0
    for e in set(p.terms) | set(q.terms):
        a, b = p[e], q[e]
        worst = max(worst, abs(a - b) / max(1.0, abs(b)))
    return worst


def verify_realization_equivalence(
    kind: RealizationKind,
    basis: FockBasis,
    tol: float = 1e-12,
    coefficient: CoefficientFn = basis_coefficient,
) -> VerificationReport:
    """Check that the differential operators reproduce the ladder matrices.

    For every basis state n, mode i and direction, the image of the unit vector
    at n under the differential operator must equal the image of the matrix
    column.  Coefficients are compared relative to max(1, |expected|).  On a
    truncated bosonic basis raising is checked on totals <= cutoff - 1 only;
    lowering and number are exact everywhere.
    """
    kind = RealizationKind.parse(kind)
    params = basis.params
    _check_kind(kind, params)
    if not params.finite and basis.cutoff < 2:
        raise CutoffTooSmall(f"bosonic equivalence check needs cutoff >= 2, got {basis.cutoff}")
    raise_ok = basis.interior(1)
    res = []
    for i in range(params.r):
        mats = {RAISE: ladder_matrix(basis, i, RAISE), LOWER: ladder_matrix(basis, i, LOWER)}
        number_diag = np.array([n[i] for n in basis.states], dtype=float)
        for col, n in enumerate(basis.states):
            unit = np.zeros(basis.size)
            unit[col] = 1.0
            p = state_to_polynomial(kind, basis, unit, coefficient)
            for direction in (RAISE, LOWER):
                if direction == RAISE and not raise_ok[col]:
                    continue
                got = apply_generator(kind, params, p, i, direction)
                want = state_to_polynomial(kind, basis, mats[direction].dot(unit), coefficient)
                res.append(_poly_residual(got, want))
            got = apply_generator(kind, params, p, i, NUMBER)
            want = state_to_polynomial(kind, basis, number_diag * unit, coefficient)
            res.append(_poly_residual(got, want))
    mask = (
        "none (finite exact representation)"
        if params.finite
        else f"raise: columns with total <= {basis.cutoff - 1}; lower, number: all shells"
    )
    return VerificationReport.from_residuals(
        f"realization_equivalence[{kind.value}]",
        res,
        tol,
        mask,
        params.as_dict(),
        {"cutoff": basis.cutoff, "basis_size": basis.size, "kind": kind.value, "domain": kind.domain},
    )
