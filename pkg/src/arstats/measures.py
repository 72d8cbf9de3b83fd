"""Quadrature checks of the inner-product measures through their moment equations.

Three radial moment problems are checked by tensor-product Gauss-Legendre
quadrature:

* ``bessel``     (realization I)   (2 pi)^r int_{(0,inf)^r} K(k; R) prod rho_i^(2 n_i + 1)
                                   = prod n_i! (k-1+n)! / (k-1)!,
                                   K(k; R) = 2 / (pi^r (k-1)!) R^(k-r) K_(k-r)(2R)
* ``ball``       (realization II)  int_{ball+} Sigma prod rho_i^(2 n_i + 1)
                                   = prod n_i! (k-1)! / ((2 pi)^r (k-1+n)!),
                                   Sigma = pi^-r (1 - |rho|^2)^(k-r-1) (k-r)(k-r+1)...(k-1)
* ``projective`` (fermionic)       int_{(0,inf)^r} mu prod x_i^n_i = prod n_i! (k-1-n)! / (k-1)!,
                                   mu = (k-1+r)! / (k-1)! (1 + sum x)^-(k+r)

plus the Dirichlet-type simplex integral used to derive the ball measure.
Semi-infinite axes are compactified with x = t / (1 - t).
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import InvalidParamsError, PauliViolation, QuadratureError
from .fock import SectorParams

# -- modified Bessel function of the second kind ---------------------------------

_BESSEL_DEPTH = 42.0  # integrand is dropped once it is e^-42 below its peak


def bessel_k(order: float, x) -> np.ndarray | float:
    """K_order(x) for x > 0 from K_v(x) = int_0^inf exp(-x cosh t) cosh(v t) dt.

    The integrand is entire and decays double-exponentially, so the trapezoid
    rule converges geometrically in the step (error ~ exp(-pi^2 / h)).  Each x
    gets its own step h <= min(0.1, 0.5 / sqrt(x)) and a cut-off t_max where
    the integrand has fallen e^-42 below its peak.  Vectorized over ``x``.
    """
    xs = np.asarray(x, dtype=float)
    shape = xs.shape
    xs = xs.reshape(-1)
    if np.any(~(xs > 0)):
        raise InvalidParamsError("bessel_k needs x > 0")
    nu = abs(float(order))
    # peak of log integrand (shifted by +x): nu t - x (cosh t - 1), at sinh t = nu / x
    tp = np.arcsinh(nu / xs)
    peak = nu * tp - xs * (np.cosh(tp) - 1.0)
    level = peak + _BESSEL_DEPTH
    t = np.maximum(tp, 1.0)
    for _ in range(60):
        t = np.arccosh(1.0 + (level + nu * t) / xs)
    tmax = t
    hmax = np.minimum(0.1, 0.5 / np.sqrt(xs))
    m = int(np.ceil(np.max(tmax / hmax))) + 1
    h = tmax / (m - 1)
    grid = np.arange(m)[None, :] * h[:, None]
    logf = nu * grid - xs[:, None] * (np.cosh(grid) - 1.0) - peak[:, None]
    # cosh(nu t) = (e^{nu t} + e^{-nu t}) / 2, the second branch folded in exactly
    f = 0.5 * (np.exp(logf) + np.exp(logf - 2.0 * nu * grid))
    w = np.full(m, 1.0)
    w[0] = 0.5
    integral = (f @ w) * h
    out = integral * np.exp(peak - xs)
    return float(out[0]) if shape == () else out.reshape(shape)


# -- quadrature ------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Legendre nodes per axis and the refinement agreement target.

    ``moment_residual`` evaluates each integral with ``nodes`` and ``2 * nodes``
    points per axis and raises :class:`QuadratureError` if the two disagree by
    more than ``tol`` (relative, floor 1).
    """

    nodes: int = 96
    tol: float = 1e-8

    def __post_init__(self):
        if self.nodes < 2:
            raise InvalidParamsError("need at least 2 nodes per axis")
        if not self.tol > 0:
            raise InvalidParamsError("quadrature tolerance must be positive")


def gauss_legendre(nodes: int, a: float = 0.0, b: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(nodes)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def semi_infinite(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on (0, inf) via x = t / (1 - t), dx = dt / (1 - t)^2."""
    t, w = gauss_legendre(nodes)
    return t / (1.0 - t), w / (1.0 - t) ** 2


def tensor_grid(rules: Sequence[tuple[np.ndarray, np.ndarray]]) -> tuple[list[np.ndarray], np.ndarray]:
    points = np.meshgrid(*[p for p, _ in rules], indexing="ij")
    weights = np.ones_like(points[0])
    for axis, (_, w) in enumerate(rules):
        shape = [1] * len(rules)
        shape[axis] = -1
        weights = weights * w.reshape(shape)
    return points, weights


def _relative(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(b))


def refine(integral: Callable[[int], float], quad: QuadratureSpec, label: str) -> float:
    coarse = integral(quad.nodes)
    fine = integral(2 * quad.nodes)
    if not (math.isfinite(fine) and _relative(coarse, fine) <= quad.tol):
        raise QuadratureError(
            f"{label}: {quad.nodes} and {2 * quad.nodes} nodes per axis give {coarse!r} vs {fine!r}"
        )
    return fine


# -- moment problems -------------------------------------------------------------


class MeasureFamily(enum.Enum):
    BESSEL = "bessel"
    BALL = "ball"
    PROJECTIVE = "projective"

    @classmethod
    def parse(cls, value) -> "MeasureFamily":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidParamsError(f"unknown measure family {value!r}") from None


@dataclass(frozen=True)
class MomentCase:
    """One moment equation: measure family, sector and moment multi-index.

    ``validate=False`` skips the case invariants so that divergent moments can
    be handed to the quadrature, which must then refuse to converge.
    """

    family: MeasureFamily
    params: SectorParams
    n: tuple[int, ...]
    validate: bool = True

    def __post_init__(self):
        object.__setattr__(self, "family", MeasureFamily.parse(self.family))
        n = tuple(int(v) for v in self.n)
        object.__setattr__(self, "n", n)
        if len(n) != self.params.r or any(v < 0 for v in n):
            raise InvalidParamsError(f"moment index {n} invalid for r={self.params.r}")
        if not self.validate:
            return
        p = self.params
        if self.family is MeasureFamily.PROJECTIVE:
            if p.s != -1:
                raise InvalidParamsError("projective measure belongs to the fermionic sector")
            if sum(n) > p.k - 1:
                raise PauliViolation(f"projective moment needs total(n) <= k-1={p.k - 1}, got {sum(n)}")
        else:
            if p.s != 1:
                raise InvalidParamsError(f"{self.family.value} measure belongs to the bosonic sector")
            if self.family is MeasureFamily.BESSEL and p.k < p.r:
                raise InvalidParamsError(f"bessel kernel order k-r must be >= 0, got k={p.k}, r={p.r}")
            if self.family is MeasureFamily.BALL and p.k <= p.r:
                raise InvalidParamsError(f"ball measure needs k > r, got k={p.k}, r={p.r}")


class MomentResult(NamedTuple):
    lhs: float
    rhs: float
    residual: float


def moment_rhs(case: MomentCase) -> Fraction | float:
    k, r, n = case.params.k, case.params.r, case.n
    total = sum(n)
    f = math.factorial
    prod = math.prod(f(v) for v in n)
    if case.family is MeasureFamily.BESSEL:
        return Fraction(prod * f(k - 1 + total), f(k - 1))
    if case.family is MeasureFamily.BALL:
        return Fraction(prod * f(k - 1), f(k - 1 + total)) / (2 * math.pi) ** r
    if total > k - 1:
        return math.inf
    return Fraction(prod * f(k - 1 - total), f(k - 1))


def bessel_kernel(params: SectorParams, radius: np.ndarray) -> np.ndarray:
    """K(k; R) = 2 / (pi^r (k-1)!) R^(k-r) K_(k-r)(2R)."""
    k, r = params.k, params.r
    pref = 2.0 / (math.pi**r * math.factorial(k - 1))
    return pref * radius ** (k - r) * bessel_k(k - r, 2.0 * radius)


def ball_measure(params: SectorParams, radius2: np.ndarray) -> np.ndarray:
    k, r = params.k, params.r
    rising = math.prod(range(k - r, k))
    inside = np.clip(1.0 - radius2, 0.0, None)
    return math.pi ** (-r) * inside ** (k - r - 1) * rising


def projective_measure(params: SectorParams, xsum: np.ndarray) -> np.ndarray:
    k, r = params.k, params.r
    return math.factorial(k - 1 + r) / math.factorial(k - 1) * (1.0 + xsum) ** (-(k + r))


def _positive_sphere(nodes: int, r: int, radial: tuple[np.ndarray, np.ndarray]):
    """Hyperspherical tensor grid on the positive orthant.

    rho_1 = R cos th_1, rho_2 = R sin th_1 cos th_2, ..., with th_j in (0, pi/2)
    and Jacobian R^(r-1) prod_j sin(th_j)^(r-1-j).
    """
    rules = [radial] + [gauss_legendre(nodes, 0.0, math.pi / 2) for _ in range(r - 1)]
    pts, w = tensor_grid(rules)
    radius = pts[0]
    coords = []
    running = radius
    jac = radius ** (r - 1)
    for j in range(r - 1):
        th = pts[j + 1]
        coords.append(running * np.cos(th))
        jac = jac * np.sin(th) ** (r - 2 - j)
        running = running * np.sin(th)
    coords.append(running)
    return coords, radius, w * jac


def _bessel_lhs(case: MomentCase, nodes: int) -> float:
    p, n = case.params, case.n
    pts, w = tensor_grid([semi_infinite(nodes)] * p.r)
    radius = np.sqrt(sum(x**2 for x in pts))
    integrand = bessel_kernel(p, radius)
    for x, ni in zip(pts, n):
        integrand = integrand * x ** (2 * ni + 1)
    return float((2 * math.pi) ** p.r * np.sum(w * integrand))


def _ball_lhs(case: MomentCase, nodes: int) -> float:
    p, n = case.params, case.n
    coords, radius, w = _positive_sphere(nodes, p.r, gauss_legendre(nodes))
    integrand = ball_measure(p, radius**2)
    for x, ni in zip(coords, n):
        integrand = integrand * x ** (2 * ni + 1)
    return float(np.sum(w * integrand))


def _projective_lhs(case: MomentCase, nodes: int) -> float:
    """Moment over x in (0, inf)^r written as x = S y, S = sum x, y on the simplex.

    S is compactified by S = t / (1 - t); y uses stick-breaking coordinates.
    A Cartesian cube in t_i would put a non-smooth singularity in the corner
    t = (1, ..., 1) whenever the decay exponent k + r - n is small.
    """
    p, n = case.params, case.n
    r = p.r
    pts, w = tensor_grid([semi_infinite(nodes)] + [gauss_legendre(nodes)] * (r - 1))
    total = pts[0]
    jac = total ** (r - 1)
    remaining = np.ones_like(total)
    integrand = projective_measure(p, total)
    for j in range(r):
        if j < r - 1:
            y = remaining * pts[j + 1]
            jac = jac * remaining
        else:
            y = remaining
        integrand = integrand * (total * y) ** n[j]
        remaining = remaining - y
    return float(np.sum(w * jac * integrand))


_LHS = {
    MeasureFamily.BESSEL: _bessel_lhs,
    MeasureFamily.BALL: _ball_lhs,
    MeasureFamily.PROJECTIVE: _projective_lhs,
}


def moment_residual(case: MomentCase, quad: QuadratureSpec = QuadratureSpec()) -> MomentResult:
    """Quadrature lhs, exact rhs and |lhs - rhs| / max(1, |rhs|) of one moment equation.

    The bessel family integrates each rho_i over (0, inf) in Cartesian form;
    the ball family uses hyperspherical coordinates on the positive ball
    section; the projective family uses total-plus-simplex coordinates.
    """
    label = f"{case.family.value} moment n={case.n} k={case.params.k} r={case.params.r}"
    lhs = refine(lambda m: _LHS[case.family](case, m), quad, label)
    rhs = float(moment_rhs(case))
    return MomentResult(lhs, rhs, _relative(lhs, rhs))


def simplex_rhs(params: SectorParams, n: Sequence[int]) -> Fraction:
    k, r = params.k, params.r
    f = math.factorial
    total = sum(n)
    return Fraction(math.prod(f(v) for v in n) * f(k - 1), f(k - 1 + total) * math.prod(range(k - r, k)))


def _simplex_lhs(params: SectorParams, n: Sequence[int], nodes: int) -> float:
    """Iterated integral over rho_1 + ... + rho_r < 1 with nested upper limits.

    Each rho_j = (1 - rho_1 - ... - rho_{j-1}) u_j with u_j in (0, 1).
    """
    k, r = params.k, params.r
    u, w = tensor_grid([gauss_legendre(nodes)] * r)
    remaining = np.ones_like(u[0])
    integrand = np.ones_like(u[0])
    for j in range(r):
        rho = remaining * u[j]
        integrand = integrand * remaining * rho ** n[j]
        remaining = remaining - rho
    integrand = integrand * remaining ** (k - r - 1)
    return float(np.sum(w * integrand))


def verify_simplex_identity(
    params: SectorParams, n: Sequence[int], quad: QuadratureSpec = QuadratureSpec(nodes=32)
) -> MomentResult:
    """Nested simplex integral of prod rho_i^n_i (1 - sum rho)^(k-r-1) against its closed form."""
    n = tuple(int(v) for v in n)
    if len(n) != params.r or any(v < 0 for v in n):
        raise InvalidParamsError(f"moment index {n} invalid for r={params.r}")
    if params.k <= params.r:
        raise InvalidParamsError(f"simplex identity needs k > r, got k={params.k}, r={params.r}")
    lhs = refine(lambda m: _simplex_lhs(params, n, m), quad, f"simplex n={n} k={params.k}")
    rhs = float(simplex_rhs(params, n))
    return MomentResult(lhs, rhs, _relative(lhs, rhs))


# -- r = 1 orthogonality ----------------------------------------------------------


def gram_matrix_r1(family, params: SectorParams, max_n: int, nodes: int = 128) -> np.ndarray:
    """<n|m> for 0 <= n, m <= max_n in the r = 1 analytic realization, by full complex quadrature.

    The label plane is integrated in polar form (radial Gauss-Legendre rule,
    angular trapezoid rule, exact for trigonometric polynomials).  The
    result should be the identity: the angular integral kills n != m and the
    radial moment equation fixes the diagonal.
    """
    from .bargmann import RealizationKind, basis_coefficient

    family = MeasureFamily.parse(family)
    if params.r != 1:
        raise InvalidParamsError("gram_matrix_r1 needs r = 1")
    kind = {
        MeasureFamily.BESSEL: RealizationKind.I,
        MeasureFamily.BALL: RealizationKind.II,
        MeasureFamily.PROJECTIVE: RealizationKind.FERMIONIC,
    }[family]
    if family is MeasureFamily.PROJECTIVE:
        max_n = min(max_n, params.k - 1)
    MomentCase(family, params, (max_n,))
    m_ang = 2 * max_n + 2
    theta = 2 * math.pi * np.arange(m_ang) / m_ang
    if family is MeasureFamily.BALL:
        rho, wr = gauss_legendre(nodes)
        weight = ball_measure(params, rho**2)
    else:
        rho, wr = semi_infinite(nodes)
        if family is MeasureFamily.BESSEL:
            weight = bessel_kernel(params, rho)
        else:
            # sigma = mu / pi with x = |zeta|^2
            weight = projective_measure(params, rho**2) / math.pi
    zeta = rho[:, None] * np.exp(1j * theta)[None, :]
    w = (wr * rho * weight)[:, None] * np.full(m_ang, 2 * math.pi / m_ang)[None, :]
    funcs = [basis_coefficient(kind, params, (j,)) * zeta**j for j in range(max_n + 1)]
    gram = np.empty((max_n + 1, max_n + 1), dtype=complex)
    for a, b in itertools.product(range(max_n + 1), repeat=2):
        gram[a, b] = np.sum(w * np.conj(funcs[a]) * funcs[b])
    return gram
