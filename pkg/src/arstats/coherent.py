"""Coherent-state families as amplitude vectors over a Fock basis.

GK   annihilation eigenstates built from realization I, labels omega in C^r
KP   Klauder-Perelomov states from realization II, labels z in the unit ball
CPR  projective states of the fermionic sector, labels zeta in C^r

Amplitudes are C_n x^n times a normalization.  Shell sums close in form:
summing C_n^2 |x^n|^2 over |n| = t gives

    GK:  (k-1)! R^t / (t! (k-1+t)!)          R = sum |omega_i|^2
    KP:  binom(k-1+t, t) R^t                  (total (1 - R)^-k)
    CPR: binom(k-1, t) R^t                    (total (1 + R)^(k-1))

which is what the truncation tails below are computed from.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .bargmann import RealizationKind, basis_coefficient
from .errors import BasisMismatch, CutoffTooSmall, DomainError, InvalidParamsError
from .fock import LOWER, FockBasis, SectorParams, enumerate_basis, ladder_matrix
from .report import VerificationReport

MAX_CUTOFF = 1024
SERIES_TOL = 1e-14


class Family(enum.Enum):
    GK = "gk"
    KP = "kp"
    CPR = "cpr"

    @classmethod
    def parse(cls, value) -> "Family":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidParamsError(f"unknown coherent family {value!r}") from None

    @property
    def sector(self) -> int:
        return -1 if self is Family.CPR else 1

    @property
    def realization(self) -> RealizationKind:
        return {
            Family.GK: RealizationKind.I,
            Family.KP: RealizationKind.II,
            Family.CPR: RealizationKind.FERMIONIC,
        }[self]


@dataclass(frozen=True)
class CoherentPoint:
    family: Family
    coords: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        coords = tuple(complex(c) for c in np.atleast_1d(self.coords))
        object.__setattr__(self, "coords", coords)
        if self.family is Family.KP and self.radius2 >= 1.0:
            raise DomainError(f"KP label must lie in the open unit ball, got sum |z|^2 = {self.radius2}")

    @property
    def radius2(self) -> float:
        return float(sum(abs(c) ** 2 for c in self.coords))


@dataclass(frozen=True)
class CoherentState:
    point: CoherentPoint
    basis: FockBasis
    amplitudes: np.ndarray
    tail: float

    @property
    def norm2(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


def _point(family: Family, params: SectorParams, point) -> CoherentPoint:
    if not isinstance(point, CoherentPoint):
        point = CoherentPoint(family, point)
    if point.family is not family:
        raise InvalidParamsError(f"point belongs to {point.family.value}, expected {family.value}")
    if len(point.coords) != params.r:
        raise InvalidParamsError(f"point has {len(point.coords)} coordinates, r={params.r}")
    if family.sector != params.s:
        raise InvalidParamsError(f"family {family.value} needs s={family.sector:+d}")
    return point


def _log_shell(family: Family, k: int, t: int, log_r: float) -> float:
    """log of the shell-t contribution to the unnormalized norm."""
    lg = math.lgamma
    if family is Family.GK:
        return lg(k) - lg(t + 1) - lg(k + t) + t * log_r
    if family is Family.KP:
        return lg(k + t) - lg(t + 1) - lg(k) + t * log_r
    return lg(k) - lg(t + 1) - lg(k - t) + t * log_r


def _shell_ratio_bound(family: Family, k: int, t: int, r2: float) -> float:
    """Upper bound on S_{u+1}/S_u for every u >= t."""
    if family is Family.GK:
        return r2 / ((t + 1) * (k + t))
    return (k + t) / (t + 1) * r2


def series_tail(family: Family, params: SectorParams, r2: float, cutoff: int) -> float:
    """Fraction of the squared norm carried by shells above ``cutoff``."""
    if family is Family.CPR or r2 == 0.0:
        return 0.0
    k = params.k
    log_r = math.log(r2)
    log_total = math.log(gk_norm2(k, r2)) if family is Family.GK else -k * math.log1p(-r2)
    tail = 0.0
    t = cutoff + 1
    while True:
        term = math.exp(_log_shell(family, k, t, log_r) - log_total)
        tail += term
        q = _shell_ratio_bound(family, k, t, r2)
        if term == 0.0:
            return tail
        if q < 1.0 and term * q / (1.0 - q) <= 1e-6 * tail:
            # geometric bound on the remainder keeps the result an upper bound
            return min(tail + term * q / (1.0 - q), 1.0)
        t += 1


def gk_norm2(k: int, r2: float) -> float:
    """sum_n C_n^2 |omega^n|^2 for realization I, summed shell by shell.

    Shell terms obey S_{t+1} = S_t R / ((t+1)(k+t)); the sum stops once the
    geometric bound on what remains is below 1e-14 of the running total.
    """
    total, term, t = 1.0, 1.0, 0
    while True:
        term *= r2 / ((t + 1) * (k + t))
        total += term
        t += 1
        q = r2 / ((t + 1) * (k + t))
        if q < 1.0 and term * q / (1.0 - q) < SERIES_TOL * total:
            return total


def normalization_constant(family, params: SectorParams, point) -> float:
    """Normalization constant N of the family at ``point``.

    GK:  N = sqrt(sum_n C_n^2 |omega^n|^2); the state is N^-1 sum C_n omega^n |n>.
    KP:  N = (1 - sum |z|^2)^(k/2);         the state is N sum C_n z^n |n>.
    CPR: N = (1 + sum |zeta|^2)^(-(k-1)/2); the state is N sum C_n zeta^n |n>.
    """
    family = Family.parse(family)
    point = _point(family, params, point)
    r2 = point.radius2
    if family is Family.GK:
        return math.sqrt(gk_norm2(params.k, r2))
    if family is Family.KP:
        return (1.0 - r2) ** (params.k / 2)
    return (1.0 + r2) ** (-(params.k - 1) / 2)


def _scale(family: Family, params: SectorParams, point: CoherentPoint) -> float:
    n = normalization_constant(family, params, point)
    return 1.0 / n if family is Family.GK else n


def _monomials(basis: FockBasis, coords: Sequence[complex]) -> np.ndarray:
    exps = np.array(basis.states, dtype=int).reshape(basis.size, -1)
    out = np.ones(basis.size, dtype=complex)
    for i, x in enumerate(coords):
        out *= np.power(complex(x), exps[:, i])
    return out


def _log_coefficients(family: Family, basis: FockBasis) -> np.ndarray:
    k = basis.params.k
    exps = np.array(basis.states, dtype=float).reshape(basis.size, -1)
    t = exps.sum(axis=1)
    prod = gammaln(exps + 1).sum(axis=1)
    if family is Family.GK:
        return 0.5 * (gammaln(k) - prod - gammaln(k + t))
    return 0.5 * (gammaln(k + t) - prod - gammaln(k))


def _build(family: Family, params: SectorParams, point: CoherentPoint, cutoff: int) -> CoherentState:
    if family is Family.CPR:
        basis = enumerate_basis(params)
        coeffs = np.array([basis_coefficient(RealizationKind.FERMIONIC, params, n) for n in basis.states])
    else:
        basis = enumerate_basis(params, cutoff)
        coeffs = np.exp(_log_coefficients(family, basis))
    raw = _scale(family, params, point) * coeffs * _monomials(basis, point.coords)
    tail = series_tail(family, params, point.radius2, basis.cutoff)
    norm = math.sqrt(float(np.sum(np.abs(raw) ** 2)))
    amps = raw if family is Family.CPR else raw / norm
    return CoherentState(point, basis, amps, tail)


def coherent_amplitudes(
    family, params: SectorParams, point, cutoff: int | None = None, tail_tol: float | None = None
) -> CoherentState:
    """Coherent state of ``family`` at ``point`` as a normalized amplitude vector.

    GK and KP series are truncated at ``cutoff``; without one the cutoff doubles
    from 8 until the neglected squared-norm fraction is below ``tail_tol``
    (default 1e-12).  The recorded ``tail`` is that fraction, i.e. one minus the
    squared norm before renormalization.  CPR states are finite and exact; their
    amplitudes are left unrenormalized.
    """
    family = Family.parse(family)
    point = _point(family, params, point)
    if family is Family.CPR:
        return _build(family, params, point, params.k - 1)
    if cutoff is not None:
        if cutoff < 0:
            raise CutoffTooSmall("cutoff must be non-negative")
        state = _build(family, params, point, cutoff)
        if tail_tol is not None and state.tail > tail_tol:
            raise CutoffTooSmall(f"cutoff {cutoff} leaves tail {state.tail:.3e} > {tail_tol:.3e}")
        return state
    target = 1e-12 if tail_tol is None else tail_tol
    cutoff = 8
    while series_tail(family, params, point.radius2, cutoff) > target:
        cutoff *= 2
        if cutoff > MAX_CUTOFF:
            raise CutoffTooSmall(f"tail {target:.1e} not reached below cutoff {MAX_CUTOFF}")
    return _build(family, params, point, cutoff)


def overlap(a: CoherentState, b: CoherentState) -> complex:
    """<a|b> = sum_n conj(a_n) b_n."""
    if a.point.family is not b.point.family:
        raise InvalidParamsError("overlap between different families")
    if a.basis.params != b.basis.params or a.basis.tag != b.basis.tag:
        raise BasisMismatch(f"states live on {a.basis.tag} and {b.basis.tag}")
    # real arithmetic keeps overlap(a, b) == conj(overlap(b, a)) bit for bit
    ar, ai = a.amplitudes.real, a.amplitudes.imag
    br, bi = b.amplitudes.real, b.amplitudes.imag
    return complex(float(np.sum(ar * br + ai * bi)), float(np.sum(ar * bi - ai * br)))


def overlap_kernel(family, params: SectorParams, left, right) -> complex:
    """Closed-form <left|right> for untruncated states."""
    family = Family.parse(family)
    left = _point(family, params, left)
    right = _point(family, params, right)
    w = sum(np.conj(x) * y for x, y in zip(left.coords, right.coords))
    k = params.k
    if family is Family.KP:
        return complex(
            (1 - left.radius2) ** (k / 2) * (1 - right.radius2) ** (k / 2) * (1 - w) ** (-k)
        )
    if family is Family.CPR:
        return complex(
            (1 + left.radius2) ** (-(k - 1) / 2) * (1 + right.radius2) ** (-(k - 1) / 2) * (1 + w) ** (k - 1)
        )
    # GK: sum_t (k-1)! w^t / (t! (k-1+t)!) until terms are negligible
    total, term, t = 1 + 0j, 1 + 0j, 0
    while True:
        term *= w / ((t + 1) * (k + t))
        total += term
        t += 1
        if abs(term) < SERIES_TOL * abs(total) and abs(w) < (t + 1) * (k + t):
            break
    nl = normalization_constant(family, params, left)
    nr = normalization_constant(family, params, right)
    return complex(total / (nl * nr))


def annihilation_residuals(state: CoherentState) -> tuple[list[float], list[float]]:
    """Per-mode ||(a_i^- - omega_i) psi||, over all shells and over totals <= cutoff - 1.

    Lowering is exact on a truncated basis, so the all-shell norm is the true
    residual of the truncated vector in the full Fock space: the interior part
    is roundoff and the top shell carries -omega_i psi_top.
    """
    basis = state.basis
    inner = basis.interior(1)
    full, interior = [], []
    for i, w in enumerate(state.point.coords):
        v = ladder_matrix(basis, i, LOWER).dot(state.amplitudes) - w * state.amplitudes
        full.append(float(np.linalg.norm(v)))
        interior.append(float(np.linalg.norm(v[inner])))
    return full, interior


def verify_annihilation_eigenstate(
    params: SectorParams, point, cutoff: int | None = None, tol: float = 1e-10, state: CoherentState | None = None
) -> VerificationReport:
    """Certify a_i^- |k; omega> = omega_i |k; omega> on a truncated GK state.

    Without ``cutoff`` the cutoff doubles from 4 until the residual is below
    tol / 10.  A prebuilt ``state`` (of any family) may be passed instead,
    which is how non-eigenstates are shown to fail.
    """
    if state is None:
        if params.s != 1:
            raise InvalidParamsError("GK states exist only in the bosonic sector")
        if cutoff is None:
            cutoff = 4
            while True:
                state = coherent_amplitudes(Family.GK, params, point, cutoff)
                if max(annihilation_residuals(state)[0]) < tol / 10:
                    break
                cutoff *= 2
                if cutoff > MAX_CUTOFF:
                    raise CutoffTooSmall(f"residual {tol / 10:.1e} not reached below cutoff {MAX_CUTOFF}")
        else:
            state = coherent_amplitudes(Family.GK, params, point, cutoff)
    full, interior = annihilation_residuals(state)
    return VerificationReport.from_residuals(
        f"annihilation_eigenstate[{state.point.family.value}]",
        full,
        tol,
        f"all shells total <= {state.basis.cutoff}; top shell carries the truncation residual",
        state.basis.params.as_dict(),
        {
            "cutoff": state.basis.cutoff,
            "tail": state.tail,
            "interior_residual": max(interior),
            "point": [[c.real, c.imag] for c in state.point.coords],
        },
    )
