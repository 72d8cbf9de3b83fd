"""Commutator calculus and numerical certification of the defining identities.

Truncated bosonic bases only represent the algebra faithfully away from the
cutoff, so bosonic checks compare residual entries whose row and column both
lie in the interior shells ``total <= cutoff - margin``.  The margin equals the
number of raising steps an operator word can take above its input shell.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

from .errors import BasisMismatch, CutoffTooSmall, InvalidParamsError
from .fock import FockBasis, SparseOperator, hamiltonian_matrix, identity, ladder_set, zero
from .report import VerificationReport

TRIPLE_MARGIN = 2
HEISENBERG_MARGIN = 1


def commutator(a: SparseOperator, b: SparseOperator) -> SparseOperator:
    if a.shape != b.shape or a.tag != b.tag:
        raise BasisMismatch(f"cannot commute operators on {a.tag} {a.shape} and {b.tag} {b.shape}")
    return a @ b - b @ a


def triple_bracket(x: SparseOperator, y: SparseOperator, z: SparseOperator) -> SparseOperator:
    """[x, y, z] = [[x, y], z]."""
    return commutator(commutator(x, y), z)


def _delta(a: int, b: int) -> float:
    return 1.0 if a == b else 0.0


def _mask_for(basis: FockBasis, margin: int, masked: bool) -> tuple[np.ndarray | None, str]:
    if basis.params.finite:
        return None, "none (finite exact representation)"
    if not masked:
        return None, f"none (all shells total <= {basis.cutoff}, truncation artifacts included)"
    limit = basis.cutoff - margin
    return basis.interior(margin), f"rows and columns with total <= {limit} (margin {margin})"


def _run(tasks: Sequence, fn: Callable, workers: int) -> list:
    # map preserves task order, so reductions below are independent of thread count
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


def triple_relation_residuals(
    basis: FockBasis,
    raise_: Sequence[SparseOperator],
    lower: Sequence[SparseOperator],
    mask: np.ndarray | None = None,
    workers: int = 1,
) -> list[float]:
    """Residuals of both triple relations for every (i, j, k), plus mutual commutation.

    [[a_i^+, a_j^-], a_k^+] + s d_jk a_i^+ + s d_ij a_k^+ = 0
    [[a_i^+, a_j^-], a_k^-] - s d_ik a_j^- - s d_ij a_k^- = 0
    """
    s = basis.params.s
    r = basis.params.r

    def one(ijk):
        i, j, k = ijk
        inner = commutator(raise_[i], lower[j])
        up = commutator(inner, raise_[k]) + (s * _delta(j, k)) * raise_[i] + (s * _delta(i, j)) * raise_[k]
        down = commutator(inner, lower[k]) - (s * _delta(i, k)) * lower[j] - (s * _delta(i, j)) * lower[k]
        return [up.max_abs(mask, mask), down.max_abs(mask, mask)]

    out = []
    for pair in _run(list(itertools.product(range(r), repeat=3)), one, workers):
        out.extend(pair)
    for i, j in itertools.product(range(r), repeat=2):
        out.append(commutator(raise_[i], raise_[j]).max_abs(mask, mask))
        out.append(commutator(lower[i], lower[j]).max_abs(mask, mask))
    return out


def verify_triple_relations(
    basis: FockBasis, tol: float = 1e-10, masked: bool = True, workers: int = 1, ladders=None
) -> VerificationReport:
    """Certify the triple relations and mutual commutation on ``basis``.

    ``ladders`` optionally replaces the exact ``(raise, lower)`` matrices, e.g.
    to run a perturbed negative control.
    """
    if not basis.params.finite and basis.cutoff < TRIPLE_MARGIN + 1:
        raise CutoffTooSmall(f"triple relations need cutoff >= {TRIPLE_MARGIN + 1}, got {basis.cutoff}")
    mask, desc = _mask_for(basis, TRIPLE_MARGIN, masked)
    raise_, lower = ladder_set(basis) if ladders is None else ladders
    res = triple_relation_residuals(basis, raise_, lower, mask, workers)
    return VerificationReport.from_residuals(
        "triple_relations",
        res,
        tol,
        desc,
        basis.params.as_dict(),
        {"cutoff": basis.cutoff, "basis_size": basis.size, "identities_checked": len(res)},
    )


def verify_heisenberg(
    basis: FockBasis, tol: float = 1e-10, energies=None, masked: bool = True
) -> VerificationReport:
    """[H, a_i^{+-}] = +-e_i a_i^{+-} with H assembled from ladder commutators."""
    if not basis.params.finite and basis.cutoff < HEISENBERG_MARGIN + 1:
        raise CutoffTooSmall(f"Heisenberg check needs cutoff >= {HEISENBERG_MARGIN + 1}, got {basis.cutoff}")
    e = basis.params.energies if energies is None else tuple(float(x) for x in energies)
    mask, desc = _mask_for(basis, HEISENBERG_MARGIN, masked)
    h = hamiltonian_matrix(basis, "constructed", energies=e)
    raise_, lower = ladder_set(basis)
    res = []
    for i in range(basis.params.r):
        res.append((commutator(h, raise_[i]) - e[i] * raise_[i]).max_abs(mask, mask))
        res.append((commutator(h, lower[i]) + e[i] * lower[i]).max_abs(mask, mask))
    params = basis.params.as_dict()
    params["energies"] = list(e)
    return VerificationReport.from_residuals(
        "heisenberg", res, tol, desc, params, {"cutoff": basis.cutoff, "basis_size": basis.size}
    )


def random_combination(generators: Sequence[SparseOperator], rng: np.random.Generator) -> SparseOperator:
    coeffs = rng.uniform(-1.0, 1.0, size=len(generators))
    out = zero_like(generators[0])
    for c, g in zip(coeffs, generators):
        out = out + float(c) * g
    return out


def zero_like(op: SparseOperator) -> SparseOperator:
    return 0.0 * op


def _relative(terms: Sequence[SparseOperator], signs: Sequence[int]) -> float:
    # entries grow fast with the cutoff, so scale by the largest term (floor 1)
    total = terms[0] if signs[0] > 0 else -terms[0]
    for term, sign in zip(terms[1:], signs[1:]):
        total = total + term if sign > 0 else total - term
    return total.max_abs() / max(1.0, max(t.max_abs() for t in terms))


def lie_triple_residuals(x, y, z, u, v, w) -> list[float]:
    t = triple_bracket
    first = _relative([t(x, x, x)], [1])
    cyclic = _relative([t(x, y, z), t(y, z, x), t(z, x, y)], [1, 1, 1])
    derivation = _relative(
        [t(x, y, t(u, v, w)), t(t(x, y, u), v, w), t(u, t(x, y, v), w), t(u, v, t(x, y, w))],
        [1, -1, -1, -1],
    )
    return [first, cyclic, derivation]


def verify_lie_triple_axioms(
    generators: Sequence[SparseOperator], samples: int = 10, seed: int = 0, tol: float = 1e-10
) -> VerificationReport:
    """Check the three Lie-triple-system axioms on random real combinations.

    Coefficients are drawn uniformly from [-1, 1] by ``numpy.random.default_rng(seed)``.
    """
    if not generators:
        raise InvalidParamsError("need at least one generator")
    if samples < 1:
        raise InvalidParamsError("samples must be positive")
    rng = np.random.default_rng(seed)
    res = []
    for _ in range(samples):
        x, y, z, u, v, w = (random_combination(generators, rng) for _ in range(6))
        res.extend(lie_triple_residuals(x, y, z, u, v, w))
    return VerificationReport.from_residuals(
        "lie_triple_axioms",
        res,
        tol,
        "none (relative to the largest term, floor 1)",
        {},
        {"samples": samples, "seed": seed, "generators": len(generators), "rng": "numpy PCG64 uniform[-1,1]"},
    )


__all__ = [
    "commutator",
    "triple_bracket",
    "verify_triple_relations",
    "verify_heisenberg",
    "verify_lie_triple_axioms",
    "triple_relation_residuals",
    "VerificationReport",
    "identity",
    "zero",
]
