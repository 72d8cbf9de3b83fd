"""Fock representations of the generalized A_r statistics.

States are occupation tuples ``(n_1, ..., n_r)``.  The Jacobson generators act as

    a_i^- |n> = sqrt(F_i(n)) |n - e_i>,    F_i(n) = n_i * (k0 + s * |n|)

with ``k0 = k - (1 + s) / 2``.  For ``s = -1`` the representation is finite
(``|n| <= k - 1``); for ``s = +1`` it is infinite and we truncate at a total
occupation ``cutoff``, sending raises out of the top shell to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import BasisMismatch, CutoffTooSmall, InvalidParamsError, PauliViolation

OccupationVector = tuple[int, ...]

RAISE = "raise"
LOWER = "lower"


@dataclass(frozen=True)
class SectorParams:
    """Defining data of one generalized A_r algebra.

    ``energies`` defaults to unit mode energies.  ``epsilon`` is kept only as
    metadata: all computation uses the rescaled generators a = x / sqrt(|epsilon|).
    """

    r: int
    s: int
    k: int
    energies: tuple[float, ...] | None = None
    epsilon: float | None = None

    def __post_init__(self):
        if isinstance(self.r, bool) or not isinstance(self.r, (int, np.integer)) or self.r < 1:
            raise InvalidParamsError(f"r must be a positive integer, got {self.r!r}")
        if self.s not in (1, -1):
            raise InvalidParamsError(f"s must be +1 or -1, got {self.s!r}")
        if isinstance(self.k, bool) or not isinstance(self.k, (int, np.integer)):
            raise InvalidParamsError(f"k must be an integer, got {self.k!r}")
        if self.s == 1 and self.k < 2:
            raise InvalidParamsError(f"bosonic sector needs k >= 2 (k0 = k - 1 >= 1), got k={self.k}")
        if self.s == -1 and self.k < 1:
            raise InvalidParamsError(f"fermionic sector needs k >= 1, got k={self.k}")
        if self.epsilon is not None:
            if self.epsilon == 0:
                raise InvalidParamsError("epsilon must be nonzero")
            if math.copysign(1, self.epsilon) != self.s:
                raise InvalidParamsError(f"s={self.s} disagrees with sign of epsilon={self.epsilon}")
        energies = self.energies
        if energies is None:
            energies = (1.0,) * self.r
        energies = tuple(float(e) for e in energies)
        if len(energies) != self.r:
            raise InvalidParamsError(f"expected {self.r} mode energies, got {len(energies)}")
        if any(not e > 0 for e in energies):
            raise InvalidParamsError(f"mode energies must be strictly positive, got {energies}")
        object.__setattr__(self, "r", int(self.r))
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "energies", energies)

    @classmethod
    def from_epsilon(cls, r: int, epsilon: float, k: int, energies=None) -> "SectorParams":
        return cls(r=r, s=1 if epsilon > 0 else -1, k=k, energies=energies, epsilon=epsilon)

    @property
    def k0(self) -> int:
        return self.k - (1 + self.s) // 2

    @property
    def finite(self) -> bool:
        return self.s == -1

    @property
    def max_total(self) -> int | None:
        """Largest admissible total occupation, or None for the bosonic sector."""
        return self.k - 1 if self.s == -1 else None

    def as_dict(self) -> dict:
        return {
            "r": self.r,
            "s": self.s,
            "k": self.k,
            "k0": self.k0,
            "energies": list(self.energies),
            "epsilon": self.epsilon,
        }


def check_state(params: SectorParams, n: Sequence[int]) -> OccupationVector:
    n = tuple(int(v) for v in n)
    if len(n) != params.r:
        raise InvalidParamsError(f"occupation {n} has {len(n)} entries, expected r={params.r}")
    if any(v < 0 for v in n):
        raise InvalidParamsError(f"occupation {n} has a negative entry")
    if params.s == -1 and sum(n) > params.k - 1:
        raise PauliViolation(f"total {sum(n)} of {n} exceeds the Pauli bound k-1={params.k - 1}")
    return n


def _check_mode(params: SectorParams, i: int) -> None:
    if not 0 <= i < params.r:
        raise InvalidParamsError(f"mode index {i} out of range 0..{params.r - 1}")


def _compositions(total: int, parts: int) -> Iterator[OccupationVector]:
    # lexicographic order: first entry ascending, then the rest recursively
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def graded_lex(r: int, cutoff: int) -> list[OccupationVector]:
    """All r-tuples with total <= cutoff, by ascending total then lexicographic."""
    states = []
    for total in range(cutoff + 1):
        states.extend(_compositions(total, r))
    return states


@dataclass(frozen=True)
class FockBasis:
    params: SectorParams
    cutoff: int
    states: tuple[OccupationVector, ...]
    index: dict = field(repr=False, compare=False)

    @property
    def size(self) -> int:
        return len(self.states)

    def __len__(self) -> int:
        return len(self.states)

    @property
    def tag(self) -> str:
        p = self.params
        return f"s={p.s:+d},r={p.r},k={p.k},cutoff={self.cutoff}"

    @property
    def totals(self) -> np.ndarray:
        return np.fromiter((sum(n) for n in self.states), dtype=int, count=self.size)

    def interior(self, margin: int) -> np.ndarray:
        """Boolean mask of states whose total is at least ``margin`` below the cutoff.

        Finite (fermionic) bases are exact representations, so every state is interior.
        """
        if self.params.finite:
            return np.ones(self.size, dtype=bool)
        return self.totals <= self.cutoff - margin

    def unit(self, n: Sequence[int]) -> np.ndarray:
        v = np.zeros(self.size)
        v[self.index[tuple(n)]] = 1.0
        return v


def enumerate_basis(params: SectorParams, cutoff: int | None = None) -> FockBasis:
    """Graded-lexicographic Fock basis.

    For ``s = -1`` the cutoff is forced to ``k - 1``; passing any other value is
    an error.  For ``s = +1`` a non-negative cutoff is required.
    """
    if params.s == -1:
        if cutoff is not None and cutoff != params.k - 1:
            raise CutoffTooSmall(
                f"fermionic basis is fixed at cutoff k-1={params.k - 1}, got {cutoff}"
            )
        cutoff = params.k - 1
    else:
        if cutoff is None or cutoff < 0:
            raise CutoffTooSmall(f"bosonic basis needs a non-negative cutoff, got {cutoff}")
    states = tuple(graded_lex(params.r, cutoff))
    return FockBasis(params, int(cutoff), states, {n: j for j, n in enumerate(states)})


def fermionic_dimension(r: int, k: int) -> int:
    return math.factorial(k - 1 + r) // (math.factorial(k - 1) * math.factorial(r))


def structure_function_exact(params: SectorParams, n: Sequence[int], i: int) -> int:
    n = check_state(params, n)
    _check_mode(params, i)
    return n[i] * (params.k0 + params.s * sum(n))


def structure_function(params: SectorParams, n: Sequence[int], i: int) -> float:
    """F_i(n) = n_i (k0 + s |n|), the squared amplitude of a_i^- on |n>."""
    return float(structure_function_exact(params, n, i))


@dataclass(frozen=True)
class SparseOperator:
    """A real CSR matrix tagged with the basis it acts on."""

    matrix: sp.csr_matrix
    tag: str

    def __post_init__(self):
        m = sp.csr_matrix(self.matrix)
        m.eliminate_zeros()
        m.sort_indices()
        object.__setattr__(self, "matrix", m)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def _other(self, other: "SparseOperator") -> sp.csr_matrix:
        if not isinstance(other, SparseOperator):
            return NotImplemented
        if other.tag != self.tag or other.shape != self.shape:
            raise BasisMismatch(f"operator on {self.tag} {self.shape} vs {other.tag} {other.shape}")
        return other.matrix

    def __add__(self, other):
        m = self._other(other)
        if m is NotImplemented:
            return m
        return SparseOperator(self.matrix + m, self.tag)

    def __sub__(self, other):
        m = self._other(other)
        if m is NotImplemented:
            return m
        return SparseOperator(self.matrix - m, self.tag)

    def __matmul__(self, other):
        m = self._other(other)
        if m is NotImplemented:
            return m
        return SparseOperator(self.matrix @ m, self.tag)

    def __mul__(self, scalar):
        if isinstance(scalar, SparseOperator):
            return NotImplemented
        return SparseOperator(self.matrix * float(scalar), self.tag)

    __rmul__ = __mul__

    def __neg__(self):
        return SparseOperator(-self.matrix, self.tag)

    @property
    def T(self) -> "SparseOperator":
        return SparseOperator(self.matrix.T, self.tag)

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def dot(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ v

    def max_abs(self, rows: np.ndarray | None = None, cols: np.ndarray | None = None) -> float:
        m = self.matrix
        if rows is not None:
            m = m[np.flatnonzero(rows)]
        if cols is not None:
            m = m[:, np.flatnonzero(cols)]
        return float(abs(m).max()) if m.nnz else 0.0


def identity(basis: FockBasis) -> SparseOperator:
    return SparseOperator(sp.identity(basis.size, format="csr"), basis.tag)


def zero(basis: FockBasis) -> SparseOperator:
    return SparseOperator(sp.csr_matrix((basis.size, basis.size)), basis.tag)


def diagonal(basis: FockBasis, values: Iterable[float]) -> SparseOperator:
    return SparseOperator(sp.diags(np.asarray(list(values), dtype=float), format="csr"), basis.tag)


def ladder_matrix(basis: FockBasis, i: int, direction: str) -> SparseOperator:
    """Matrix of a_i^- (``"lower"``) or a_i^+ (``"raise"``) on ``basis``.

    The raising matrix is the exact transpose of the lowering one, so raises out
    of a truncated bosonic basis are dropped.
    """
    params = basis.params
    _check_mode(params, i)
    if direction not in (RAISE, LOWER):
        raise InvalidParamsError(f"direction must be 'raise' or 'lower', got {direction!r}")
    rows, cols, vals = [], [], []
    for col, n in enumerate(basis.states):
        if n[i] == 0:
            continue
        f = n[i] * (params.k0 + params.s * sum(n))
        if f == 0:
            continue
        m = list(n)
        m[i] -= 1
        rows.append(basis.index[tuple(m)])
        cols.append(col)
        vals.append(math.sqrt(f))
    lower = sp.csr_matrix((vals, (rows, cols)), shape=(basis.size, basis.size))
    return SparseOperator(lower if direction == LOWER else lower.T, basis.tag)


def ladder_set(basis: FockBasis) -> tuple[list[SparseOperator], list[SparseOperator]]:
    """(raise_i, lower_i) for every mode."""
    lower = [ladder_matrix(basis, i, LOWER) for i in range(basis.params.r)]
    return [a.T for a in lower], lower


def number_matrix(basis: FockBasis, i: int) -> SparseOperator:
    """N_i |n> = n_i |n>.  This is not a_i^+ a_i^-."""
    _check_mode(basis.params, i)
    return diagonal(basis, (n[i] for n in basis.states))


def vacuum_constant(params: SectorParams) -> float:
    """Shift c in h_i that puts the vacuum at zero energy.

    On |n>, (r+1)[a_i^-, a_i^+] - sum_j [a_j^-, a_j^+] = k0 + s + s (r+1) n_i, so
    h_i = n_i + (s k0 + 1)/(r + 1) + c and the vacuum needs c = -(s k0 + 1)/(r + 1).
    """
    return -(params.s * params.k0 + 1) / (params.r + 1)


def mode_hamiltonians(basis: FockBasis) -> list[SparseOperator]:
    params = basis.params
    r, s = params.r, params.s
    raise_, lower = ladder_set(basis)
    comm = [lower[j] @ raise_[j] - raise_[j] @ lower[j] for j in range(r)]
    total = comm[0]
    for c in comm[1:]:
        total = total + c
    shift = vacuum_constant(params) * identity(basis)
    return [(s / (r + 1)) * ((r + 1) * comm[i] - total) + shift for i in range(r)]


def hamiltonian_matrix(basis: FockBasis, mode: str = "diagonal", energies=None) -> SparseOperator:
    """H = sum_i e_i h_i.

    ``mode="diagonal"`` uses H|n> = sum_i e_i n_i |n>; ``mode="constructed"``
    assembles h_i from ladder commutators.  The two agree on every state of a
    fermionic basis and on totals <= cutoff - 1 of a truncated bosonic one.
    ``energies`` overrides ``basis.params.energies`` (no positivity check).
    """
    e = basis.params.energies if energies is None else tuple(float(x) for x in energies)
    if len(e) != basis.params.r:
        raise InvalidParamsError(f"expected {basis.params.r} energies, got {len(e)}")
    if mode == "diagonal":
        return diagonal(basis, (sum(ei * ni for ei, ni in zip(e, n)) for n in basis.states))
    if mode == "constructed":
        h = mode_hamiltonians(basis)
        out = zero(basis)
        for ei, hi in zip(e, h):
            out = out + ei * hi
        return out
    raise InvalidParamsError(f"mode must be 'diagonal' or 'constructed', got {mode!r}")


class BoseDeviation(NamedTuple):
    k: int
    deviation: float


def bose_limit_deviation(
    r: int, s: int, k_list: Sequence[int], probe_total: int, cutoff: int | None = None
) -> list[BoseDeviation]:
    """Max |entry of a^{+-}/sqrt(k) - Bose entry| over states with total <= probe_total.

    Entries come straight from the structure function; no basis matrix is
    built, so k = 10**4 fermionic sectors stay cheap.  Bose entries are
    sqrt(n_i) (lowering) and sqrt(n_i + 1) (raising).
    """
    if probe_total < 0:
        raise InvalidParamsError("probe_total must be non-negative")
    if cutoff is not None and cutoff < probe_total + 1:
        raise CutoffTooSmall(f"cutoff {cutoff} must be >= probe_total + 1 = {probe_total + 1}")
    out = []
    for k in k_list:
        params = SectorParams(r=r, s=s, k=int(k))
        if params.s == -1 and params.k - 1 < probe_total + 1:
            raise CutoffTooSmall(
                f"k={k}: fermionic states above total {params.k - 1} do not exist; "
                f"probe_total={probe_total} needs k >= {probe_total + 2}"
            )
        worst = 0.0
        for n in graded_lex(r, probe_total):
            for i in range(r):
                if n[i] > 0:
                    a = math.sqrt(structure_function_exact(params, n, i) / k)
                    worst = max(worst, abs(a - math.sqrt(n[i])))
                up = list(n)
                up[i] += 1
                a = math.sqrt(structure_function_exact(params, up, i) / k)
                worst = max(worst, abs(a - math.sqrt(n[i] + 1)))
        out.append(BoseDeviation(int(k), worst))
    return out


def bose_limit_constant(deviations: Sequence[BoseDeviation], probe_total: int) -> float:
    """Smallest C with deviation <= C (probe_total + 1) / k over the given sweep."""
    return max(d.deviation * d.k / (probe_total + 1) for d in deviations)
