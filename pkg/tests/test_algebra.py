import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from arstats.algebra import (
    commutator,
    lie_triple_residuals,
    random_combination,
    triple_bracket,
    verify_heisenberg,
    verify_lie_triple_axioms,
    verify_triple_relations,
)
from arstats.errors import BasisMismatch, CutoffTooSmall
from arstats.fock import SectorParams, SparseOperator, enumerate_basis, identity, ladder_set


def basis(r, s, k, cutoff=None):
    return enumerate_basis(SectorParams(r=r, s=s, k=k), cutoff)


def dense(a, tag="t"):
    return SparseOperator(sp.csr_matrix(np.asarray(a, dtype=float)), tag)


class TestBrackets:
    def test_self_commutator(self):
        a = dense(np.arange(9).reshape(3, 3))
        assert commutator(a, a).max_abs() == 0.0

    def test_diagonals_commute(self):
        assert commutator(dense(np.diag([1, 2, 3])), dense(np.diag([4, -1, 0.5]))).max_abs() == 0.0

    def test_triple_examples(self):
        x = dense([[0, 1], [2, 3]])
        y = dense([[1, 0], [5, 2]])
        assert triple_bracket(x, x, x).max_abs() == 0.0
        assert triple_bracket(dense(np.eye(2)), x, y).max_abs() == 0.0

    def test_triple_matches_dense(self):
        rng = np.random.default_rng(3)
        x, y, z = (rng.normal(size=(4, 4)) for _ in range(3))
        ref = (x @ y - y @ x) @ z - z @ (x @ y - y @ x)
        assert np.allclose(triple_bracket(dense(x), dense(y), dense(z)).toarray(), ref, atol=1e-13)

    def test_mismatched_bases(self):
        with pytest.raises(BasisMismatch):
            commutator(dense(np.eye(2), "a"), dense(np.eye(2), "b"))

    def test_single_generator_cyclic(self):
        rng = np.random.default_rng(0)
        x, z = dense(rng.normal(size=(5, 5))), dense(rng.normal(size=(5, 5)))
        cyc = triple_bracket(x, x, z) + triple_bracket(x, z, x) + triple_bracket(z, x, x)
        assert cyc.max_abs() < 1e-12


class TestTripleRelations:
    def test_two_level_by_hand(self):
        # r=1, k=2 fermionic: [[a+, a-], a+] = -s (a+ + a+) = 2 a+
        b = basis(1, -1, 2)
        up, lo = ladder_set(b)
        assert np.array_equal(lo[0].toarray(), [[0.0, 1.0], [0.0, 0.0]])
        inner = commutator(up[0], lo[0]).toarray()
        assert np.array_equal(inner, np.diag([-1.0, 1.0]))
        lhs = inner @ up[0].toarray() - up[0].toarray() @ inner
        assert np.array_equal(lhs, 2 * up[0].toarray())

    @pytest.mark.parametrize("r", [1, 2, 3])
    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
    def test_fermionic_grid(self, r, k):
        rep = verify_triple_relations(basis(r, -1, k))
        assert rep.passed, rep
        assert rep.residual < 1e-12

    def test_fermionic_example(self):
        rep = verify_triple_relations(basis(2, -1, 3), tol=1e-10)
        assert rep.passed and rep.residual < 1e-12

    @pytest.mark.parametrize("r,k", [(1, 2), (2, 3), (2, 4), (3, 2)])
    def test_bosonic_masked(self, r, k):
        rep = verify_triple_relations(basis(r, 1, k, 8))
        assert rep.passed, rep
        assert "total <= 6" in rep.mask

    def test_bosonic_unmasked_fails(self):
        rep = verify_triple_relations(basis(2, 1, 3, 8), masked=False)
        assert not rep.passed
        assert rep.residual > 1.0

    def test_perturbed_control(self):
        b = basis(2, 1, 3, 8)
        up, lo = ladder_set(b)
        m = lo[0].matrix.tolil()
        row, col = b.index[(0, 1)], b.index[(1, 1)]
        m[row, col] += 1e-3
        lo = [SparseOperator(m.tocsr(), b.tag), lo[1]]
        rep = verify_triple_relations(b, ladders=(up, lo))
        assert not rep.passed
        assert rep.residual >= 1e-3

    def test_threads_bitwise(self):
        b = basis(3, -1, 5)
        one = verify_triple_relations(b, workers=1)
        four = verify_triple_relations(b, workers=4)
        assert one.as_dict() == four.as_dict()

    def test_small_cutoff(self):
        with pytest.raises(CutoffTooSmall):
            verify_triple_relations(basis(1, 1, 2, 2))


class TestHeisenberg:
    def test_fermionic_example(self):
        b = enumerate_basis(SectorParams(r=2, s=-1, k=4, energies=(1.0, 2.5)))
        rep = verify_heisenberg(b)
        assert rep.passed and rep.residual < 1e-12

    def test_zero_energies(self):
        rep = verify_heisenberg(basis(2, -1, 3), energies=(0.0, 0.0))
        assert rep.residual == 0.0

    def test_bosonic_masked(self):
        b = basis(1, 1, 2, 6)
        rep = verify_heisenberg(b)
        assert rep.passed
        assert "total <= 5" in rep.mask

    def test_bosonic_unmasked_fails(self):
        assert not verify_heisenberg(basis(1, 1, 2, 6), masked=False).passed

    @pytest.mark.parametrize("r", [1, 2, 3])
    @pytest.mark.parametrize("k", [1, 3, 6])
    def test_fermionic_grid(self, r, k):
        assert verify_heisenberg(basis(r, -1, k)).passed


class TestLieTriple:
    def test_generators(self):
        up, lo = ladder_set(basis(2, -1, 3))
        rep = verify_lie_triple_axioms(up + lo, samples=25, seed=42)
        assert rep.passed and rep.residual < 1e-10

    def test_deterministic(self):
        up, lo = ladder_set(basis(2, 1, 3, 6))
        a = verify_lie_triple_axioms(up + lo, samples=5, seed=7)
        b = verify_lie_triple_axioms(up + lo, samples=5, seed=7)
        assert a == b

    def test_random_combination_in_span(self):
        gens = [identity(basis(1, -1, 3))]
        c = random_combination(gens, np.random.default_rng(1))
        d = c.toarray()
        assert np.allclose(d, d[0, 0] * np.eye(3)) and -1 <= d[0, 0] <= 1

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_axioms_any_matrices(self, seed):
        rng = np.random.default_rng(seed)
        ops = [dense(rng.uniform(-1, 1, size=(4, 4))) for _ in range(6)]
        assert max(lie_triple_residuals(*ops)) < 1e-12
