from __future__ import annotations

import random
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import contracted_square, random_connected_multigraph, random_sinked_graph
from oracles import (
    det_by_permutation_expansion,
    membership_by_rational_solve,
    spanning_tree_count,
)
from sandpiles.errors import InfiniteCokernel
from sandpiles.graphs import (
    SinkedGraph,
    build_multigraph,
    cone,
    cycle_graph,
    hypercube,
    k2,
    thick_k2_cone,
    to_sink_digraph,
)
from sandpiles.intlinalg import (
    IntMatrix,
    determinant,
    invariant_factors,
    laplacian,
    lattice_membership,
    matrix_is_unimodular,
    reduced_laplacian,
    smith_normal_form,
)

matrices = st.integers(1, 8).flatmap(
    lambda n: st.integers(1, 8).flatmap(
        lambda m: st.lists(
            st.lists(st.integers(-9, 9), min_size=m, max_size=m),
            min_size=n,
            max_size=n,
        )
    )
).map(IntMatrix.from_rows)

square_matrices = st.integers(1, 6).flatmap(
    lambda n: st.lists(
        st.lists(st.integers(-9, 9), min_size=n, max_size=n),
        min_size=n,
        max_size=n,
    )
).map(IntMatrix.from_rows)


class TestLaplacian:
    def test_single_edge(self):
        assert laplacian(k2()).entries == ((1, -1), (-1, 1))

    def test_triangle_diagonal(self):
        lap = laplacian(cone(k2()))
        assert lap.diagonal() == (2, 2, 2)
        assert all(sum(row) == 0 for row in lap.entries)

    def test_thick_digraph_block(self):
        lap = laplacian(thick_k2_cone(2, 3))
        assert lap.entries == ((3, -2, -1), (-3, 4, -1), (0, 0, 0))

    def test_row_sums_zero_for_digraphs(self):
        g = to_sink_digraph(cone(cycle_graph(4)).graph, "s")
        assert all(sum(row) == 0 for row in laplacian(g).entries)


class TestReducedLaplacian:
    def test_cone_of_edge(self):
        g = cone(hypercube(1))
        lap = reduced_laplacian(g)
        assert lap.entries == ((2, -1), (-1, 2))
        assert determinant(lap) == 3

    def test_cone_of_pentagon(self):
        assert determinant(reduced_laplacian(cone(cycle_graph(5)))) == 121

    def test_cone_of_square(self):
        assert determinant(reduced_laplacian(cone(hypercube(2)))) == 45


class TestSmithNormalForm:
    def test_two_by_two(self):
        dec = smith_normal_form(IntMatrix.from_rows([[2, -1], [-1, 2]]))
        assert dec.diagonal() == (1, 3)

    def test_identity(self):
        dec = smith_normal_form(IntMatrix.identity(3))
        assert dec.diagonal() == (1, 1, 1)

    def test_zero(self):
        dec = smith_normal_form(IntMatrix.zero(2, 2))
        assert dec.diagonal() == (0, 0)

    def test_rectangular(self):
        a = IntMatrix.from_rows([[2, 4, 4]])
        dec = smith_normal_form(a)
        assert dec.diagonal() == (2,)
        assert dec.u.mul(a).mul(dec.v) == dec.d

    @given(matrices)
    @settings(max_examples=120, deadline=None)
    def test_postconditions(self, a):
        dec = smith_normal_form(a)
        assert dec.u.mul(a).mul(dec.v) == dec.d
        assert matrix_is_unimodular(dec.u)
        assert matrix_is_unimodular(dec.v)
        diag = dec.diagonal()
        assert all(x >= 0 for x in diag)
        for x, y in zip(diag, diag[1:]):
            if x == 0:
                assert y == 0
            else:
                assert y % x == 0
        for i in range(dec.d.rows):
            for j in range(dec.d.cols):
                if i != j:
                    assert dec.d.entries[i][j] == 0

    def test_deterministic(self):
        a = IntMatrix.from_rows([[6, 4, 2], [2, 8, 4], [4, 2, 6]])
        assert smith_normal_form(a) == smith_normal_form(a)


class TestDeterminant:
    def test_triple_cone_of_edge(self):
        assert determinant(reduced_laplacian(cone(hypercube(1), 3))) == 15

    def test_singular(self):
        assert determinant(IntMatrix.from_rows([[1, 2], [2, 4]])) == 0

    @given(square_matrices)
    @settings(max_examples=80, deadline=None)
    def test_against_permutation_expansion(self, a):
        if a.rows <= 4:
            assert determinant(a) == det_by_permutation_expansion(a)

    def test_matrix_tree(self):
        rng = random.Random(11)
        for _ in range(15):
            g = random_connected_multigraph(rng, rng.randint(2, 5), max_mult=2)
            if sum(m for _, _, m in g.edges()) > 10:
                continue
            trees = spanning_tree_count(g)
            for sink in g.vertices:
                lap = reduced_laplacian(SinkedGraph(g, sink))
                assert determinant(lap) == trees


class TestInvariantFactors:
    def test_prism_cone(self):
        from sandpiles.graphs import cartesian_product

        g = cone(cartesian_product(cycle_graph(5), k2()))
        structure = invariant_factors(reduced_laplacian(g))
        assert structure.invariant_factors == (319, 957)
        assert structure.order == 319 * 957

    def test_square_cone(self):
        structure = invariant_factors(reduced_laplacian(cone(hypercube(2))))
        assert structure.invariant_factors == (3, 15)
        assert structure.elementary_divisors == (3, 3, 5)

    def test_contracted_square(self):
        structure = invariant_factors(reduced_laplacian(contracted_square()))
        assert structure.invariant_factors == (2, 48)

    def test_infinite_cokernel(self):
        with pytest.raises(InfiniteCokernel) as err:
            invariant_factors(IntMatrix.from_rows([[1, 2], [2, 4]]))
        assert err.value.free_rank == 1

    def test_trivial_group(self):
        structure = invariant_factors(IntMatrix.from_rows([[1, 0], [4, 1]]))
        assert structure.invariant_factors == ()
        assert structure.order == 1

    @given(square_matrices)
    @settings(max_examples=80, deadline=None)
    def test_matches_transform_snf(self, a):
        if determinant(a) == 0:
            return
        fast = invariant_factors(a).invariant_factors
        slow = tuple(d for d in smith_normal_form(a).diagonal() if d != 1)
        assert fast == slow

    def test_sink_independence(self):
        rng = random.Random(23)
        graphs = [cycle_graph(5), contracted_square().graph]
        graphs += [random_connected_multigraph(rng, rng.randint(3, 7)) for _ in range(6)]
        for g in graphs:
            seen = {
                invariant_factors(reduced_laplacian(SinkedGraph(g, sink))).invariant_factors
                for sink in g.vertices
            }
            assert len(seen) == 1


class TestLatticeMembership:
    def test_zero_vector(self):
        a = reduced_laplacian(cone(k2()))
        assert lattice_membership(a, (0, 0)) == (0, 0)

    def test_row_of_transpose(self):
        a = reduced_laplacian(cone(k2()))
        witness = lattice_membership(a, (2, -1))
        assert witness == (1, 0)

    def test_generator_class_has_no_witness(self):
        a = reduced_laplacian(cone(k2()))
        assert lattice_membership(a, (1, 0)) is None

    @given(st.data())
    @settings(max_examples=80, deadline=None)
    def test_image_vectors_have_witnesses(self, data):
        rng = random.Random(data.draw(st.integers(0, 10**6)))
        g = random_sinked_graph(rng, rng.randint(2, 5))
        a = reduced_laplacian(g)
        if determinant(a) == 0:
            return
        y = [rng.randint(-4, 4) for _ in range(a.rows)]
        v = a.transpose().mul_vector(y)
        witness = lattice_membership(a, v)
        assert witness is not None
        assert a.transpose().mul_vector(witness) == v

    @given(square_matrices, st.lists(st.integers(-6, 6), min_size=1, max_size=6))
    @settings(max_examples=120, deadline=None)
    def test_against_rational_oracle(self, a, v):
        det = determinant(a)
        if det == 0 or abs(det) > 50:
            return
        v = (v * a.rows)[: a.rows]
        got = lattice_membership(a, v)
        expected = membership_by_rational_solve(a, v)
        assert (got is not None) == expected
        if got is not None:
            assert a.transpose().mul_vector(got) == tuple(v)


def test_group_structure_serialization():
    structure = invariant_factors(reduced_laplacian(cone(hypercube(2))))
    payload = structure.to_dict()
    assert payload == {
        "invariant_factors": [3, 15],
        "elementary_divisors": [3, 3, 5],
        "order": "45",
    }


def test_chain_normalization_collapses_coprime_orders():
    # 6 and 4 do not form a chain; the group Z6 + Z4 is Z2 + Z12.
    a = IntMatrix.from_rows([[6, 0], [0, 4]])
    assert invariant_factors(a).invariant_factors == (2, 12)
