"""Independent oracles the tests check the library against.

Each oracle deliberately takes a different route than the implementation:
determinants by permutation expansion, lattice membership by rational
elimination, spanning trees by subset enumeration, group counts by brute
force.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from sandpiles.graphs import Multigraph
from sandpiles.intlinalg import IntMatrix


def det_by_permutation_expansion(a: IntMatrix) -> int:
    n = a.rows
    total = 0
    for perm in itertools.permutations(range(n)):
        sign = 1
        seen = list(perm)
        # count inversions for the sign
        inv = sum(
            1
            for i in range(n)
            for j in range(i + 1, n)
            if seen[i] > seen[j]
        )
        sign = -1 if inv % 2 else 1
        prod = 1
        for i in range(n):
            prod *= a.entries[i][perm[i]]
            if prod == 0:
                break
        total += sign * prod
    return total


def rational_solve(a: IntMatrix, v: list[int]) -> list[Fraction] | None:
    """Solve A x = v over the rationals by Gaussian elimination; None if singular
    or inconsistent."""
    n, m = a.rows, a.cols
    rows = [[Fraction(x) for x in row] + [Fraction(v[i])] for i, row in enumerate(a.entries)]
    pivot_cols = []
    r = 0
    for c in range(m):
        pivot = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r])]
        pivot_cols.append(c)
        r += 1
        if r == n:
            break
    for i in range(r, n):
        if rows[i][m] != 0:
            return None
    sol = [Fraction(0)] * m
    for i, c in enumerate(pivot_cols):
        sol[c] = rows[i][m]
    return sol


def membership_by_rational_solve(a: IntMatrix, v: list[int]) -> bool:
    """v in Im A^T over Z, decided by solving the transposed system rationally
    and checking integrality (complete for nonsingular A)."""
    sol = rational_solve(a.transpose(), list(v))
    if sol is None:
        return False
    return all(x.denominator == 1 for x in sol)


def spanning_tree_count(g: Multigraph) -> int:
    """Brute-force count: parallel edges are distinct edges."""
    unit_edges = []
    for u, v, m in g.edges():
        unit_edges.extend([(g.index(u), g.index(v))] * m)
    n = g.n
    if n <= 1:
        return 1
    count = 0
    for subset in itertools.combinations(range(len(unit_edges)), n - 1):
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        acyclic = True
        for k in subset:
            u, v = unit_edges[k]
            ru, rv = find(u), find(v)
            if ru == rv:
                acyclic = False
                break
            parent[ru] = rv
        if acyclic:
            count += 1
    return count


def all_stable_configs(out_degrees):
    return itertools.product(*(range(d) for d in out_degrees))
