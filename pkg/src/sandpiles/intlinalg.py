"""Exact integer linear algebra: Laplacians, Smith normal form, determinants,
and lattice membership.

Everything runs over Python's arbitrary-precision integers; the algorithms are
deterministic so test expectations are bit-stable.  Desk scale: dimensions up
to a few hundred.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .errors import InfiniteCokernel
from .graphs import AnyGraph, Digraph, Multigraph, SinkedGraph


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("dimensions must be nonnegative")
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("entry shape does not match dimensions")

    @staticmethod
    def from_rows(rows: Sequence[Sequence[int]]) -> IntMatrix:
        entries = tuple(tuple(int(x) for x in row) for row in rows)
        ncols = len(entries[0]) if entries else 0
        return IntMatrix(len(entries), ncols, entries)

    @staticmethod
    def identity(n: int) -> IntMatrix:
        return IntMatrix.from_rows(
            [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def zero(rows: int, cols: int) -> IntMatrix:
        return IntMatrix(rows, cols, tuple(tuple(0 for _ in range(cols)) for _ in range(rows)))

    def transpose(self) -> IntMatrix:
        return IntMatrix(
            self.cols, self.rows,
            tuple(tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols)),
        )

    def mul(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        ot = other.transpose().entries
        rows = tuple(
            tuple(sum(a * b for a, b in zip(row, col)) for col in ot)
            for row in self.entries
        )
        return IntMatrix(self.rows, other.cols, rows)

    def mul_vector(self, v: Sequence[int]) -> tuple[int, ...]:
        if len(v) != self.cols:
            raise ValueError("dimension mismatch")
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self.entries)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.entries[i][i] for i in range(min(self.rows, self.cols)))


@dataclass(frozen=True)
class SmithDecomposition:
    """U @ A @ V = D with U, V unimodular and D = diag(d1 | d2 | ...)."""

    u: IntMatrix
    d: IntMatrix
    v: IntMatrix

    def diagonal(self) -> tuple[int, ...]:
        return self.d.diagonal()


@dataclass(frozen=True)
class GroupStructure:
    """A finite abelian group in both standard presentations."""

    invariant_factors: tuple[int, ...]
    elementary_divisors: tuple[int, ...]
    order: int

    def to_dict(self) -> dict:
        return {
            "invariant_factors": list(self.invariant_factors),
            "elementary_divisors": list(self.elementary_divisors),
            "order": str(self.order),
        }


# -- Laplacians ---------------------------------------------------------------


def laplacian(g: Union[AnyGraph, SinkedGraph]) -> IntMatrix:
    """Full Laplacian over all vertices in graph order; diagonal is the (out-)degree."""
    if isinstance(g, SinkedGraph):
        g = g.graph
    n = g.n
    rows = []
    for i in range(n):
        mrow = g.mult_row(i)
        deg = sum(mrow)
        rows.append([deg if i == j else -mrow[j] for j in range(n)])
    return IntMatrix.from_rows(rows) if n else IntMatrix(0, 0, ())


def reduced_laplacian(g: SinkedGraph) -> IntMatrix:
    """Laplacian with the sink row and column removed, indexed by nonsink_order."""
    adj = g.adjacency()
    n = g.n_nonsink
    out = g.out_degrees
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = out[i]
        for j, m in adj[i]:
            rows[i][j] -= m
    return IntMatrix.from_rows(rows) if n else IntMatrix(0, 0, ())


# -- determinant (Bareiss, fraction-free) --------------------------------------


def determinant(a: IntMatrix) -> int:
    if not a.is_square():
        raise ValueError("determinant needs a square matrix")
    n = a.rows
    if n == 0:
        return 1
    m = [list(row) for row in a.entries]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = pivot
    return sign * m[n - 1][n - 1]


# -- Smith normal form ----------------------------------------------------------


def _find_pivot(m, t, rows, cols):
    """Nonzero entry of minimal absolute value in m[t:, t:], earliest position on ties."""
    best = None
    best_pos = None
    for i in range(t, rows):
        mi = m[i]
        for j in range(t, cols):
            x = mi[j]
            if x:
                ax = -x if x < 0 else x
                if best is None or ax < best:
                    best = ax
                    best_pos = (i, j)
                    if ax == 1:
                        return best_pos
    return best_pos


def smith_normal_form(a: IntMatrix) -> SmithDecomposition:
    """Deterministic Smith normal form with transforms.

    Pivoting picks the nonzero entry of minimal absolute value in the working
    submatrix and reduces rows/columns modulo the pivot before eliminating,
    which keeps coefficient growth in check on cube-cone Laplacians.
    """
    rows, cols = a.rows, a.cols
    m = [list(row) for row in a.entries]
    u = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    v = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

    def swap_rows(i1, i2):
        m[i1], m[i2] = m[i2], m[i1]
        u[i1], u[i2] = u[i2], u[i1]

    def swap_cols(j1, j2):
        for row in m:
            row[j1], row[j2] = row[j2], row[j1]
        for row in v:
            row[j1], row[j2] = row[j2], row[j1]

    def add_row(dst, src, q):
        # row[dst] -= q * row[src]
        mdst, msrc = m[dst], m[src]
        for j in range(cols):
            mdst[j] -= q * msrc[j]
        udst, usrc = u[dst], u[src]
        for j in range(rows):
            udst[j] -= q * usrc[j]

    def add_col(dst, src, q):
        # col[dst] -= q * col[src]
        for row in m:
            row[dst] -= q * row[src]
        for row in v:
            row[dst] -= q * row[src]

    t = 0
    limit = min(rows, cols)
    while t < limit:
        pos = _find_pivot(m, t, rows, cols)
        if pos is None:
            break
        i0, j0 = pos
        if i0 != t:
            swap_rows(t, i0)
        if j0 != t:
            swap_cols(t, j0)

        while True:
            # Clear column t, restarting whenever a smaller remainder shows up.
            dirty = False
            for i in range(rows):
                if i == t or m[i][t] == 0:
                    continue
                q = m[i][t] // m[t][t]
                add_row(i, t, q)
                if m[i][t]:
                    swap_rows(t, i)
                    dirty = True
                    break
            if dirty:
                continue
            for j in range(cols):
                if j == t or m[t][j] == 0:
                    continue
                q = m[t][j] // m[t][t]
                add_col(j, t, q)
                if m[t][j]:
                    swap_cols(t, j)
                    dirty = True
                    break
            if dirty:
                continue
            break

        if m[t][t] < 0:
            for j in range(cols):
                m[t][j] = -m[t][j]
            for j in range(rows):
                u[t][j] = -u[t][j]

        # Divisibility: fold any non-divisible entry into the pivot's row and redo.
        pivot = m[t][t]
        offending = None
        for i in range(t + 1, rows):
            mi = m[i]
            for j in range(t + 1, cols):
                if mi[j] % pivot:
                    offending = i
                    break
            if offending is not None:
                break
        if offending is not None:
            add_row(t, offending, -1)
            continue
        t += 1

    d = [[0] * cols for _ in range(rows)]
    for i in range(min(rows, cols)):
        d[i][i] = m[i][i]
    return SmithDecomposition(
        IntMatrix.from_rows(u) if rows else IntMatrix(0, 0, ()),
        IntMatrix.from_rows(d) if rows else IntMatrix(0, cols, tuple()),
        IntMatrix.from_rows(v) if cols else IntMatrix(cols, 0, tuple(() for _ in range(cols))),
    )


def _balanced(x: int, modulus: int) -> int:
    r = x % modulus
    return r - modulus if r > modulus // 2 else r


def _smith_diagonal_mod(a: IntMatrix, modulus: int) -> list[int]:
    """Elimination diagonal with every entry kept reduced modulo the modulus.

    Valid for computing the cokernel of a nonsingular square matrix with
    |det| = modulus: the column lattice already contains modulus * Z^n, so
    shifting any entry by the modulus is a unimodular column operation against
    those implicit columns.  The true cyclic orders are gcd(g_i, modulus).
    """
    n = a.rows
    m = [[_balanced(x, modulus) for x in row] for row in a.entries]

    for t in range(n):
        while True:
            best = None
            pos = None
            for i in range(t, n):
                mi = m[i]
                for j in range(t, n):
                    x = mi[j]
                    if x:
                        ax = -x if x < 0 else x
                        if best is None or ax < best:
                            best, pos = ax, (i, j)
                            if ax == 1:
                                break
                if best == 1:
                    break
            if pos is None:
                break
            i0, j0 = pos
            if i0 != t:
                m[t], m[i0] = m[i0], m[t]
            if j0 != t:
                for row in m:
                    row[t], row[j0] = row[j0], row[t]
            pivot = m[t][t]
            clean = True
            for i in range(t + 1, n):
                if m[i][t]:
                    q = m[i][t] // pivot
                    mi, mt = m[i], m[t]
                    for j in range(t, n):
                        mi[j] = _balanced(mi[j] - q * mt[j], modulus)
                    if mi[t]:
                        clean = False
            if not clean:
                continue
            for j in range(t + 1, n):
                if m[t][j]:
                    q = m[t][j] // pivot
                    for row in m:
                        row[j] = _balanced(row[j] - q * row[t], modulus)
                    if m[t][j]:
                        clean = False
            if clean:
                break
    return [m[i][i] for i in range(n)]


def _divisibility_chain(orders: Sequence[int]) -> list[int]:
    """Normalize cyclic orders into the invariant-factor chain by gcd/lcm sweeps."""
    from math import gcd

    chain = sorted(x for x in orders if x > 1)
    changed = True
    while changed:
        changed = False
        for i in range(len(chain)):
            for j in range(i + 1, len(chain)):
                if chain[j] % chain[i]:
                    g = gcd(chain[i], chain[j])
                    chain[i], chain[j] = g, chain[i] // g * chain[j]
                    changed = True
        if changed:
            chain.sort()
    return [x for x in chain if x > 1]


def _factorize(n: int) -> dict[int, int]:
    """Trial-division factorization; group orders here are desk-scale."""
    factors: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def group_structure_from_diagonal(diag: Sequence[int]) -> GroupStructure:
    invariant = tuple(d for d in diag if d not in (0, 1))
    elementary: list[int] = []
    order = 1
    for d in invariant:
        order *= d
        for p, e in _factorize(d).items():
            elementary.append(p**e)
    return GroupStructure(invariant, tuple(sorted(elementary)), order)


def invariant_factors(a: IntMatrix) -> GroupStructure:
    """Cokernel structure of a square nonsingular integer matrix.

    The diagonal is computed with entries reduced modulo |det|, which keeps
    coefficient growth flat at any dimension this package meets; the chain is
    then recovered through gcd(., det) and gcd/lcm normalization.
    """
    from math import gcd

    if not a.is_square():
        raise ValueError("invariant factors need a square matrix")
    det = determinant(a)
    if det == 0:
        rank = sum(1 for d in smith_normal_form(a).diagonal() if d)
        raise InfiniteCokernel(a.rows - rank)
    modulus = abs(det)
    if modulus == 1:
        return GroupStructure((), (), 1)
    diag = _smith_diagonal_mod(a, modulus)
    orders = [gcd(g, modulus) for g in diag]
    chain = _divisibility_chain(orders)
    structure = group_structure_from_diagonal(chain)
    if structure.order != modulus:
        raise AssertionError("invariant factors do not multiply to |det|")
    return structure


def elementary_divisors_of(factors: Sequence[int]) -> tuple[int, ...]:
    """Prime-power multiset of a direct sum of cyclic groups of the given orders."""
    out: list[int] = []
    for f in factors:
        if f <= 0:
            raise ValueError("cyclic orders must be positive")
        if f == 1:
            continue
        for p, e in _factorize(f).items():
            out.append(p**e)
    return tuple(sorted(out))


# -- lattice membership ----------------------------------------------------------


class LatticeSolver:
    """Decides membership in the column lattice of B = A^T and produces witnesses.

    Built from one Smith decomposition of B; solving B y = v reduces to exact
    divisions along the diagonal.
    """

    def __init__(self, a: IntMatrix):
        self.a = a
        self.b = a.transpose()
        self._snf = smith_normal_form(self.b)
        self._diag = self._snf.diagonal()

    def solve(self, v: Sequence[int]) -> tuple[int, ...] | None:
        """Integer y with A^T y = v, or None if v is outside the lattice."""
        if len(v) != self.b.rows:
            raise ValueError("dimension mismatch")
        uv = self._snf.u.mul_vector(v)
        z = [0] * self.b.cols
        for i, x in enumerate(uv):
            d = self._diag[i] if i < len(self._diag) else 0
            if d == 0:
                if x != 0:
                    return None
            else:
                if x % d:
                    return None
                z[i] = x // d
        y = self._snf.v.mul_vector(z)
        assert self.b.mul_vector(y) == tuple(v)
        return y

    def class_coordinates(self, x: Sequence[int]) -> tuple[int, ...]:
        """Coordinates of the class of x in the cokernel's cyclic decomposition."""
        ux = self._snf.u.mul_vector(x)
        coords = []
        for i, z in enumerate(ux):
            d = self._diag[i] if i < len(self._diag) else 0
            coords.append(z % d if d else z)
        return tuple(coords)

    def class_order(self, x: Sequence[int]) -> int:
        """Order of the class of x in the cokernel (matrix must be nonsingular)."""
        from math import gcd, lcm

        ux = self._snf.u.mul_vector(x)
        order = 1
        for i, z in enumerate(ux):
            d = self._diag[i] if i < len(self._diag) else 0
            if d == 0:
                raise InfiniteCokernel(1)
            order = lcm(order, d // gcd(d, z % d))
        return order


def lattice_membership(a: IntMatrix, v: Sequence[int]) -> tuple[int, ...] | None:
    """Witness y with A^T y = v over the integers, or None (a normal outcome)."""
    return LatticeSolver(a).solve(v)


# -- small helpers used across the package ---------------------------------------


def matrix_is_unimodular(a: IntMatrix) -> bool:
    return a.is_square() and abs(determinant(a)) == 1
