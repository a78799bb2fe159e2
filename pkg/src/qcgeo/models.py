"""Bundled model corpus, generated programmatically.

* heisenberg_n{1,2}: de^a = 0, de^{4n+s} = omega_s.
* cfs_solvable: the seven-dimensional solvable group with structure
  equations (de^1..de^7) = (0, e^15+e^34-e^46, -e^24+e^16+e^45, -2e^14,
  e^12-e^34+e^46, e^13-e^42-e^45, e^14-e^23+e^56).
* sphere_n{1,2} / hyperbolic_n1: compact and non-compact homogeneous
  models.  These are not Lie algebras in the coframe: their d-table is
  the projected bracket of the isotropy splitting, and the canonical
  connection's curvature enters as the model's base curvature block.
  Both are computed exactly from quaternionic matrices here and checked
  against the closed formulas in the test-suite.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache

from .lie_input import CoframeModel
from .model_spaces import CURVATURE_SIG, standard_forms
from .tensor import Tensor

MODEL_NAMES = (
    "heisenberg_n1",
    "heisenberg_n2",
    "sphere_n1",
    "sphere_n2",
    "hyperbolic_n1",
    "cfs_solvable",
)


def heisenberg(n: int) -> CoframeModel:
    mc = standard_forms(n)
    table = {}
    for s in range(3):
        table[4 * n + 1 + s] = [(v, key[0]) for key, v in sorted(mc.omega[s].c.items())]
    return CoframeModel(f"heisenberg_n{n}", n, table)


def cfs_solvable() -> CoframeModel:
    one = Fraction(1)
    rows = {
        2: [(one, (1, 5)), (one, (3, 4)), (-one, (4, 6))],
        3: [(-one, (2, 4)), (one, (1, 6)), (one, (4, 5))],
        4: [(-2 * one, (1, 4))],
        5: [(one, (1, 2)), (-one, (3, 4)), (one, (4, 6))],
        6: [(one, (1, 3)), (one, (2, 4)), (-one, (4, 5))],
        7: [(one, (1, 4)), (-one, (2, 3)), (one, (5, 6))],
    }
    table = {i: sorted(r, key=lambda e: e[1]) for i, r in rows.items()}
    return CoframeModel("cfs_solvable", 1, table)


# -- quaternion arithmetic over the rationals ---------------------------------

class Quat:
    """a + bi + cj + dk with Fraction components."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a=0, b=0, c=0, d=0):
        self.a, self.b, self.c, self.d = (Fraction(x) for x in (a, b, c, d))

    def __add__(self, o):
        return Quat(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    def __sub__(self, o):
        return Quat(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __neg__(self):
        return Quat(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, o):
        if isinstance(o, (int, Fraction)):
            return Quat(self.a * o, self.b * o, self.c * o, self.d * o)
        a1, b1, c1, d1 = self.a, self.b, self.c, self.d
        a2, b2, c2, d2 = o.a, o.b, o.c, o.d
        return Quat(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )

    __rmul__ = __mul__

    def conj(self):
        return Quat(self.a, -self.b, -self.c, -self.d)

    def __eq__(self, o):
        return (self.a, self.b, self.c, self.d) == (o.a, o.b, o.c, o.d)

    def __bool__(self):
        return bool(self.a or self.b or self.c or self.d)

    def __repr__(self):
        return f"Quat({self.a},{self.b},{self.c},{self.d})"

    def components(self):
        return (self.a, self.b, self.c, self.d)


QI = Quat(0, 1, 0, 0)
QJ = Quat(0, 0, 1, 0)
QK = Quat(0, 0, 0, 1)


def qmat(size):
    return [[Quat() for _ in range(size)] for _ in range(size)]


def qmat_add(A, B):
    return [[A[i][j] + B[i][j] for j in range(len(A))] for i in range(len(A))]


def qmat_sub(A, B):
    return [[A[i][j] - B[i][j] for j in range(len(A))] for i in range(len(A))]


def qmat_mul(A, B):
    size = len(A)
    out = qmat(size)
    for i in range(size):
        for k in range(size):
            if not A[i][k]:
                continue
            for j in range(size):
                if B[k][j]:
                    out[i][j] = out[i][j] + A[i][k] * B[k][j]
    return out


def qbracket(X, Y):
    """Bracket of pairs (matrix, quaternion) in sp(..) + sp(1)."""
    A, p = X
    B, q = Y
    return (qmat_sub(qmat_mul(A, B), qmat_mul(B, A)), p * q - q * p)


def _single(size, i, j, q: Quat):
    m = qmat(size)
    m[i][j] = q
    return m


class HomogeneousData:
    """g = m + h with exact brackets; emits the coframe model."""

    def __init__(self, n: int, compact: bool):
        self.n = n
        self.compact = compact
        size = n + 1
        last = n  # 0-based index of the distinguished row/column
        m_basis = []
        # horizontal frame e_{4l+1..4l+4}
        for l in range(n):
            if compact:
                m_basis.append((qmat_add(_single(size, last, l, -Quat(1)), _single(size, l, last, Quat(1))), Quat()))
                m_basis.append((qmat_add(_single(size, last, l, QI), _single(size, l, last, QI)), Quat()))
                m_basis.append((qmat_add(_single(size, last, l, QJ), _single(size, l, last, QJ)), Quat()))
                m_basis.append((qmat_add(_single(size, last, l, QK), _single(size, l, last, QK)), Quat()))
            else:
                m_basis.append((qmat_add(_single(size, last, l, Quat(1)), _single(size, l, last, Quat(1))), Quat()))
                m_basis.append((qmat_add(_single(size, last, l, -QI), _single(size, l, last, QI)), Quat()))
                m_basis.append((qmat_add(_single(size, last, l, -QJ), _single(size, l, last, QJ)), Quat()))
                m_basis.append((qmat_add(_single(size, last, l, -QK), _single(size, l, last, QK)), Quat()))
        # vertical frame w_1, w_2, w_3
        for q in (QI, QJ, QK):
            if compact:
                m_basis.append((_single(size, last, last, q), -q))
            else:
                m_basis.append((_single(size, last, last, -q), q))
        # isotropy: sp(n) block + diagonal sp(1)
        h_basis = []
        for i in range(n):
            for q in (QI, QJ, QK):
                h_basis.append((_single(size, i, i, q), Quat()))
            for j in range(i + 1, n):
                h_basis.append((qmat_add(_single(size, i, j, Quat(1)), _single(size, j, i, -Quat(1))), Quat()))
                for q in (QI, QJ, QK):
                    h_basis.append((qmat_add(_single(size, i, j, q), _single(size, j, i, q)), Quat()))
        for q in (QI, QJ, QK):
            h_basis.append((_single(size, last, last, q), q))
        self.m_basis = m_basis
        self.h_basis = h_basis
        self._build_coordinates()

    # -- coordinates of g-elements in the m + h basis --------------------------
    def _flatten(self, X):
        A, p = X
        out = []
        for row in A:
            for q in row:
                out.extend(q.components())
        out.extend(p.components())
        return out

    def _build_coordinates(self):
        from .linalg import solve_columns

        basis = self.m_basis + self.h_basis
        self._basis = basis
        cols = []
        for bi, X in enumerate(basis):
            flat = self._flatten(X)
            cols.append((bi, {(i,): v for i, v in enumerate(flat) if v}))
        self._cols = cols

    def coordinates(self, X):
        from .linalg import solve_columns

        flat = self._flatten(X)
        target = {(i,): v for i, v in enumerate(flat) if v}
        sol, _, res = solve_columns(self._cols, target)
        if sol is None:
            raise ValueError("element outside span(m + h); sanity failure")
        out = [Fraction(0)] * len(self._basis)
        for i, c in sol.items():
            out[i] = c
        return out

    # -- model emission ---------------------------------------------------------
    @property
    def dim_m(self):
        return 4 * self.n + 3

    def model(self, name: str) -> CoframeModel:
        nm = self.dim_m
        table = {}
        base = Tensor(CURVATURE_SIG, self.n)
        # brackets of m-frame pairs
        for j in range(nm):
            for k in range(j + 1, nm):
                coords = self.coordinates(qbracket(self.m_basis[j], self.m_basis[k]))
                for i in range(nm):
                    c = coords[i]
                    if c:
                        table.setdefault(i + 1, []).append((-c, (j + 1, k + 1)))
                # h-part: base curvature value is -ad(proj_h [e_j, e_k]) on m
                for hi in range(len(self.h_basis)):
                    ch = coords[nm + hi]
                    if not ch:
                        continue
                    for (r, c2), v in self.ad_matrix(hi).items():
                        base.add_term(((j + 1, k + 1), (r,), (c2,)), -ch * v)
        table = {i: sorted(row, key=lambda e: e[1]) for i, row in table.items()}
        return CoframeModel(name, self.n, table, base if not base.is_zero() else None)

    @lru_cache(maxsize=None)
    def _ad_matrix(self, hi: int) -> tuple:
        """ad(h_basis[hi]) restricted to m, as a gl dict; cached per index."""
        out = {}
        H = self.h_basis[hi]
        for l in range(self.dim_m):
            coords = self.coordinates(qbracket(H, self.m_basis[l]))
            for rest in range(self.dim_m, len(self._basis)):
                if coords[rest]:
                    raise ValueError("[h, m] not contained in m; splitting not reductive")
            for r in range(self.dim_m):
                if coords[r]:
                    out[(l + 1, r + 1)] = coords[r]
        return tuple(sorted(out.items()))

    def ad_matrix(self, hi: int) -> dict:
        return dict(self._ad_matrix(hi))


def sphere(n: int) -> CoframeModel:
    return HomogeneousData(n, compact=True).model(f"sphere_n{n}")


def hyperbolic(n: int) -> CoframeModel:
    return HomogeneousData(n, compact=False).model(f"hyperbolic_n{n}")


@lru_cache(maxsize=None)
def bundled_model(name: str) -> CoframeModel:
    if name not in MODEL_NAMES:
        raise KeyError(f"unknown bundled model {name!r}; known: {', '.join(MODEL_NAMES)}")
    if name.startswith("heisenberg"):
        return heisenberg(int(name[-1]))
    if name.startswith("sphere"):
        return sphere(int(name[-1]))
    if name.startswith("hyperbolic"):
        return hyperbolic(int(name[-1]))
    return cfs_solvable()


def write_corpus(directory) -> list:
    """Serialise the bundled corpus as JSON files; returns the paths."""
    import os

    from .lie_input import serialize_model

    os.makedirs(directory, exist_ok=True)
    paths = []
    for name in MODEL_NAMES:
        path = os.path.join(directory, f"{name}.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(serialize_model(bundled_model(name)) + "\n")
        paths.append(path)
    return paths
